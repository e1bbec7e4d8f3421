// Copyright 2026 The stlplan Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// JSON round trips for the core containers. Documents carry explicit shape
// metadata and a type tag; loaders validate both and throw ConfigError on
// anything unexpected. Key order is fixed, and doubles print in
// shortest-round-trip form, so serializing equal values yields equal bytes.

#pragma once

#include <memory>
#include <string>

#include "nlohmann/json.hpp"
#include "stlplan/mdp.hpp"
#include "stlplan/stl_product.hpp"

namespace stlplan {

nlohmann::ordered_json mdp_to_json(const FiniteHorizonMdp& mdp);
std::shared_ptr<FiniteHorizonMdp> mdp_from_json(const nlohmann::json& j);

nlohmann::ordered_json cost_to_json(const CostFunction& cost);
CostFunction cost_from_json(const nlohmann::json& j);

nlohmann::ordered_json policy_to_json(const Policy& policy);
Policy policy_from_json(const nlohmann::json& j);

nlohmann::ordered_json occupancy_to_json(const OccupancyMeasure& occupancy);
OccupancyMeasure occupancy_from_json(const nlohmann::json& j);

// Product MDP with costs, formula, and the index codec: the tuple
// (base state, leaf flags, final flag) for every dense index.
nlohmann::ordered_json augmented_to_json(const AugmentedMdp& augmented);

void write_json_file(const std::string& path, const nlohmann::ordered_json& j);
nlohmann::json read_json_file(const std::string& path);

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace stlplan
