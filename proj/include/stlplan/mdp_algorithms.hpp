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

// Exact finite-horizon computations: policy evaluation, optimal control by
// backward induction, occupancy propagation, and conversions between
// policies and occupancy measures.
//
// The primary implementations parallelize the per-stage state sweeps with
// OpenMP; all floating-point reductions keep a fixed order, so results do
// not depend on the thread count. stlplan::serial holds independently
// written single-threaded references used by tests and benchmarks.

#pragma once

#include <utility>
#include <vector>

#include "stlplan/mdp.hpp"

namespace stlplan {

// Expected total cost of a policy from the initial state.
double value_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy,
                       const CostFunction& cost);

// Minimum expected total cost and a deterministic policy attaining it.
// Among equal-value actions the lowest action id wins, so the result is a
// canonical representative.
std::pair<Policy, double> optimal_policy_dp(const FiniteHorizonMdp& mdp,
                                            const CostFunction& cost);

// Expected visit mass per (stage, state, action) under the policy.
OccupancyMeasure occupancy_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy);

// Conditional action distribution of an occupancy measure. States with no
// mass at a stage get a uniform row; they are never reached, so any
// completion yields the same occupancy.
Policy policy_from_occupancy(const OccupancyMeasure& occupancy);

// Inner product of an occupancy measure with a cost table.
double cost_of_occupancy(const OccupancyMeasure& occupancy, const CostFunction& cost);

namespace serial {

// Reference implementations: plain loops, scatter-style occupancy update.
double value_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy,
                       const CostFunction& cost);
std::pair<Policy, double> optimal_policy_dp(const FiniteHorizonMdp& mdp,
                                            const CostFunction& cost);
OccupancyMeasure occupancy_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy);

}  // namespace serial

}  // namespace stlplan
