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

// Slippery gridworld: eight movement directions plus rest. A move goes the
// intended way with probability move_prob; the rest of the mass splits
// evenly between the two adjoining directions and staying put. Moves off
// the edge leave the robot where it is. Movement costs 1 for cardinal and
// 2 for diagonal directions; resting is free.

#pragma once

#include <string>
#include <vector>

#include "stlplan/mdp.hpp"

namespace stlplan {

// Action ids, fixed: cardinals first, then diagonals, then rest.
enum GridAction : int {
  kNorth = 0,
  kEast = 1,
  kSouth = 2,
  kWest = 3,
  kNorthEast = 4,
  kNorthWest = 5,
  kSouthEast = 6,
  kSouthWest = 7,
  kRest = 8,
};

inline constexpr int kNumGridActions = 9;

// How slip outcomes that would leave the grid are treated: folded into
// staying put (default), or dropped with the row renormalized.
enum class BlockedSlipRule { CollapseToStay, Renormalize };

struct GridSpec {
  int width = 6;
  int height = 6;
  int start_col = 0;
  int start_row = 0;
  double move_prob = 0.93;
  double rest_cost = 0.0;
  double cardinal_cost = 1.0;
  double diagonal_cost = 2.0;
  BlockedSlipRule blocked_rule = BlockedSlipRule::CollapseToStay;
};

// Cells index row-major: state = row * width + col. The embedding puts a
// state at its cell center (col + 0.5, row + 0.5), with coordinate names
// ("x", "y"): x grows east, y grows north.
int grid_state(const GridSpec& spec, int col, int row);
std::vector<std::string> grid_dimension_names();

// Builds the time-homogeneous kernel over stages 0..horizon. Transition
// rows list outcomes in the order intended, adjoining, adjoining, stay
// (merged when blocking makes targets coincide), which pins down the
// cumulative distribution that sampling walks. Throws ConfigError on an
// invalid spec.
FiniteHorizonMdp build_grid_mdp(const GridSpec& spec, int horizon);

// Stage-independent action costs for the same grid.
CostFunction grid_cost_function(const GridSpec& spec, int horizon);

}  // namespace stlplan
