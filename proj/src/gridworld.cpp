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

#include "stlplan/gridworld.hpp"

#include <array>
#include <string>

namespace stlplan {

namespace {

struct Delta {
  int dc;
  int dr;
};

// Indexed by GridAction; y grows north.
constexpr std::array<Delta, kNumGridActions> kDeltas = {{
    {0, 1},    // North
    {1, 0},    // East
    {0, -1},   // South
    {-1, 0},   // West
    {1, 1},    // NorthEast
    {-1, 1},   // NorthWest
    {1, -1},   // SouthEast
    {-1, -1},  // SouthWest
    {0, 0},    // Rest
}};

// The two directions adjoining each movement: for a cardinal the two
// diagonals containing it, for a diagonal its two cardinal components.
constexpr std::array<std::array<int, 2>, 8> kAdjoining = {{
    {kNorthEast, kNorthWest},  // North
    {kNorthEast, kSouthEast},  // East
    {kSouthEast, kSouthWest},  // South
    {kNorthWest, kSouthWest},  // West
    {kNorth, kEast},           // NorthEast
    {kNorth, kWest},           // NorthWest
    {kSouth, kEast},           // SouthEast
    {kSouth, kWest},           // SouthWest
}};

void check_spec(const GridSpec& spec) {
  if (spec.width <= 0 || spec.height <= 0) {
    throw ConfigError("grid dimensions must be positive");
  }
  if (spec.start_col < 0 || spec.start_col >= spec.width || spec.start_row < 0 ||
      spec.start_row >= spec.height) {
    throw ConfigError("grid start cell out of range");
  }
  if (!(spec.move_prob >= 0.0 && spec.move_prob <= 1.0)) {
    throw ConfigError("move probability must lie in [0, 1]");
  }
  if (spec.rest_cost < 0.0 || spec.cardinal_cost < 0.0 || spec.diagonal_cost < 0.0) {
    throw ConfigError("action costs must be nonnegative");
  }
}

// Appends mass to the outcome for `state`, merging with an earlier entry
// for the same state so rows keep first-occurrence order.
void add_mass(std::vector<Outcome>& row, int state, double mass) {
  if (mass == 0.0) return;
  for (auto& o : row) {
    if (o.state == state) {
      o.prob += mass;
      return;
    }
  }
  row.push_back({state, mass});
}

}  // namespace

int grid_state(const GridSpec& spec, int col, int row) {
  if (col < 0 || col >= spec.width || row < 0 || row >= spec.height) {
    throw ConfigError("grid cell out of range");
  }
  return row * spec.width + col;
}

std::vector<std::string> grid_dimension_names() { return {"x", "y"}; }

FiniteHorizonMdp build_grid_mdp(const GridSpec& spec, int horizon) {
  check_spec(spec);
  const int S = spec.width * spec.height;
  FiniteHorizonMdp mdp(S, kNumGridActions, horizon,
                       grid_state(spec, spec.start_col, spec.start_row));

  for (int row_i = 0; row_i < spec.height; ++row_i) {
    for (int col = 0; col < spec.width; ++col) {
      const int s = row_i * spec.width + col;
      mdp.set_embedding(s, {col + 0.5, row_i + 0.5});

      auto target = [&](int action, bool& blocked) {
        const int tc = col + kDeltas[action].dc;
        const int tr = row_i + kDeltas[action].dr;
        blocked = tc < 0 || tc >= spec.width || tr < 0 || tr >= spec.height;
        return blocked ? s : tr * spec.width + tc;
      };

      for (int a = 0; a < kNumGridActions; ++a) {
        std::vector<Outcome> outcomes;
        if (a == kRest) {
          outcomes.push_back({s, 1.0});
        } else {
          const double slip = (1.0 - spec.move_prob) / 3.0;
          bool intended_blocked = false;
          const int intended = target(a, intended_blocked);
          // A blocked intended move always folds into staying put.
          add_mass(outcomes, intended, spec.move_prob);
          double dropped = 0.0;
          for (int adj : kAdjoining[a]) {
            bool blocked = false;
            const int t = target(adj, blocked);
            if (blocked && spec.blocked_rule == BlockedSlipRule::Renormalize) {
              dropped += slip;
            } else {
              add_mass(outcomes, t, slip);
            }
          }
          add_mass(outcomes, s, slip);
          if (dropped > 0.0) {
            const double rescale = 1.0 / (1.0 - dropped);
            for (auto& o : outcomes) o.prob *= rescale;
          }
        }
        mdp.set_row_all_stages(s, a, outcomes);
      }
    }
  }
  mdp.validate();
  return mdp;
}

CostFunction grid_cost_function(const GridSpec& spec, int horizon) {
  check_spec(spec);
  const int S = spec.width * spec.height;
  const double bound =
      std::max(spec.rest_cost, std::max(spec.cardinal_cost, spec.diagonal_cost));
  CostFunction cost(horizon, S, kNumGridActions, bound);
  for (int h = 0; h <= horizon; ++h) {
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < kNumGridActions; ++a) {
        cost.at(h, s, a) = a == kRest           ? spec.rest_cost
                           : a >= kNorthEast    ? spec.diagonal_cost
                                                : spec.cardinal_cost;
      }
    }
  }
  return cost;
}

}  // namespace stlplan
