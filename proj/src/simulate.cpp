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

#include "stlplan/simulate.hpp"

#include <cstdint>

namespace stlplan {

int sample_transition(const FiniteHorizonMdp& mdp, int stage, int state, int action,
                      double u) {
  const auto row = mdp.row(stage, state, action);
  if (row.empty()) throw DomainError("sampling from an unset transition row");
  double cum = 0.0;
  for (const auto& o : row) {
    cum += o.prob;
    if (u < cum) return o.state;
  }
  // Rounding can leave cum marginally below 1; the draw belongs to the tail.
  return row.back().state;
}

int sample_action(const Policy& policy, int stage, int state, double u) {
  double cum = 0.0;
  for (int a = 0; a < policy.num_actions(); ++a) {
    cum += policy.prob(stage, state, a);
    if (u < cum) return a;
  }
  return policy.num_actions() - 1;
}

Trajectory rollout(const Simulator& sim, const Policy& policy, RngStream& rng) {
  if (policy.horizon() != sim.horizon() || policy.num_states() != sim.num_states() ||
      policy.num_actions() != sim.num_actions()) {
    throw ShapeError("policy shape does not match simulator");
  }
  const int H = sim.horizon();
  Trajectory traj;
  traj.states.resize(H + 1);
  traj.actions.resize(H + 1);
  int s = sim.initial_state();
  for (int h = 0; h <= H; ++h) {
    const int a = sample_action(policy, h, s, rng);
    traj.states[h] = s;
    traj.actions[h] = a;
    if (h < H) s = sim.step(s, a, h, rng);
  }
  return traj;
}

namespace {

OccupancyMeasure occupancy_from_counts(const std::vector<int64_t>& counts, int horizon,
                                       int num_states, int num_actions,
                                       int num_rollouts) {
  OccupancyMeasure occ(horizon, num_states, num_actions);
  const double inv = 1.0 / num_rollouts;
  size_t i = 0;
  for (int h = 0; h <= horizon; ++h) {
    for (int s = 0; s < num_states; ++s) {
      for (int a = 0; a < num_actions; ++a, ++i) {
        occ.at(h, s, a) = static_cast<double>(counts[i]) * inv;
      }
    }
  }
  return occ;
}

}  // namespace

OccupancyMeasure estimate_occupancy(const Simulator& sim, const Policy& policy,
                                    int num_rollouts, uint64_t seed) {
  if (num_rollouts <= 0) throw DomainError("need at least one rollout");
  const int H = sim.horizon();
  const int S = sim.num_states();
  const int A = sim.num_actions();
  const size_t table = static_cast<size_t>(H + 1) * S * A;
  std::vector<int64_t> counts(table, 0);
#pragma omp parallel
  {
    std::vector<int64_t> local(table, 0);
#pragma omp for schedule(static)
    for (int r = 0; r < num_rollouts; ++r) {
      RngStream rng(derive_seed(seed, r));
      const Trajectory traj = rollout(sim, policy, rng);
      for (int h = 0; h <= H; ++h) {
        local[(static_cast<size_t>(h) * S + traj.states[h]) * A + traj.actions[h]]++;
      }
    }
#pragma omp critical
    for (size_t i = 0; i < table; ++i) counts[i] += local[i];
  }
  return occupancy_from_counts(counts, H, S, A, num_rollouts);
}

namespace serial {

OccupancyMeasure estimate_occupancy(const Simulator& sim, const Policy& policy,
                                    int num_rollouts, uint64_t seed) {
  if (num_rollouts <= 0) throw DomainError("need at least one rollout");
  const int H = sim.horizon();
  const int S = sim.num_states();
  const int A = sim.num_actions();
  std::vector<int64_t> counts(static_cast<size_t>(H + 1) * S * A, 0);
  for (int r = 0; r < num_rollouts; ++r) {
    RngStream rng(derive_seed(seed, r));
    const Trajectory traj = rollout(sim, policy, rng);
    for (int h = 0; h <= H; ++h) {
      counts[(static_cast<size_t>(h) * S + traj.states[h]) * A + traj.actions[h]]++;
    }
  }
  return occupancy_from_counts(counts, H, S, A, num_rollouts);
}

}  // namespace serial

}  // namespace stlplan
