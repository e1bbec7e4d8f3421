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

// Trajectory sampling. The Simulator interface exposes only shape metadata
// and one-step sampling, so algorithms written against it cannot peek at
// transition probabilities; that is the access model the learner assumes.
// Every rollout draws from its own counter-derived stream and Monte Carlo
// tallies are integer counts, so batch results are identical no matter how
// rollouts are scheduled across threads.

#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "stlplan/mdp.hpp"
#include "stlplan/rng.hpp"

namespace stlplan {

// Samples a transition by walking the row's outcomes in stored order with
// one uniform draw (inverse transform on the row's cumulative sums).
int sample_transition(const FiniteHorizonMdp& mdp, int stage, int state, int action,
                      double u);
inline int sample_transition(const FiniteHorizonMdp& mdp, int stage, int state,
                             int action, RngStream& rng) {
  return sample_transition(mdp, stage, state, action, rng.uniform());
}

// Samples an action from a policy row, again by inverse transform in
// action-id order.
int sample_action(const Policy& policy, int stage, int state, double u);
inline int sample_action(const Policy& policy, int stage, int state, RngStream& rng) {
  return sample_action(policy, stage, state, rng.uniform());
}

// Sampling access to an environment with hidden transition probabilities.
class Simulator {
 public:
  virtual ~Simulator() = default;

  virtual int num_states() const = 0;
  virtual int num_actions() const = 0;
  virtual int horizon() const = 0;
  virtual int initial_state() const = 0;

  // Successor of taking `action` in `state` at `stage`, consuming exactly
  // one uniform draw from `rng`.
  virtual int step(int state, int action, int stage, RngStream& rng) const = 0;
};

// Simulator backed by an explicit MDP.
class MdpSimulator : public Simulator {
 public:
  explicit MdpSimulator(std::shared_ptr<const FiniteHorizonMdp> mdp)
      : mdp_(std::move(mdp)) {}

  int num_states() const override { return mdp_->num_states(); }
  int num_actions() const override { return mdp_->num_actions(); }
  int horizon() const override { return mdp_->horizon(); }
  int initial_state() const override { return mdp_->initial_state(); }

  int step(int state, int action, int stage, RngStream& rng) const override {
    return sample_transition(*mdp_, stage, state, action, rng);
  }

 private:
  std::shared_ptr<const FiniteHorizonMdp> mdp_;
};

// One episode: states[h] and actions[h] for stages 0..horizon. Per stage
// the rollout draws the action first, then the transition.
struct Trajectory {
  std::vector<int> states;
  std::vector<int> actions;
};

Trajectory rollout(const Simulator& sim, const Policy& policy, RngStream& rng);

// Empirical occupancy from `num_rollouts` episodes; rollout r uses the
// stream derive_seed(seed, r). Visit counts are integers until the final
// division, so the result is independent of rollout execution order.
OccupancyMeasure estimate_occupancy(const Simulator& sim, const Policy& policy,
                                    int num_rollouts, uint64_t seed);

namespace serial {

// Single-threaded reference with the same seed layout; must produce
// exactly the same estimate as the parallel version.
OccupancyMeasure estimate_occupancy(const Simulator& sim, const Policy& policy,
                                    int num_rollouts, uint64_t seed);

}  // namespace serial

}  // namespace stlplan
