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

// Online primal-dual learner for one-constraint problems with sampling
// access only. Each round plays a best response to the scalarized cost
// c + lambda d, estimates that policy's occupancy by Monte Carlo, and
// updates the multiplier by an exponentiated-gradient step on the scaled
// simplex {lambda >= 0, |lambda|_1 = B} whose first coordinate multiplies
// the constraint violation and whose second absorbs the rest of the
// budget. The average of the per-round occupancy estimates converges to an
// optimal occupancy at the usual no-regret rates, and the returned policy
// is the conditional policy of that average.
//
// The best response and occupancy estimator are injectable: the model-free
// pairing is Q-learning plus rollouts, while tests swap in exact backward
// induction and exact occupancy propagation to measure the primal-dual gap
// in isolation.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "stlplan/dual_solver.hpp"
#include "stlplan/mdp.hpp"
#include "stlplan/mdp_algorithms.hpp"
#include "stlplan/simulate.hpp"

namespace stlplan {

// Point on the scaled multiplier simplex.
struct LagrangeState {
  std::array<double, 2> lambda = {0.0, 0.0};
  double budget = 0.0;
};

// Multiplicative-weights step: lambda_i proportional to
// lambda_i * exp(eta * gain_i), renormalized to the budget. The largest
// exponent is subtracted before exponentiating so the update cannot
// overflow; non-finite inputs raise NumericError.
LagrangeState eg_update(const LagrangeState& state, const std::array<double, 2>& gains,
                        double eta);

struct QLearningOptions {
  int episodes = 4000;
  double eps_start = 1.0;   // epsilon-greedy exploration, linearly annealed
  double eps_end = 0.05;
  double eps_anneal_frac = 0.8;  // fraction of episodes the anneal spans
  double alpha_h0 = 10.0;        // step size h0 / (h0 + visits)
};

// Stage-indexed tabular Q-learning. A fresh learner starts from all-zero
// tables (optimistic, since costs are nonnegative); keeping one instance
// across best-response calls warm-starts each call at the previous tables,
// which tracks a slowly moving multiplier with far fewer episodes. Visit
// counts reset every call so the step-size schedule is per call; warm
// callers should also hold exploration at its floor (see
// run_ob_mfc_model_free) since the tables already cover the reachable
// corridor.
class QLearner {
 public:
  QLearner(int horizon, int num_states, int num_actions);

  // Runs `options.episodes` episodes of epsilon-greedy Q-learning against
  // the simulator under the given cost table, drawing from the stream
  // seeded by `seed`.
  void train(const Simulator& sim, const CostFunction& cost,
             const QLearningOptions& options, uint64_t seed);

  // Deterministic greedy policy; ties break toward the lowest action id.
  Policy greedy_policy() const;

 private:
  double& q(int stage, int state, int action) {
    return q_[(static_cast<size_t>(stage) * num_states_ + state) * num_actions_ +
              action];
  }
  double q(int stage, int state, int action) const {
    return q_[(static_cast<size_t>(stage) * num_states_ + state) * num_actions_ +
              action];
  }
  int greedy_action(int stage, int state) const;

  int horizon_;
  int num_states_;
  int num_actions_;
  std::vector<double> q_;
  std::vector<int> visits_;
};

// One best-response call of the learner: fresh tables, one training run,
// greedy extraction.
Policy q_learning_best_response(const Simulator& sim, const CostFunction& cost,
                                const QLearningOptions& options, uint64_t seed);

struct ObMfcHyperparams {
  int iterations = 200;  // dual rounds T
  double budget = 40.0;  // multiplier budget B
  double eta = 0.05;     // exponentiated-gradient step size
  int rollouts = 5000;   // occupancy-estimate rollouts per round
  QLearningOptions q_learning;
  // Extra episodes for the first best-response call (tables start cold);
  // 0 means the same as every other call. Only meaningful with warm_start.
  int first_call_episodes = 0;
  // Reuse one Q table across best-response calls. Cheap when the multiplier
  // barely moves, but cold calls re-explore and give sharper best responses;
  // the benchmark configs run cold.
  bool warm_start = false;
  uint64_t seed = 1;
};

// Per-round diagnostics, one row per dual iteration.
struct ObMfcIterate {
  int iteration = 0;        // 1-based
  double lambda1 = 0.0;     // multiplier on the constraint before the update
  double objective_cost = 0.0;
  double constraint_cost = 0.0;
  double lagrangian = 0.0;  // objective + lambda1 (constraint - threshold)
  double regret_proxy = 0.0;  // running regret against the best fixed vertex
};

struct ObMfcResult {
  Policy policy;                   // conditional policy of avg_occupancy
  OccupancyMeasure avg_occupancy;  // average of the per-round estimates
  LagrangeState final_lambda;
  double avg_lambda1 = 0.0;
  double regret_proxy = 0.0;
  std::vector<ObMfcIterate> diagnostics;
};

// Injectable components: a best response to the scalarized cost at the
// current multiplier, and an occupancy estimate for the returned policy.
struct ObMfcComponents {
  std::function<Policy(double lambda1, int iteration)> best_response;
  std::function<OccupancyMeasure(const Policy& policy, int iteration)> estimate;
};

// Core loop over explicit cost tables (shapes are read from `objective`).
ObMfcResult run_ob_mfc(const CostFunction& objective, const CostFunction& constraint,
                       double threshold, const ObMfcHyperparams& params,
                       const ObMfcComponents& components);

// Model-free wiring: Q-learning best responses and Monte Carlo occupancy
// estimates on the simulator. Fully deterministic for a fixed seed.
ObMfcResult run_ob_mfc_model_free(const Simulator& sim, const CostFunction& objective,
                                  const CostFunction& constraint, double threshold,
                                  const ObMfcHyperparams& params);

// Distance to primal-dual optimality of an averaged occupancy and averaged
// multiplier: max over the budget simplex of L(avg_occ, .) minus the exact
// minimum over occupancies of L(., avg_lambda). Needs the explicit model.
double primal_dual_gap(const CmdpProblem& problem, const OccupancyMeasure& avg_occ,
                       double avg_lambda1, double budget);

}  // namespace stlplan
