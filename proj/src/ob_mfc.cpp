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

#include "stlplan/ob_mfc.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace stlplan {

namespace {

// Seed-derivation tags so the learner's streams never collide.
constexpr uint64_t kTagBestResponse = 1;
constexpr uint64_t kTagOccupancy = 2;

}  // namespace

LagrangeState eg_update(const LagrangeState& state, const std::array<double, 2>& gains,
                        double eta) {
  if (!(state.budget > 0.0)) throw DomainError("multiplier budget must be positive");
  if (state.lambda[0] < 0.0 || state.lambda[1] < 0.0) {
    throw DomainError("multipliers must be nonnegative");
  }
  if (std::abs(state.lambda[0] + state.lambda[1] - state.budget) >
      1e-9 * state.budget) {
    throw DomainError("multipliers must sum to the budget");
  }
  if (!std::isfinite(gains[0]) || !std::isfinite(gains[1]) || !std::isfinite(eta)) {
    throw NumericError("non-finite exponentiated-gradient input");
  }
  const double e0 = eta * gains[0];
  const double e1 = eta * gains[1];
  const double m = std::max(e0, e1);
  const double w0 = state.lambda[0] * std::exp(e0 - m);
  const double w1 = state.lambda[1] * std::exp(e1 - m);
  const double z = w0 + w1;
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw NumericError("exponentiated-gradient weights vanished");
  }
  LagrangeState next = state;
  next.lambda[0] = state.budget * w0 / z;
  next.lambda[1] = state.budget * w1 / z;
  return next;
}

QLearner::QLearner(int horizon, int num_states, int num_actions)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions) {
  const size_t table = static_cast<size_t>(horizon + 1) * num_states * num_actions;
  q_.assign(table, 0.0);
  visits_.assign(table, 0);
}

int QLearner::greedy_action(int stage, int state) const {
  int best = 0;
  double best_q = q(stage, state, 0);
  for (int a = 1; a < num_actions_; ++a) {
    const double v = q(stage, state, a);
    if (v < best_q) {
      best_q = v;
      best = a;
    }
  }
  return best;
}

void QLearner::train(const Simulator& sim, const CostFunction& cost,
                     const QLearningOptions& options, uint64_t seed) {
  if (sim.horizon() != horizon_ || sim.num_states() != num_states_ ||
      sim.num_actions() != num_actions_) {
    throw ShapeError("simulator shape does not match learner");
  }
  if (cost.horizon() != horizon_ || cost.num_states() != num_states_ ||
      cost.num_actions() != num_actions_) {
    throw ShapeError("cost shape does not match learner");
  }
  // The step-size schedule restarts with each call.
  std::fill(visits_.begin(), visits_.end(), 0);
  RngStream rng(seed);
  const double anneal_span =
      std::max(1.0, options.eps_anneal_frac * options.episodes);
  for (int episode = 0; episode < options.episodes; ++episode) {
    const double frac = std::min(1.0, episode / anneal_span);
    const double eps =
        options.eps_start + frac * (options.eps_end - options.eps_start);
    int s = sim.initial_state();
    for (int h = 0; h <= horizon_; ++h) {
      const int a = rng.uniform() < eps ? rng.uniform_int(num_actions_)
                                        : greedy_action(h, s);
      double target = cost.at(h, s, a);
      int next = s;
      if (h < horizon_) {
        next = sim.step(s, a, h, rng);
        target += q(h + 1, next, greedy_action(h + 1, next));
      }
      const size_t idx =
          (static_cast<size_t>(h) * num_states_ + s) * num_actions_ + a;
      const double alpha = options.alpha_h0 / (options.alpha_h0 + visits_[idx]);
      ++visits_[idx];
      q_[idx] += alpha * (target - q_[idx]);
      s = next;
    }
  }
}

Policy QLearner::greedy_policy() const {
  Policy policy(horizon_, num_states_, num_actions_);
  for (int h = 0; h <= horizon_; ++h) {
    for (int s = 0; s < num_states_; ++s) {
      policy.set_deterministic(h, s, greedy_action(h, s));
    }
  }
  return policy;
}

Policy q_learning_best_response(const Simulator& sim, const CostFunction& cost,
                                const QLearningOptions& options, uint64_t seed) {
  QLearner learner(sim.horizon(), sim.num_states(), sim.num_actions());
  learner.train(sim, cost, options, seed);
  return learner.greedy_policy();
}

ObMfcResult run_ob_mfc(const CostFunction& objective, const CostFunction& constraint,
                       double threshold, const ObMfcHyperparams& params,
                       const ObMfcComponents& components) {
  if (constraint.horizon() != objective.horizon() ||
      constraint.num_states() != objective.num_states() ||
      constraint.num_actions() != objective.num_actions()) {
    throw ShapeError("objective and constraint shapes must match");
  }
  if (params.iterations <= 0) throw DomainError("need at least one iteration");
  if (!(params.budget > 0.0)) throw DomainError("multiplier budget must be positive");
  if (!components.best_response || !components.estimate) {
    throw DomainError("learner components must be set");
  }

  LagrangeState lambda{{params.budget / 2.0, params.budget / 2.0}, params.budget};
  OccupancyMeasure avg(objective.horizon(), objective.num_states(),
                       objective.num_actions());
  ObMfcResult result{Policy(objective.horizon(), objective.num_states(),
                            objective.num_actions()),
                     avg,
                     lambda,
                     0.0,
                     0.0,
                     {}};
  result.diagnostics.reserve(params.iterations);

  // Running sums for the regret of the multiplier sequence against the best
  // fixed point of the simplex; the maximum over the simplex of a linear
  // gain sits at a vertex, so two sums suffice.
  double violation_sum = 0.0;  // sum of (D_t - l), the gain at vertex (B, 0)
  double played_sum = 0.0;     // sum of lambda_t[0] (D_t - l)
  double lambda1_sum = 0.0;

  for (int t = 1; t <= params.iterations; ++t) {
    const Policy policy = components.best_response(lambda.lambda[0], t);
    const OccupancyMeasure occ = components.estimate(policy, t);
    const double c = cost_of_occupancy(occ, objective);
    const double d = cost_of_occupancy(occ, constraint);
    const double violation = d - threshold;

    violation_sum += violation;
    played_sum += lambda.lambda[0] * violation;
    lambda1_sum += lambda.lambda[0];
    const double regret = std::max(params.budget * violation_sum, 0.0) - played_sum;

    result.diagnostics.push_back({t, lambda.lambda[0], c, d,
                                  c + lambda.lambda[0] * violation, regret});
    avg.add_scaled(occ, 1.0);
    lambda = eg_update(lambda, {violation, 0.0}, params.eta);
  }

  avg.scale(1.0 / params.iterations);
  result.policy = policy_from_occupancy(avg);
  result.avg_occupancy = std::move(avg);
  result.final_lambda = lambda;
  result.avg_lambda1 = lambda1_sum / params.iterations;
  result.regret_proxy = result.diagnostics.back().regret_proxy;
  return result;
}

ObMfcResult run_ob_mfc_model_free(const Simulator& sim, const CostFunction& objective,
                                  const CostFunction& constraint, double threshold,
                                  const ObMfcHyperparams& params) {
  if (objective.horizon() != sim.horizon() ||
      objective.num_states() != sim.num_states() ||
      objective.num_actions() != sim.num_actions()) {
    throw ShapeError("cost shape does not match simulator");
  }
  QLearner learner(sim.horizon(), sim.num_states(), sim.num_actions());

  ObMfcComponents components;
  components.best_response = [&](double lambda1, int t) {
    CostFunction total(sim.horizon(), sim.num_states(), sim.num_actions(),
                       objective.upper_bound() + lambda1 * constraint.upper_bound());
    for (int h = 0; h <= sim.horizon(); ++h) {
      for (int s = 0; s < sim.num_states(); ++s) {
        for (int a = 0; a < sim.num_actions(); ++a) {
          total.at(h, s, a) = objective.at(h, s, a) + lambda1 * constraint.at(h, s, a);
        }
      }
    }
    QLearningOptions options = params.q_learning;
    if (t == 1 && params.first_call_episodes > 0) {
      options.episodes = params.first_call_episodes;
    }
    const uint64_t seed = derive_seed(params.seed, kTagBestResponse, t);
    if (params.warm_start) {
      // Warm calls refine tables that already fit a nearby multiplier, so
      // they stay near-greedy instead of re-annealing from fully random
      // behavior; the cold first call keeps the full schedule.
      if (t > 1) options.eps_start = options.eps_end;
      learner.train(sim, total, options, seed);
      return learner.greedy_policy();
    }
    return q_learning_best_response(sim, total, options, seed);
  };
  components.estimate = [&](const Policy& policy, int t) {
    return estimate_occupancy(sim, policy, params.rollouts,
                              derive_seed(params.seed, kTagOccupancy, t));
  };
  return run_ob_mfc(objective, constraint, threshold, params, components);
}

double primal_dual_gap(const CmdpProblem& problem, const OccupancyMeasure& avg_occ,
                       double avg_lambda1, double budget) {
  const double c = cost_of_occupancy(avg_occ, problem.objective);
  const double d = cost_of_occupancy(avg_occ, problem.constraint);
  const double primal =
      c + std::max(budget * (d - problem.threshold), 0.0);
  const double dual = lagrangian_best_response(problem, avg_lambda1).lagrangian;
  return primal - dual;
}

}  // namespace stlplan
