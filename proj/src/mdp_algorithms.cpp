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

#include "stlplan/mdp_algorithms.hpp"

#include <string>

namespace stlplan {

namespace {

void check_policy_shape(const FiniteHorizonMdp& mdp, const Policy& policy) {
  if (policy.horizon() != mdp.horizon() || policy.num_states() != mdp.num_states() ||
      policy.num_actions() != mdp.num_actions()) {
    throw ShapeError("policy shape does not match MDP");
  }
}

void check_cost_shape(const FiniteHorizonMdp& mdp, const CostFunction& cost) {
  if (cost.horizon() != mdp.horizon() || cost.num_states() != mdp.num_states() ||
      cost.num_actions() != mdp.num_actions()) {
    throw ShapeError("cost shape does not match MDP");
  }
}

// Incoming edges of one stage, grouped by successor state. Lists keep the
// (state, action) scan order, so gather sums are order-stable.
struct StageTranspose {
  std::vector<int> offsets;  // size num_states + 1
  struct Edge {
    int state;
    int action;
    double prob;
  };
  std::vector<Edge> edges;
};

StageTranspose transpose_stage(const FiniteHorizonMdp& mdp, int stage) {
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  StageTranspose t;
  t.offsets.assign(S + 1, 0);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (const auto& o : mdp.row(stage, s, a)) ++t.offsets[o.state + 1];
    }
  }
  for (int s = 0; s < S; ++s) t.offsets[s + 1] += t.offsets[s];
  t.edges.resize(t.offsets.back());
  std::vector<int> fill(t.offsets.begin(), t.offsets.end() - 1);
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      for (const auto& o : mdp.row(stage, s, a)) {
        t.edges[fill[o.state]++] = {s, a, o.prob};
      }
    }
  }
  return t;
}

}  // namespace

double value_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy,
                       const CostFunction& cost) {
  check_policy_shape(mdp, policy);
  check_cost_shape(mdp, cost);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<double> next(S, 0.0), value(S, 0.0);
  for (int h = mdp.horizon(); h >= 0; --h) {
#pragma omp parallel for schedule(static)
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        const double pi = policy.prob(h, s, a);
        if (pi == 0.0) continue;
        double q = cost.at(h, s, a);
        if (h < mdp.horizon()) {
          for (const auto& o : mdp.row(h, s, a)) q += o.prob * next[o.state];
        }
        v += pi * q;
      }
      value[s] = v;
    }
    std::swap(next, value);
  }
  return next[mdp.initial_state()];
}

std::pair<Policy, double> optimal_policy_dp(const FiniteHorizonMdp& mdp,
                                            const CostFunction& cost) {
  check_cost_shape(mdp, cost);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  Policy policy(mdp.horizon(), S, A);
  std::vector<double> next(S, 0.0), value(S, 0.0);
  for (int h = mdp.horizon(); h >= 0; --h) {
#pragma omp parallel for schedule(static)
    for (int s = 0; s < S; ++s) {
      double best = 0.0;
      int best_action = -1;
      for (int a = 0; a < A; ++a) {
        double q = cost.at(h, s, a);
        if (h < mdp.horizon()) {
          for (const auto& o : mdp.row(h, s, a)) q += o.prob * next[o.state];
        }
        if (best_action < 0 || q < best) {
          best = q;
          best_action = a;
        }
      }
      value[s] = best;
      policy.set_deterministic(h, s, best_action);
    }
    std::swap(next, value);
  }
  return {std::move(policy), next[mdp.initial_state()]};
}

OccupancyMeasure occupancy_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy) {
  check_policy_shape(mdp, policy);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  OccupancyMeasure occ(H, S, A);
  std::vector<double> mu(S, 0.0), mu_next(S, 0.0);
  mu[mdp.initial_state()] = 1.0;
  for (int h = 0; h <= H; ++h) {
#pragma omp parallel for schedule(static)
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) occ.at(h, s, a) = mu[s] * policy.prob(h, s, a);
    }
    if (h == H) break;
    const StageTranspose t = transpose_stage(mdp, h);
#pragma omp parallel for schedule(static)
    for (int sp = 0; sp < S; ++sp) {
      double m = 0.0;
      for (int e = t.offsets[sp]; e < t.offsets[sp + 1]; ++e) {
        const auto& edge = t.edges[e];
        m += occ.at(h, edge.state, edge.action) * edge.prob;
      }
      mu_next[sp] = m;
    }
    std::swap(mu, mu_next);
  }
  return occ;
}

Policy policy_from_occupancy(const OccupancyMeasure& occupancy) {
  const int S = occupancy.num_states();
  const int A = occupancy.num_actions();
  Policy policy(occupancy.horizon(), S, A);
  for (int h = 0; h <= occupancy.horizon(); ++h) {
    for (int s = 0; s < S; ++s) {
      double mass = 0.0;
      for (int a = 0; a < A; ++a) {
        const double q = occupancy.at(h, s, a);
        if (q < -1e-9) throw DomainError("occupancy entry is negative");
        mass += q < 0.0 ? 0.0 : q;
      }
      if (mass == 0.0) {
        for (int a = 0; a < A; ++a) policy.prob(h, s, a) = 1.0 / A;
      } else {
        for (int a = 0; a < A; ++a) {
          const double q = occupancy.at(h, s, a);
          policy.prob(h, s, a) = (q < 0.0 ? 0.0 : q) / mass;
        }
      }
    }
  }
  return policy;
}

double cost_of_occupancy(const OccupancyMeasure& occupancy, const CostFunction& cost) {
  if (cost.horizon() != occupancy.horizon() ||
      cost.num_states() != occupancy.num_states() ||
      cost.num_actions() != occupancy.num_actions()) {
    throw ShapeError("cost shape does not match occupancy");
  }
  double total = 0.0;
  for (int h = 0; h <= occupancy.horizon(); ++h) {
    for (int s = 0; s < occupancy.num_states(); ++s) {
      for (int a = 0; a < occupancy.num_actions(); ++a) {
        total += occupancy.at(h, s, a) * cost.at(h, s, a);
      }
    }
  }
  return total;
}

namespace serial {

double value_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy,
                       const CostFunction& cost) {
  check_policy_shape(mdp, policy);
  check_cost_shape(mdp, cost);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  std::vector<double> next(S, 0.0), value(S, 0.0);
  for (int h = mdp.horizon(); h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double v = 0.0;
      for (int a = 0; a < A; ++a) {
        double q = cost.at(h, s, a);
        if (h < mdp.horizon()) {
          for (const auto& o : mdp.row(h, s, a)) q += o.prob * next[o.state];
        }
        v += policy.prob(h, s, a) * q;
      }
      value[s] = v;
    }
    std::swap(next, value);
  }
  return next[mdp.initial_state()];
}

std::pair<Policy, double> optimal_policy_dp(const FiniteHorizonMdp& mdp,
                                            const CostFunction& cost) {
  check_cost_shape(mdp, cost);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  Policy policy(mdp.horizon(), S, A);
  std::vector<double> next(S, 0.0), value(S, 0.0);
  for (int h = mdp.horizon(); h >= 0; --h) {
    for (int s = 0; s < S; ++s) {
      double best = 0.0;
      int best_action = -1;
      for (int a = 0; a < A; ++a) {
        double q = cost.at(h, s, a);
        if (h < mdp.horizon()) {
          for (const auto& o : mdp.row(h, s, a)) q += o.prob * next[o.state];
        }
        if (best_action < 0 || q < best) {
          best = q;
          best_action = a;
        }
      }
      value[s] = best;
      policy.set_deterministic(h, s, best_action);
    }
    std::swap(next, value);
  }
  return {std::move(policy), next[mdp.initial_state()]};
}

OccupancyMeasure occupancy_of_policy(const FiniteHorizonMdp& mdp, const Policy& policy) {
  check_policy_shape(mdp, policy);
  const int S = mdp.num_states();
  const int A = mdp.num_actions();
  const int H = mdp.horizon();
  OccupancyMeasure occ(H, S, A);
  std::vector<double> mu(S, 0.0), mu_next(S, 0.0);
  mu[mdp.initial_state()] = 1.0;
  for (int h = 0; h <= H; ++h) {
    std::fill(mu_next.begin(), mu_next.end(), 0.0);
    for (int s = 0; s < S; ++s) {
      for (int a = 0; a < A; ++a) {
        const double q = mu[s] * policy.prob(h, s, a);
        occ.at(h, s, a) = q;
        if (h < H && q != 0.0) {
          for (const auto& o : mdp.row(h, s, a)) mu_next[o.state] += q * o.prob;
        }
      }
    }
    std::swap(mu, mu_next);
  }
  return occ;
}

}  // namespace serial

}  // namespace stlplan
