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

#include "stlplan/dual_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stlplan {

namespace {

void check_problem(const CmdpProblem& problem) {
  if (!problem.mdp) throw ShapeError("constrained problem has no MDP");
  if (problem.direction != ConstraintDirection::LessEqual) {
    throw DomainError("solver expects the constraint in <= form");
  }
}

CostFunction scalarize(const CmdpProblem& problem, double lambda) {
  const auto& c = problem.objective;
  const auto& d = problem.constraint;
  CostFunction total(c.horizon(), c.num_states(), c.num_actions(),
                     c.upper_bound() + lambda * d.upper_bound());
  for (int h = 0; h <= c.horizon(); ++h) {
    for (int s = 0; s < c.num_states(); ++s) {
      for (int a = 0; a < c.num_actions(); ++a) {
        total.at(h, s, a) = c.at(h, s, a) + lambda * d.at(h, s, a);
      }
    }
  }
  return total;
}

}  // namespace

BestResponse lagrangian_best_response(const CmdpProblem& problem, double lambda) {
  check_problem(problem);
  if (lambda < 0.0) throw DomainError("multiplier must be nonnegative");
  auto [policy, value] = optimal_policy_dp(*problem.mdp, scalarize(problem, lambda));
  (void)value;
  OccupancyMeasure occ = occupancy_of_policy(*problem.mdp, policy);
  const double c = cost_of_occupancy(occ, problem.objective);
  const double d = cost_of_occupancy(occ, problem.constraint);
  return BestResponse{std::move(policy), std::move(occ), c, d,
                      c + lambda * (d - problem.threshold)};
}

DualSolution solve_dual(const CmdpProblem& problem, const DualSolverOptions& options) {
  check_problem(problem);
  const double l = problem.threshold;
  int calls = 0;
  auto respond = [&](double lambda) {
    ++calls;
    return lagrangian_best_response(problem, lambda);
  };

  auto pure_solution = [&](double lambda, BestResponse&& br) {
    DualSolution sol{lambda,
                     br.objective_cost,
                     br.constraint_cost,
                     std::move(br.occupancy),
                     std::move(br.policy),
                     {},
                     calls};
    sol.mixture.emplace_back(sol.policy, 1.0);
    return sol;
  };

  // Unconstrained optimum; if it already meets the threshold it is optimal.
  BestResponse lo = respond(0.0);
  if (lo.constraint_cost <= l) return pure_solution(0.0, std::move(lo));
  double lambda_lo = 0.0;

  // The best response at huge multipliers approaches the minimum achievable
  // constraint cost, so feasibility is decided by one more sweep.
  {
    auto [min_policy, min_d] = optimal_policy_dp(*problem.mdp, problem.constraint);
    (void)min_policy;
    if (min_d > l) {
      throw InfeasibleError("minimum constraint cost " + std::to_string(min_d) +
                            " exceeds threshold " + std::to_string(l));
    }
  }

  const double scale =
      (problem.objective.upper_bound() + 1.0) * (problem.mdp->horizon() + 1);
  double lambda_hi = options.lambda_max > 0.0 ? options.lambda_max : 10.0 * scale;
  BestResponse hi = respond(lambda_hi);
  while (hi.constraint_cost > l) {
    if (calls >= options.max_best_responses || lambda_hi > 1e15) {
      // Constraint-cost plateaus this flat mean the minimum sits exactly on
      // the threshold up to rounding; treat the last probe as the boundary.
      if (hi.constraint_cost <= l + 1e-12) break;
      throw ToleranceError("no feasible best response up to multiplier " +
                           std::to_string(lambda_hi));
    }
    lambda_lo = lambda_hi;
    lo = hi;
    lambda_hi *= 2.0;
    hi = respond(lambda_hi);
  }
  if (hi.constraint_cost == l) return pure_solution(lambda_hi, std::move(hi));

  // Invariant: lo is infeasible (D > l), hi feasible (D <= l). Their support
  // lines C + lambda (D - l) cross at the candidate dual maximum.
  double lambda_star = 0.5 * (lambda_lo + lambda_hi);
  while (calls < options.max_best_responses) {
    if (lambda_hi - lambda_lo <= options.lambda_tol * std::max(1.0, lambda_hi)) {
      lambda_star = 0.5 * (lambda_lo + lambda_hi);
      break;
    }
    double lambda_x = (hi.objective_cost - lo.objective_cost) /
                      (lo.constraint_cost - hi.constraint_cost);
    if (!(lambda_x > lambda_lo && lambda_x < lambda_hi)) {
      lambda_x = 0.5 * (lambda_lo + lambda_hi);  // rounding pushed it out
    }
    BestResponse probe = respond(lambda_x);
    if (probe.constraint_cost == l) return pure_solution(lambda_x, std::move(probe));
    const double wedge =
        std::min(lo.objective_cost + lambda_x * (lo.constraint_cost - l),
                 hi.objective_cost + lambda_x * (hi.constraint_cost - l));
    if (probe.lagrangian >= wedge - options.kink_tol * std::max(1.0, std::abs(wedge))) {
      // No support line passes below the wedge: both bracket lines are
      // active at lambda_x, so it maximizes the dual.
      lambda_star = lambda_x;
      break;
    }
    if (probe.constraint_cost > l) {
      lambda_lo = lambda_x;
      lo = std::move(probe);
    } else {
      lambda_hi = lambda_x;
      hi = std::move(probe);
    }
    lambda_star = 0.5 * (lambda_lo + lambda_hi);
  }
  if (calls >= options.max_best_responses &&
      lambda_hi - lambda_lo > options.lambda_tol * std::max(1.0, lambda_hi)) {
    throw ToleranceError("dual bracket not resolved within " +
                         std::to_string(options.max_best_responses) +
                         " best responses");
  }

  // Mix the bracket policies so the constraint lands exactly on l. Both are
  // best responses at lambda_star, so the mixture is optimal among feasible
  // policies by strong duality.
  const double w =
      (l - hi.constraint_cost) / (lo.constraint_cost - hi.constraint_cost);
  OccupancyMeasure occ = lo.occupancy;
  occ.scale(w);
  occ.add_scaled(hi.occupancy, 1.0 - w);
  DualSolution sol{lambda_star,
                   w * lo.objective_cost + (1.0 - w) * hi.objective_cost,
                   w * lo.constraint_cost + (1.0 - w) * hi.constraint_cost,
                   std::move(occ),
                   Policy(0, 1, 1),
                   {},
                   calls};
  sol.policy = policy_from_occupancy(sol.occupancy);
  sol.mixture.emplace_back(std::move(lo.policy), w);
  sol.mixture.emplace_back(std::move(hi.policy), 1.0 - w);
  return sol;
}

}  // namespace stlplan
