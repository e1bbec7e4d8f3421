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

// Exact solver for one-constraint problems by maximizing the Lagrangian
// dual. The dual function g(lambda) = min over policies of
// C + lambda (D - l) is a concave piecewise-linear function whose pieces
// are supporting lines of individual deterministic policies, so the
// maximum sits at the crossing of a line with constraint cost above the
// threshold and one below it. The solver brackets that crossing, refines
// it by intersecting the two support lines, and returns the mixture of the
// two bracket policies whose constraint cost lands exactly on the
// threshold. By strong duality that mixture attains the optimum.

#pragma once

#include <utility>
#include <vector>

#include "stlplan/mdp.hpp"
#include "stlplan/mdp_algorithms.hpp"

namespace stlplan {

// Minimizer of C(q) + lambda (D(q) - l) over policies: backward induction
// on the cost objective + lambda * constraint.
struct BestResponse {
  Policy policy;
  OccupancyMeasure occupancy;
  double objective_cost;   // C of the policy
  double constraint_cost;  // D of the policy
  double lagrangian;       // C + lambda (D - l)
};

BestResponse lagrangian_best_response(const CmdpProblem& problem, double lambda);

struct DualSolverOptions {
  // Relative slack for deciding that a probed multiplier already attains
  // the wedge of the two bracket lines, i.e. that it is the dual argmax.
  double kink_tol = 1e-10;
  // Accept the current bracket once it is narrower than this (relative).
  double lambda_tol = 1e-12;
  // Starting upper bracket for the multiplier; doubled until the best
  // response becomes feasible. 0 picks a bound from the cost scale.
  double lambda_max = 0.0;
  int max_best_responses = 300;
};

struct DualSolution {
  double lambda_star = 0.0;
  double optimal_value = 0.0;     // objective cost of the mixed policy
  double constraint_value = 0.0;  // constraint cost of the mixed policy
  OccupancyMeasure occupancy;     // occupancy of the mixture
  Policy policy;                  // mixture collapsed to one stochastic policy
  // At most two deterministic policies with convex weights; the second
  // entry is absent when a single policy is already optimal.
  std::vector<std::pair<Policy, double>> mixture;
  int best_response_calls = 0;
};

// Requires problem.direction == LessEqual. Throws InfeasibleError when even
// the constraint-minimizing policy exceeds the threshold, ToleranceError if
// the bracket cannot be refined within the call budget.
DualSolution solve_dual(const CmdpProblem& problem, const DualSolverOptions& options = {});

}  // namespace stlplan
