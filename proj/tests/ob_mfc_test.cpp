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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <memory>
#include <vector>

#include "stlplan/dual_solver.hpp"
#include "stlplan/gridworld.hpp"
#include "stlplan/ob_mfc.hpp"
#include "stlplan/stl_product.hpp"
#include "test_util.hpp"

using namespace stlplan;

namespace {

// One-state, two-action, single-stage problem: action 0 is free but always
// violates, action 1 costs 1 and never does. With threshold 0.4 the optimum
// mixes them 0.4/0.6 for value 0.6 at multiplier 1.
CmdpProblem bandit_cmdp() {
  auto mdp = std::make_shared<FiniteHorizonMdp>(1, 2, 0, 0);
  mdp->set_row(0, 0, 0, {{0, 1.0}});
  mdp->set_row(0, 0, 1, {{0, 1.0}});
  CostFunction objective(0, 1, 2, 1.0);
  objective.at(0, 0, 1) = 1.0;
  CostFunction constraint(0, 1, 2, 1.0);
  constraint.at(0, 0, 0) = 1.0;
  return {mdp, std::move(objective), std::move(constraint), 0.4,
          ConstraintDirection::LessEqual};
}

ObMfcComponents exact_components(const CmdpProblem& problem,
                                 std::vector<OccupancyMeasure>* log = nullptr) {
  ObMfcComponents components;
  components.best_response = [&problem](double lambda1, int) {
    return lagrangian_best_response(problem, lambda1).policy;
  };
  components.estimate = [&problem, log](const Policy& policy, int) {
    OccupancyMeasure occ = occupancy_of_policy(*problem.mdp, policy);
    if (log != nullptr) log->push_back(occ);
    return occ;
  };
  return components;
}

double lagrangian_of(const CmdpProblem& problem, const OccupancyMeasure& occ,
                     double lambda1) {
  return cost_of_occupancy(occ, problem.objective) +
         lambda1 * (cost_of_occupancy(occ, problem.constraint) - problem.threshold);
}

}  // namespace

TEST_CASE("exponentiated-gradient update") {
  const LagrangeState start{{1.0, 1.0}, 2.0};

  SUBCASE("zero gains leave the state unchanged") {
    const LagrangeState next = eg_update(start, {0.0, 0.0}, 0.7);
    CHECK(next.lambda[0] == doctest::Approx(1.0));
    CHECK(next.lambda[1] == doctest::Approx(1.0));
  }

  SUBCASE("hand-evaluated step") {
    // weights (1*e^{ln 2}, 1*e^0) = (2, 1), scaled to budget 2: (4/3, 2/3).
    const LagrangeState next = eg_update(start, {1.0, 0.0}, std::log(2.0));
    CHECK(next.lambda[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(next.lambda[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }

  SUBCASE("repeated positive gain drives the multiplier to the budget") {
    LagrangeState state = start;
    double prev = state.lambda[0];
    for (int i = 0; i < 200; ++i) {
      state = eg_update(state, {1.0, 0.0}, 0.25);
      // Non-strict: once converged the coordinate saturates at the budget.
      CHECK(state.lambda[0] >= prev);
      prev = state.lambda[0];
    }
    CHECK(state.lambda[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(state.lambda[0] > start.lambda[0]);
  }

  SUBCASE("simplex invariant survives random updates") {
    RngStream rng(derive_seed(401, 0));
    LagrangeState state{{3.0, 7.0}, 10.0};
    for (int i = 0; i < 500; ++i) {
      state = eg_update(state, {4.0 * rng.uniform() - 2.0, 0.0}, 0.1);
      CHECK(std::abs(state.lambda[0] + state.lambda[1] - 10.0) < 1e-9);
      CHECK(state.lambda[0] >= 0.0);
      CHECK(state.lambda[1] >= 0.0);
    }
  }

  SUBCASE("validation") {
    CHECK_THROWS_AS(eg_update({{1.0, 1.0}, 0.0}, {0.0, 0.0}, 0.1), DomainError);
    CHECK_THROWS_AS(eg_update({{-0.5, 2.5}, 2.0}, {0.0, 0.0}, 0.1), DomainError);
    CHECK_THROWS_AS(eg_update({{1.0, 0.5}, 2.0}, {0.0, 0.0}, 0.1), DomainError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(eg_update({{1.0, 1.0}, 2.0}, {inf, 0.0}, 0.1), NumericError);
    // Extreme but finite gains must not overflow thanks to max-subtraction.
    const LagrangeState big = eg_update({{1.0, 1.0}, 2.0}, {800.0, -800.0}, 1.0);
    CHECK(big.lambda[0] == doctest::Approx(2.0));
  }
}

TEST_CASE("q-learning on a single-action chain is exact in the limit") {
  auto mdp = std::make_shared<FiniteHorizonMdp>(2, 1, 2, 0);
  mdp->set_row_all_stages(0, 0, {{1, 1.0}});
  mdp->set_row_all_stages(1, 0, {{1, 1.0}});
  const MdpSimulator sim(mdp);
  CostFunction cost(2, 2, 1, 3.0);
  cost.at(0, 0, 0) = 1.0;
  cost.at(1, 1, 0) = 2.0;
  cost.at(2, 1, 0) = 3.0;
  QLearningOptions options;
  options.episodes = 2000;
  const Policy policy = q_learning_best_response(sim, cost, options, 7);
  CHECK(value_of_policy(*mdp, policy, cost) == doctest::Approx(6.0));
}

TEST_CASE("q-learning approaches the DP optimum on a tiny instance") {
  RngStream rng(derive_seed(409, 0));
  auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 2, 2, 2));
  const CostFunction cost = testutil::random_cost(rng, *mdp);
  const MdpSimulator sim(mdp);
  const auto [opt, value] = optimal_policy_dp(*mdp, cost);
  QLearningOptions options;
  options.episodes = 50000;
  const Policy policy = q_learning_best_response(sim, cost, options, 11);
  CHECK(value_of_policy(*mdp, policy, cost) == doctest::Approx(value).epsilon(0.01));
}

TEST_CASE("q-learning finds the free resting policy on the benchmark product") {
  GridSpec spec;
  const std::vector<std::string> names = grid_dimension_names();
  const StlFormula f = parse_formula("F[0,7] G[0,1] (x > 4 & y > 4)", names);
  const int H = horizon(f) + 1;
  const FiniteHorizonMdp base = build_grid_mdp(spec, H);
  const auto aug = build_augmented_mdp(base, grid_cost_function(spec, H), f);
  const MdpSimulator sim(aug.product);
  QLearningOptions options;
  options.episodes = 50000;
  const Policy policy = q_learning_best_response(sim, aug.objective, options, 13);
  CHECK(value_of_policy(*aug.product, policy, aug.objective) == doctest::Approx(0.0));
}

TEST_CASE("learner validation") {
  QLearner learner(1, 2, 2);
  auto mdp = std::make_shared<FiniteHorizonMdp>(2, 2, 2, 0);
  for (int s = 0; s < 2; ++s) {
    for (int a = 0; a < 2; ++a) mdp->set_row_all_stages(s, a, {{s, 1.0}});
  }
  const MdpSimulator sim(mdp);  // horizon 2, learner expects 1
  const CostFunction cost(1, 2, 2, 1.0);
  CHECK_THROWS_AS(learner.train(sim, cost, {}, 1), ShapeError);
}

TEST_CASE("dual play averages occupancies and multipliers") {
  const CmdpProblem problem = bandit_cmdp();
  std::vector<OccupancyMeasure> seen;
  ObMfcHyperparams params;
  params.iterations = 50;
  params.budget = 2.5;
  params.eta = 0.1;
  const ObMfcResult result = run_ob_mfc(problem.objective, problem.constraint,
                                        problem.threshold, params,
                                        exact_components(problem, &seen));

  REQUIRE(static_cast<int>(result.diagnostics.size()) == params.iterations);
  REQUIRE(static_cast<int>(seen.size()) == params.iterations);

  OccupancyMeasure mean(0, 1, 2);
  double d_mean = 0.0;
  double lambda_mean = 0.0;
  for (int t = 0; t < params.iterations; ++t) {
    CHECK(result.diagnostics[t].iteration == t + 1);
    mean.add_scaled(seen[t], 1.0 / params.iterations);
    d_mean += result.diagnostics[t].constraint_cost / params.iterations;
    lambda_mean += result.diagnostics[t].lambda1 / params.iterations;
  }
  CHECK(l1_distance(result.avg_occupancy, mean) < 1e-12);
  CHECK(std::abs(cost_of_occupancy(result.avg_occupancy, problem.constraint) - d_mean) <
        1e-12);
  CHECK(std::abs(result.avg_lambda1 - lambda_mean) < 1e-12);
  CHECK(std::abs(result.final_lambda.lambda[0] + result.final_lambda.lambda[1] -
                 params.budget) < 1e-9);
}

TEST_CASE("a vanishing budget reduces to the unconstrained best response") {
  const CmdpProblem problem = bandit_cmdp();
  ObMfcHyperparams params;
  params.iterations = 1;
  params.budget = 1e-12;
  params.eta = 0.1;
  const ObMfcResult result = run_ob_mfc(problem.objective, problem.constraint,
                                        problem.threshold, params,
                                        exact_components(problem));
  // Best response at lambda1 = B/2 ~ 0 picks the free violating action.
  CHECK(cost_of_occupancy(result.avg_occupancy, problem.objective) ==
        doctest::Approx(0.0));
  CHECK(result.policy.prob(0, 0, 0) == doctest::Approx(1.0));
}

TEST_CASE("hyperparameter validation") {
  const CmdpProblem problem = bandit_cmdp();
  ObMfcHyperparams params;
  params.iterations = 0;
  CHECK_THROWS_AS(run_ob_mfc(problem.objective, problem.constraint, problem.threshold,
                             params, exact_components(problem)),
                  DomainError);
  params.iterations = 1;
  params.budget = 0.0;
  CHECK_THROWS_AS(run_ob_mfc(problem.objective, problem.constraint, problem.threshold,
                             params, exact_components(problem)),
                  DomainError);
  params.budget = 1.0;
  CHECK_THROWS_AS(run_ob_mfc(problem.objective, problem.constraint, problem.threshold,
                             params, ObMfcComponents{}),
                  DomainError);
}

TEST_CASE("primal-dual gap falls below twice the average regret") {
  // Exact best responses and exact occupancies isolate the no-regret play.
  const int T = 2000;

  SUBCASE("bandit instance") {
    const CmdpProblem problem = bandit_cmdp();
    ObMfcHyperparams params;
    params.iterations = T;
    params.budget = 2.5;
    params.eta = 0.04;
    const ObMfcResult result = run_ob_mfc(problem.objective, problem.constraint,
                                          problem.threshold, params,
                                          exact_components(problem));
    const double gap = primal_dual_gap(problem, result.avg_occupancy,
                                       result.avg_lambda1, params.budget);
    CHECK(gap >= -1e-9);
    CHECK(gap <= 2.0 * result.regret_proxy / T + 1e-6);
    // Lemma-3 shape: the averaged play is near-optimal and near-feasible.
    const double c_avg = cost_of_occupancy(result.avg_occupancy, problem.objective);
    CHECK(std::abs(c_avg - 0.6) <= result.regret_proxy / T + 1e-6);
  }

  SUBCASE("random two-state instance") {
    RngStream rng(derive_seed(419, 0));
    auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 2, 2, 2));
    CostFunction objective = testutil::random_cost(rng, *mdp, 2.0);
    CostFunction constraint = testutil::random_cost(rng, *mdp, 1.0);
    double min_d = std::numeric_limits<double>::infinity();
    double max_d = -std::numeric_limits<double>::infinity();
    testutil::enumerate_deterministic_costs(*mdp, objective, constraint,
                                            [&](double, double d) {
                                              min_d = std::min(min_d, d);
                                              max_d = std::max(max_d, d);
                                            });
    const CmdpProblem problem{mdp, std::move(objective), std::move(constraint),
                              min_d + 0.35 * (max_d - min_d),
                              ConstraintDirection::LessEqual};
    const DualSolution exact = solve_dual(problem);
    ObMfcHyperparams params;
    params.iterations = T;
    params.budget = std::max(1.0, 2.5 * exact.lambda_star);
    params.eta = 0.04;
    const ObMfcResult result = run_ob_mfc(problem.objective, problem.constraint,
                                          problem.threshold, params,
                                          exact_components(problem));
    const double gap = primal_dual_gap(problem, result.avg_occupancy,
                                       result.avg_lambda1, params.budget);
    CHECK(gap >= -1e-9);
    CHECK(gap <= 2.0 * result.regret_proxy / T + 1e-6);
    const double c_avg = cost_of_occupancy(result.avg_occupancy, problem.objective);
    CHECK(std::abs(c_avg - exact.optimal_value) <= result.regret_proxy / T + 1e-6);
  }
}

TEST_CASE("perturbing an occupancy moves the lagrangian at most linearly") {
  RngStream rng(derive_seed(421, 0));
  const double budget = 3.0;
  for (int i = 0; i < 50; ++i) {
    auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, 3));
    const CostFunction objective = testutil::random_cost(rng, *mdp, 4.0);
    const CostFunction constraint = testutil::random_cost(rng, *mdp, 1.0);
    const CmdpProblem problem{mdp, objective, constraint, 0.4,
                              ConstraintDirection::LessEqual};
    const Policy policy = testutil::random_policy(rng, *mdp);
    const OccupancyMeasure q = occupancy_of_policy(*mdp, policy);

    // Move a little mass around inside each stage.
    OccupancyMeasure qhat = q;
    for (int h = 0; h <= 3; ++h) {
      const int s_from = rng.uniform_int(3);
      const int a_from = rng.uniform_int(2);
      const double delta = std::min(0.01 * rng.uniform(), qhat.at(h, s_from, a_from));
      qhat.at(h, s_from, a_from) -= delta;
      qhat.at(h, rng.uniform_int(3), rng.uniform_int(2)) += delta;
    }
    const double eps = l1_distance(q, qhat);
    const double lambda1 = budget * rng.uniform();
    const double lhs =
        std::abs(lagrangian_of(problem, qhat, lambda1) -
                 lagrangian_of(problem, q, lambda1));
    CHECK(lhs <= (objective.upper_bound() + budget * constraint.upper_bound()) * eps +
                     1e-12);
  }
}

TEST_CASE("extracted policies track perturbed occupancies") {
  RngStream rng(derive_seed(431, 0));
  for (int i = 0; i < 30; ++i) {
    const int H = 1 + rng.uniform_int(3);
    auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, H));
    const Policy policy = testutil::random_policy(rng, *mdp);
    const OccupancyMeasure q = occupancy_of_policy(*mdp, policy);

    OccupancyMeasure qtilde = q;
    for (int h = 0; h <= H; ++h) {
      const int s_from = rng.uniform_int(3);
      const int a_from = rng.uniform_int(2);
      const double delta = std::min(0.02 * rng.uniform(), qtilde.at(h, s_from, a_from));
      qtilde.at(h, s_from, a_from) -= delta;
      qtilde.at(h, rng.uniform_int(3), rng.uniform_int(2)) += delta;
    }
    const double eps = l1_distance(q, qtilde);

    const OccupancyMeasure realized =
        occupancy_of_policy(*mdp, policy_from_occupancy(qtilde));
    CHECK(l1_distance(realized, q) <= 2.0 * (H + 1) * eps + 1e-12);
  }
}

TEST_CASE("model-free runs are reproducible for a fixed seed") {
  RngStream rng(derive_seed(433, 0));
  auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, 3));
  const CostFunction objective = testutil::random_cost(rng, *mdp, 2.0);
  const CostFunction constraint = testutil::random_cost(rng, *mdp, 1.0);
  const MdpSimulator sim(mdp);
  ObMfcHyperparams params;
  params.iterations = 5;
  params.budget = 2.0;
  params.eta = 0.1;
  params.rollouts = 200;
  params.q_learning.episodes = 500;
  params.seed = 99;

  for (const bool warm : {false, true}) {
    params.warm_start = warm;
    params.first_call_episodes = warm ? 1000 : 0;
    const ObMfcResult a =
        run_ob_mfc_model_free(sim, objective, constraint, 0.4, params);
    const ObMfcResult b =
        run_ob_mfc_model_free(sim, objective, constraint, 0.4, params);
    CHECK(l1_distance(a.avg_occupancy, b.avg_occupancy) == 0.0);
    CHECK(a.avg_lambda1 == b.avg_lambda1);
    CHECK(a.regret_proxy == b.regret_proxy);
    for (int h = 0; h <= 3; ++h) {
      for (int s = 0; s < 3; ++s) {
        for (int act = 0; act < 2; ++act) {
          CHECK(a.policy.prob(h, s, act) == b.policy.prob(h, s, act));
        }
      }
    }
  }
}
