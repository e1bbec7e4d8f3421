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
#include <vector>

#include "stlplan/gridworld.hpp"
#include "stlplan/mdp_algorithms.hpp"
#include "stlplan/stl_formula.hpp"
#include "stlplan/stl_product.hpp"
#include "test_util.hpp"

using namespace stlplan;

TEST_CASE("inner flag update rules") {
  // Eventually: a hit restarts the countdown at window + 1 from any flag.
  for (int f = 0; f <= 3; ++f) {
    CHECK(update_inner_flag(f, true, TemporalKind::Eventually, 2) == 3);
  }
  CHECK(update_inner_flag(0, false, TemporalKind::Eventually, 2) == 0);
  CHECK(update_inner_flag(3, false, TemporalKind::Eventually, 2) == 2);
  // Always: a miss clears the run; hits extend it, saturating at window + 1.
  for (int f = 0; f <= 3; ++f) {
    CHECK(update_inner_flag(f, false, TemporalKind::Always, 2) == 0);
  }
  CHECK(update_inner_flag(0, true, TemporalKind::Always, 2) == 1);
  CHECK(update_inner_flag(2, true, TemporalKind::Always, 2) == 3);
  CHECK(update_inner_flag(3, true, TemporalKind::Always, 2) == 3);

  CHECK_THROWS_AS(update_inner_flag(4, true, TemporalKind::Eventually, 2), DomainError);
  CHECK_THROWS_AS(update_inner_flag(-1, false, TemporalKind::Always, 2), DomainError);
}

TEST_CASE("leaf verdicts from flags") {
  CHECK(sat_from_flag(1, TemporalKind::Eventually, 2));
  CHECK(sat_from_flag(3, TemporalKind::Eventually, 2));
  CHECK_FALSE(sat_from_flag(0, TemporalKind::Eventually, 2));
  CHECK(sat_from_flag(2, TemporalKind::Always, 1));
  CHECK_FALSE(sat_from_flag(1, TemporalKind::Always, 1));
}

TEST_CASE("combining leaf verdicts through the inner tree") {
  const auto p = PropFormula::make_true();
  const auto leaf = [&](TemporalKind k) { return InnerFormula::make_leaf(k, 1, p); };
  const auto conj =
      InnerFormula::make_and(leaf(TemporalKind::Eventually), leaf(TemporalKind::Always));
  const auto disj =
      InnerFormula::make_or(leaf(TemporalKind::Eventually), leaf(TemporalKind::Always));
  const bool bits_10[] = {true, false};
  CHECK_FALSE(combine_sat(*conj, bits_10));
  CHECK(combine_sat(*disj, bits_10));
  const bool bits_1[] = {true};
  CHECK(combine_sat(*leaf(TemporalKind::Eventually), bits_1));
  CHECK_THROWS_AS(combine_sat(*conj, bits_1), ShapeError);
  const bool bits_3[] = {true, false, true};
  CHECK_THROWS_AS(combine_sat(*conj, bits_3), ShapeError);
}

TEST_CASE("final flag update rules") {
  // Before the first inner window completes, the verdict stays pending.
  CHECK(update_final_flag(FinalFlag::Pending, true, 0, 2, TemporalKind::Always) ==
        FinalFlag::Pending);
  CHECK(update_final_flag(FinalFlag::Pending, false, 1, 2, TemporalKind::Always) ==
        FinalFlag::Pending);
  // First verdict lands at t = window.
  CHECK(update_final_flag(FinalFlag::Pending, true, 2, 2, TemporalKind::Always) ==
        FinalFlag::Yes);
  CHECK(update_final_flag(FinalFlag::Pending, false, 2, 2, TemporalKind::Eventually) ==
        FinalFlag::No);
  // Later verdicts fold: min for an outer G, max for an outer F.
  CHECK(update_final_flag(FinalFlag::Yes, false, 3, 2, TemporalKind::Always) ==
        FinalFlag::No);
  CHECK(update_final_flag(FinalFlag::No, true, 3, 2, TemporalKind::Always) ==
        FinalFlag::No);
  CHECK(update_final_flag(FinalFlag::No, true, 3, 2, TemporalKind::Eventually) ==
        FinalFlag::Yes);
  CHECK(update_final_flag(FinalFlag::Yes, false, 3, 2, TemporalKind::Eventually) ==
        FinalFlag::Yes);
  // A decided flag cannot appear while the verdict is still pending, and a
  // pending flag cannot survive past the first verdict.
  CHECK_THROWS_AS(update_final_flag(FinalFlag::Yes, true, 1, 2, TemporalKind::Always),
                  DomainError);
  CHECK_THROWS_AS(update_final_flag(FinalFlag::Pending, true, 3, 2, TemporalKind::Always),
                  DomainError);
}

TEST_CASE("codec is a bijection over the full rectangle") {
  const ProductCodec codec(5, 2, 4);
  CHECK(codec.num_product_states() == 5 * 4 * 4 * 3);
  std::vector<int> flags(2);
  std::vector<bool> seen(codec.num_product_states(), false);
  for (int s = 0; s < 5; ++s) {
    for (int f0 = 0; f0 < 4; ++f0) {
      for (int f1 = 0; f1 < 4; ++f1) {
        for (int fin = 0; fin < 3; ++fin) {
          flags[0] = f0;
          flags[1] = f1;
          const int idx = codec.encode(s, flags, static_cast<FinalFlag>(fin));
          REQUIRE(idx >= 0);
          REQUIRE(idx < codec.num_product_states());
          CHECK_FALSE(seen[idx]);
          seen[idx] = true;
          int s2 = -1;
          FinalFlag fin2 = FinalFlag::Pending;
          std::vector<int> flags2(2);
          codec.decode(idx, s2, flags2, fin2);
          CHECK(s2 == s);
          CHECK(flags2[0] == f0);
          CHECK(flags2[1] == f1);
          CHECK(fin2 == static_cast<FinalFlag>(fin));
          CHECK(codec.base_state_of(idx) == s);
          CHECK(codec.final_flag_of(idx) == static_cast<FinalFlag>(fin));
        }
      }
    }
  }
  CHECK_THROWS_AS(codec.encode(5, flags, FinalFlag::No), ShapeError);
  CHECK_THROWS_AS(codec.encode(0, std::vector<int>{1}, FinalFlag::No), ShapeError);
  flags = {4, 0};
  CHECK_THROWS_AS(codec.encode(0, flags, FinalFlag::No), DomainError);
}

TEST_CASE("product sizes of the two benchmark tasks") {
  const std::vector<std::string> names = grid_dimension_names();
  {
    GridSpec spec;  // 6x6 default
    const StlFormula f = parse_formula("F[0,7] G[0,1] (x > 4 & y > 4)", names);
    const FiniteHorizonMdp base = build_grid_mdp(spec, horizon(f) + 1);
    const auto aug = build_augmented_mdp(base, grid_cost_function(spec, horizon(f) + 1), f);
    CHECK(aug.product->num_states() == 324);
    CHECK(aug.product->horizon() == 9);
  }
  {
    GridSpec spec;
    spec.width = 4;
    spec.height = 4;
    spec.start_col = 1;
    spec.start_row = 1;
    const StlFormula f = parse_formula(
        "G[0,12] (F[0,2] (x > 1 & x < 2 & y > 3 & y < 4) & "
        "F[0,2] (x > 2 & x < 3 & y > 2 & y < 3))",
        names);
    const FiniteHorizonMdp base = build_grid_mdp(spec, horizon(f) + 1);
    const auto aug = build_augmented_mdp(base, grid_cost_function(spec, horizon(f) + 1), f);
    CHECK(aug.product->num_states() == 768);
    CHECK(aug.product->horizon() == 15);
  }
}

TEST_CASE("build preconditions") {
  RngStream rng(derive_seed(211, 0));
  const StlFormula f = testutil::random_formula(rng, 2, 2, 1, 1);
  const int H = horizon(f) + 1;
  {
    FiniteHorizonMdp bare = testutil::random_mdp(rng, 2, 2, H, /*embedding_dims=*/0);
    const CostFunction cost = testutil::random_cost(rng, bare);
    CHECK_THROWS_AS(build_augmented_mdp(bare, cost, f), ShapeError);
  }
  {
    FiniteHorizonMdp off = testutil::random_mdp(rng, 2, 2, H + 1, 2);
    const CostFunction cost = testutil::random_cost(rng, off);
    CHECK_THROWS_AS(build_augmented_mdp(off, cost, f), HorizonMismatchError);
  }
}

TEST_CASE("satisfaction problem normalization") {
  RngStream rng(derive_seed(223, 0));
  const StlFormula f = testutil::random_formula(rng, 2, 2, 1, 1);
  const int H = horizon(f) + 1;
  const FiniteHorizonMdp base = testutil::random_mdp(rng, 3, 2, H, 2);
  const CostFunction cost = testutil::random_cost(rng, base);
  const auto aug = build_augmented_mdp(base, cost, f);
  const CmdpProblem problem = make_satisfaction_cmdp(aug, 0.7);
  CHECK(problem.threshold == doctest::Approx(0.3));
  CHECK(problem.direction == ConstraintDirection::LessEqual);
  // Miss indicator and satisfaction indicator: on every product state the
  // final-stage costs are complementary.
  const int P = aug.product->num_states();
  for (int x = 0; x < P; ++x) {
    const double miss = problem.constraint.at(H, x, 0);
    const double hit = aug.reach.at(H, x, 0);
    CHECK(miss + hit == doctest::Approx(1.0));
    CHECK(miss == ((aug.codec.final_flag_of(x) == FinalFlag::Yes) ? 0.0 : 1.0));
  }
  for (int h = 0; h < H; ++h) {
    for (int x = 0; x < P; ++x) {
      CHECK(problem.constraint.at(h, x, 0) == 0.0);
    }
  }
  CHECK_THROWS_AS(make_satisfaction_cmdp(aug, -0.1), DomainError);
  CHECK_THROWS_AS(make_satisfaction_cmdp(aug, 1.1), DomainError);
}

TEST_CASE("product rows stay as sparse as the base rows") {
  RngStream rng(derive_seed(227, 0));
  for (int i = 0; i < 10; ++i) {
    const StlFormula f = testutil::random_formula(rng, 2, 2, 2, 1);
    const int H = horizon(f) + 1;
    const FiniteHorizonMdp base = testutil::random_mdp(rng, 3, 2, H, 2);
    const CostFunction cost = testutil::random_cost(rng, base);
    const auto aug = build_augmented_mdp(base, cost, f);
    for (int h = 0; h <= H; ++h) {
      for (int x = 0; x < aug.product->num_states(); ++x) {
        for (int a = 0; a < 2; ++a) {
          const auto base_row = base.row(h, aug.codec.base_state_of(x), a);
          CHECK(aug.product->row(h, x, a).size() <= base_row.size());
        }
      }
    }
  }
}

namespace {

// Signal of the first horizon+1 base embeddings along a product trajectory.
Signal signal_of_product_path(const AugmentedMdp& aug, const std::vector<int>& states,
                              int points) {
  Signal s;
  for (int t = 0; t < points; ++t) {
    const auto e = aug.product->embedding(states[t]);
    s.points.emplace_back(e.begin(), e.end());
  }
  return s;
}

}  // namespace

TEST_CASE("per-path equivalence: final flag tracks the monitor verdict") {
  RngStream rng(derive_seed(229, 0));
  int paths_checked = 0;
  for (int i = 0; i < 50; ++i) {
    const StlFormula f = testutil::random_formula(rng, 2, 2, 2, 1);
    const int H = horizon(f) + 1;
    const FiniteHorizonMdp base = testutil::random_mdp(rng, 3, 2, H, 2);
    const CostFunction cost = testutil::random_cost(rng, base);
    const auto aug = build_augmented_mdp(base, cost, f);
    // A policy that reads the flags is fine: equivalence is per path.
    const Policy policy = testutil::random_policy(rng, *aug.product);
    testutil::enumerate_paths(*aug.product, policy, [&](const testutil::PathVisit& path) {
      const Signal sig = signal_of_product_path(aug, path.states, horizon(f) + 1);
      const bool by_flag = aug.codec.final_flag_of(path.states.back()) == FinalFlag::Yes;
      const bool by_monitor = testutil::oracle_monitor(f, sig);
      CHECK(by_flag == by_monitor);
      // Flag-domain invariant along the way: the verdict is pending exactly
      // until the first inner window has elapsed.
      bool pending_timing_ok = true;
      for (int t = 0; t < static_cast<int>(path.states.size()); ++t) {
        const bool pending =
            aug.codec.final_flag_of(path.states[t]) == FinalFlag::Pending;
        pending_timing_ok = pending_timing_ok && (pending == (t <= f.inner_window));
      }
      CHECK(pending_timing_ok);
      ++paths_checked;
    });
  }
  CHECK(paths_checked > 1000);
}

TEST_CASE("reachability equivalence on 200 random instances") {
  RngStream rng(derive_seed(233, 0));
  for (int i = 0; i < 200; ++i) {
    const StlFormula f = testutil::random_formula(rng, 2, 2, 2, 1);
    const int H = horizon(f) + 1;  // H <= 5 by generator bounds
    const int S = 2 + rng.uniform_int(2);
    const FiniteHorizonMdp base = testutil::random_mdp(rng, S, 2, H, 2);
    const CostFunction cost = testutil::random_cost(rng, base);
    const auto aug = build_augmented_mdp(base, cost, f);

    const Policy base_policy = testutil::random_policy(rng, base);
    const Policy lifted = lift_policy(aug.codec, base_policy);

    // Probability of satisfying the formula, from the base chain.
    double pr_monitor = 0.0;
    testutil::enumerate_paths(base, base_policy, [&](const testutil::PathVisit& path) {
      Signal sig;
      for (int t = 0; t <= horizon(f); ++t) {
        const auto e = base.embedding(path.states[t]);
        sig.points.emplace_back(e.begin(), e.end());
      }
      if (testutil::oracle_monitor(f, sig)) pr_monitor += path.prob;
    });

    // Probability of ending with a Yes flag, from the product chain.
    double pr_flag = 0.0;
    testutil::enumerate_paths(*aug.product, lifted, [&](const testutil::PathVisit& path) {
      if (aug.codec.final_flag_of(path.states.back()) == FinalFlag::Yes) {
        pr_flag += path.prob;
      }
    });

    CHECK(std::abs(pr_flag - pr_monitor) < 1e-12);

    // The reach cost charges exactly that event at the last stage.
    CHECK(std::abs(value_of_policy(*aug.product, lifted, aug.reach) - pr_monitor) <
          1e-12);
  }
}

TEST_CASE("lifted objective preserves base values") {
  RngStream rng(derive_seed(239, 0));
  for (int i = 0; i < 30; ++i) {
    const StlFormula f = testutil::random_formula(rng, 2, 2, 2, 1);
    const int H = horizon(f) + 1;
    const FiniteHorizonMdp base = testutil::random_mdp(rng, 3, 2, H, 2);
    const CostFunction cost = testutil::random_cost(rng, base);
    const auto aug = build_augmented_mdp(base, cost, f);
    const Policy base_policy = testutil::random_policy(rng, base);
    const Policy lifted = lift_policy(aug.codec, base_policy);
    CHECK(value_of_policy(*aug.product, lifted, aug.objective) ==
          doctest::Approx(value_of_policy(base, base_policy, cost)).epsilon(1e-10));
  }
}
