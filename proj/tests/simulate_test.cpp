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

#include "stlplan/gridworld.hpp"
#include "stlplan/mdp_algorithms.hpp"
#include "stlplan/simulate.hpp"
#include "test_util.hpp"

using namespace stlplan;

TEST_CASE("transition sampling is inverse transform in row order") {
  FiniteHorizonMdp mdp(3, 1, 0, 0);
  mdp.set_row(0, 0, 0, {{0, 0.2}, {1, 0.5}, {2, 0.3}});
  mdp.set_row(0, 1, 0, {{1, 1.0}});
  mdp.set_row(0, 2, 0, {{2, 1.0}});
  CHECK(sample_transition(mdp, 0, 0, 0, 0.0) == 0);
  CHECK(sample_transition(mdp, 0, 0, 0, 0.1999) == 0);
  CHECK(sample_transition(mdp, 0, 0, 0, 0.2001) == 1);
  CHECK(sample_transition(mdp, 0, 0, 0, 0.6999) == 1);
  CHECK(sample_transition(mdp, 0, 0, 0, 0.7001) == 2);
  CHECK(sample_transition(mdp, 0, 0, 0, 0.999999) == 2);
}

TEST_CASE("action sampling is inverse transform in action order") {
  Policy policy(0, 1, 3);
  policy.prob(0, 0, 0) = 0.2;
  policy.prob(0, 0, 1) = 0.6;
  policy.prob(0, 0, 2) = 0.2;
  CHECK(sample_action(policy, 0, 0, 0.0) == 0);
  CHECK(sample_action(policy, 0, 0, 0.1999) == 0);
  CHECK(sample_action(policy, 0, 0, 0.2001) == 1);
  CHECK(sample_action(policy, 0, 0, 0.7999) == 1);
  CHECK(sample_action(policy, 0, 0, 0.8001) == 2);
}

TEST_CASE("rollout shape and the deterministic single path") {
  auto mdp = std::make_shared<FiniteHorizonMdp>(2, 2, 3, 0);
  // Action 0 advances 0 -> 1 and then loops at 1; action 1 holds anywhere.
  mdp->set_row_all_stages(0, 0, {{1, 1.0}});
  mdp->set_row_all_stages(0, 1, {{0, 1.0}});
  mdp->set_row_all_stages(1, 0, {{1, 1.0}});
  mdp->set_row_all_stages(1, 1, {{1, 1.0}});
  const MdpSimulator sim(mdp);
  CHECK(sim.num_states() == 2);
  CHECK(sim.num_actions() == 2);
  CHECK(sim.horizon() == 3);
  CHECK(sim.initial_state() == 0);

  Policy policy(3, 2, 2);
  for (int h = 0; h <= 3; ++h) {
    policy.set_deterministic(h, 0, 0);
    policy.set_deterministic(h, 1, 0);
  }
  RngStream rng(derive_seed(5, 0));
  const Trajectory traj = rollout(sim, policy, rng);
  REQUIRE(traj.states.size() == 4);
  REQUIRE(traj.actions.size() == 4);
  CHECK(traj.states == std::vector<int>{0, 1, 1, 1});
  CHECK(traj.actions == std::vector<int>{0, 0, 0, 0});

  Policy wrong(2, 2, 2);
  RngStream rng2(derive_seed(5, 1));
  CHECK_THROWS_AS(rollout(sim, wrong, rng2), ShapeError);
}

TEST_CASE("occupancy estimate of a deterministic path is the indicator") {
  auto mdp = std::make_shared<FiniteHorizonMdp>(2, 2, 2, 0);
  mdp->set_row_all_stages(0, 0, {{1, 1.0}});
  mdp->set_row_all_stages(0, 1, {{0, 1.0}});
  mdp->set_row_all_stages(1, 0, {{1, 1.0}});
  mdp->set_row_all_stages(1, 1, {{1, 1.0}});
  const MdpSimulator sim(mdp);
  Policy policy(2, 2, 2);
  for (int h = 0; h <= 2; ++h) {
    policy.set_deterministic(h, 0, 0);
    policy.set_deterministic(h, 1, 0);
  }
  for (const int n : {1, 7, 100}) {
    const OccupancyMeasure occ = estimate_occupancy(sim, policy, n, 42);
    CHECK(occ.at(0, 0, 0) == 1.0);
    CHECK(occ.at(1, 1, 0) == 1.0);
    CHECK(occ.at(2, 1, 0) == 1.0);
    CHECK(occ.at(1, 0, 0) == 0.0);
  }
  CHECK_THROWS_AS(estimate_occupancy(sim, policy, 0, 42), DomainError);
}

TEST_CASE("single-rollout estimate is a stage-normalized indicator") {
  RngStream rng(derive_seed(31, 0));
  auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, 4));
  const MdpSimulator sim(mdp);
  const Policy policy = testutil::random_policy(rng, *mdp);
  const OccupancyMeasure occ = estimate_occupancy(sim, policy, 1, 9);
  for (int h = 0; h <= 4; ++h) {
    CHECK(occ.stage_sum(h) == 1.0);
    int nonzero = 0;
    for (int s = 0; s < 3; ++s) {
      for (int a = 0; a < 2; ++a) {
        if (occ.at(h, s, a) != 0.0) {
          CHECK(occ.at(h, s, a) == 1.0);
          ++nonzero;
        }
      }
    }
    CHECK(nonzero == 1);
  }
}

TEST_CASE("estimates are stage-normalized and reproducible") {
  RngStream rng(derive_seed(37, 0));
  auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, 3));
  const MdpSimulator sim(mdp);
  const Policy policy = testutil::random_policy(rng, *mdp);
  const OccupancyMeasure a = estimate_occupancy(sim, policy, 500, 77);
  const OccupancyMeasure b = estimate_occupancy(sim, policy, 500, 77);
  CHECK(l1_distance(a, b) == 0.0);
  for (int h = 0; h <= 3; ++h) CHECK(a.stage_sum(h) == 1.0);
  const OccupancyMeasure c = estimate_occupancy(sim, policy, 500, 78);
  CHECK(l1_distance(a, c) > 0.0);
}

TEST_CASE("large-sample estimate approaches the exact occupancy") {
  RngStream rng(derive_seed(41, 0));
  auto mdp = std::make_shared<FiniteHorizonMdp>(testutil::random_mdp(rng, 3, 2, 2));
  const MdpSimulator sim(mdp);
  const Policy policy = testutil::random_policy(rng, *mdp);
  const OccupancyMeasure exact = occupancy_of_policy(*mdp, policy);
  const OccupancyMeasure est = estimate_occupancy(sim, policy, 100000, 123);
  CHECK(l1_distance(est, exact) < 0.02);
}

TEST_CASE("empirical transition frequencies match the kernel row") {
  GridSpec spec;
  const FiniteHorizonMdp mdp = build_grid_mdp(spec, 1);
  const int s = grid_state(spec, 2, 2);
  std::vector<double> freq(mdp.num_states(), 0.0);
  RngStream rng(derive_seed(43, 0));
  const int draws = 1000000;
  for (int i = 0; i < draws; ++i) {
    freq[sample_transition(mdp, 0, s, kSouthEast, rng)] += 1.0;
  }
  std::vector<double> expect(mdp.num_states(), 0.0);
  for (const Outcome& o : mdp.row(0, s, kSouthEast)) expect[o.state] += o.prob;
  for (int t = 0; t < mdp.num_states(); ++t) {
    CHECK(std::abs(freq[t] / draws - expect[t]) < 0.003);
  }
}
