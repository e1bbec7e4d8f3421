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

// Finite-horizon MDPs with stage-indexed sparse transition rows, cost
// tables, stochastic time-varying policies, and occupancy measures. An
// episode visits stages 0..H inclusive, taking one action per stage; costs
// accrue at every stage including H.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stlplan/errors.hpp"

namespace stlplan {

// One entry of a sparse transition row.
struct Outcome {
  int state = 0;
  double prob = 0.0;
};

// Stage-indexed transition kernel plus an optional geometric embedding of
// states used by formula predicates. Rows are stored sparsely in insertion
// order; sampling walks a row in that order, so builders control the
// cumulative-distribution layout deterministically.
class FiniteHorizonMdp {
 public:
  FiniteHorizonMdp(int num_states, int num_actions, int horizon, int initial_state);

  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  int horizon() const { return horizon_; }
  int initial_state() const { return initial_state_; }

  // Replaces the row for (stage, state, action). Entries must name valid
  // states, have nonnegative probability, and sum to 1 within 1e-12.
  void set_row(int stage, int state, int action, std::vector<Outcome> outcomes);

  // Same row at every stage, for time-homogeneous dynamics.
  void set_row_all_stages(int state, int action, const std::vector<Outcome>& outcomes);

  std::span<const Outcome> row(int stage, int state, int action) const {
    return rows_[row_index(stage, state, action)];
  }

  void set_embedding(int state, std::vector<double> coords);
  std::span<const double> embedding(int state) const;
  int embedding_dimension() const { return embedding_dimension_; }
  bool has_embedding() const { return embedding_dimension_ > 0; }

  // Checks that every row is set and normalized. Builders call this once
  // after construction; algorithms may assume it holds.
  void validate() const;

 private:
  int row_index(int stage, int state, int action) const {
    if (stage < 0 || stage > horizon_ || state < 0 || state >= num_states_ ||
        action < 0 || action >= num_actions_) {
      throw ShapeError("transition row index out of range");
    }
    return (stage * num_states_ + state) * num_actions_ + action;
  }

  int num_states_;
  int num_actions_;
  int horizon_;
  int initial_state_;
  int embedding_dimension_ = 0;
  std::vector<std::vector<Outcome>> rows_;
  std::vector<std::vector<double>> embedding_;
};

// Stage-indexed cost table with a declared upper bound. Values must lie in
// [0, upper_bound].
class CostFunction {
 public:
  CostFunction(int horizon, int num_states, int num_actions, double upper_bound);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }
  double upper_bound() const { return upper_bound_; }

  double at(int stage, int state, int action) const {
    return values_[index(stage, state, action)];
  }
  double& at(int stage, int state, int action) {
    return values_[index(stage, state, action)];
  }

  void validate() const;

 private:
  int index(int stage, int state, int action) const {
    return (stage * num_states_ + state) * num_actions_ + action;
  }

  int horizon_;
  int num_states_;
  int num_actions_;
  double upper_bound_;
  std::vector<double> values_;
};

// Time-varying stochastic policy; rows over actions sum to 1.
class Policy {
 public:
  Policy(int horizon, int num_states, int num_actions);

  static Policy uniform(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double prob(int stage, int state, int action) const {
    return probs_[index(stage, state, action)];
  }
  double& prob(int stage, int state, int action) {
    return probs_[index(stage, state, action)];
  }

  // Puts all mass of (stage, state) on one action.
  void set_deterministic(int stage, int state, int action);

  void validate(double tol = 1e-9) const;

 private:
  int index(int stage, int state, int action) const {
    return (stage * num_states_ + state) * num_actions_ + action;
  }

  int horizon_;
  int num_states_;
  int num_actions_;
  std::vector<double> probs_;
};

// Expected visit mass per (stage, state, action) under a policy from the
// initial state. Each stage slice of a valid occupancy sums to 1.
class OccupancyMeasure {
 public:
  OccupancyMeasure(int horizon, int num_states, int num_actions);

  int horizon() const { return horizon_; }
  int num_states() const { return num_states_; }
  int num_actions() const { return num_actions_; }

  double at(int stage, int state, int action) const {
    return mass_[index(stage, state, action)];
  }
  double& at(int stage, int state, int action) {
    return mass_[index(stage, state, action)];
  }

  double stage_sum(int stage) const;

  // In-place entrywise update: this += weight * other.
  void add_scaled(const OccupancyMeasure& other, double weight);
  void scale(double factor);

 private:
  int index(int stage, int state, int action) const {
    return (stage * num_states_ + state) * num_actions_ + action;
  }

  int horizon_;
  int num_states_;
  int num_actions_;
  std::vector<double> mass_;
};

double l1_distance(const OccupancyMeasure& a, const OccupancyMeasure& b);

enum class ConstraintDirection { LessEqual, GreaterEqual };

// Constrained problem: minimize expected objective cost subject to the
// expected constraint cost lying on the given side of the threshold.
struct CmdpProblem {
  std::shared_ptr<const FiniteHorizonMdp> mdp;
  CostFunction objective;
  CostFunction constraint;
  double threshold = 0.0;
  ConstraintDirection direction = ConstraintDirection::LessEqual;
};

}  // namespace stlplan
