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

#include "stlplan/mdp.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace stlplan {

namespace {

constexpr double kRowSumTol = 1e-12;

void check_positive(int value, const char* name) {
  if (value <= 0) throw ShapeError(std::string(name) + " must be positive");
}

}  // namespace

FiniteHorizonMdp::FiniteHorizonMdp(int num_states, int num_actions, int horizon,
                                   int initial_state)
    : num_states_(num_states),
      num_actions_(num_actions),
      horizon_(horizon),
      initial_state_(initial_state) {
  check_positive(num_states, "num_states");
  check_positive(num_actions, "num_actions");
  if (horizon < 0) throw ShapeError("horizon must be nonnegative");
  if (initial_state < 0 || initial_state >= num_states) {
    throw ShapeError("initial state out of range");
  }
  rows_.resize(static_cast<size_t>(horizon + 1) * num_states * num_actions);
}

void FiniteHorizonMdp::set_row(int stage, int state, int action,
                               std::vector<Outcome> outcomes) {
  double sum = 0.0;
  for (const auto& o : outcomes) {
    if (o.state < 0 || o.state >= num_states_) {
      throw DomainError("transition outcome names an invalid state");
    }
    if (o.prob < 0.0) throw DomainError("transition probability must be nonnegative");
    sum += o.prob;
  }
  if (std::abs(sum - 1.0) > kRowSumTol) {
    throw DomainError("transition row must sum to 1, got " + std::to_string(sum));
  }
  rows_[row_index(stage, state, action)] = std::move(outcomes);
}

void FiniteHorizonMdp::set_row_all_stages(int state, int action,
                                          const std::vector<Outcome>& outcomes) {
  for (int h = 0; h <= horizon_; ++h) set_row(h, state, action, outcomes);
}

void FiniteHorizonMdp::set_embedding(int state, std::vector<double> coords) {
  if (state < 0 || state >= num_states_) throw ShapeError("embedding state out of range");
  if (embedding_.empty()) {
    embedding_.resize(num_states_);
    embedding_dimension_ = static_cast<int>(coords.size());
  }
  if (static_cast<int>(coords.size()) != embedding_dimension_) {
    throw ShapeError("all state embeddings must share one dimension");
  }
  embedding_[state] = std::move(coords);
}

std::span<const double> FiniteHorizonMdp::embedding(int state) const {
  if (!has_embedding()) throw ShapeError("MDP has no state embedding");
  if (state < 0 || state >= num_states_) throw ShapeError("embedding state out of range");
  return embedding_[state];
}

void FiniteHorizonMdp::validate() const {
  for (const auto& row : rows_) {
    if (row.empty()) throw DomainError("transition row left unset");
    double sum = 0.0;
    for (const auto& o : row) sum += o.prob;
    if (std::abs(sum - 1.0) > kRowSumTol) {
      throw DomainError("transition row must sum to 1, got " + std::to_string(sum));
    }
  }
}

CostFunction::CostFunction(int horizon, int num_states, int num_actions,
                           double upper_bound)
    : horizon_(horizon),
      num_states_(num_states),
      num_actions_(num_actions),
      upper_bound_(upper_bound) {
  check_positive(num_states, "num_states");
  check_positive(num_actions, "num_actions");
  if (horizon < 0) throw ShapeError("horizon must be nonnegative");
  if (upper_bound < 0.0) throw DomainError("cost upper bound must be nonnegative");
  values_.assign(static_cast<size_t>(horizon + 1) * num_states * num_actions, 0.0);
}

void CostFunction::validate() const {
  for (double v : values_) {
    if (!(v >= 0.0 && v <= upper_bound_)) {
      throw DomainError("cost value outside [0, upper_bound]");
    }
  }
}

Policy::Policy(int horizon, int num_states, int num_actions)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions) {
  check_positive(num_states, "num_states");
  check_positive(num_actions, "num_actions");
  if (horizon < 0) throw ShapeError("horizon must be nonnegative");
  probs_.assign(static_cast<size_t>(horizon + 1) * num_states * num_actions, 0.0);
}

Policy Policy::uniform(int horizon, int num_states, int num_actions) {
  Policy p(horizon, num_states, num_actions);
  const double w = 1.0 / num_actions;
  for (auto& v : p.probs_) v = w;
  return p;
}

void Policy::set_deterministic(int stage, int state, int action) {
  for (int a = 0; a < num_actions_; ++a) prob(stage, state, a) = 0.0;
  prob(stage, state, action) = 1.0;
}

void Policy::validate(double tol) const {
  for (int h = 0; h <= horizon_; ++h) {
    for (int s = 0; s < num_states_; ++s) {
      double sum = 0.0;
      for (int a = 0; a < num_actions_; ++a) {
        const double p = prob(h, s, a);
        if (p < 0.0) throw DomainError("policy probability must be nonnegative");
        sum += p;
      }
      if (std::abs(sum - 1.0) > tol) {
        throw DomainError("policy row must sum to 1, got " + std::to_string(sum));
      }
    }
  }
}

OccupancyMeasure::OccupancyMeasure(int horizon, int num_states, int num_actions)
    : horizon_(horizon), num_states_(num_states), num_actions_(num_actions) {
  check_positive(num_states, "num_states");
  check_positive(num_actions, "num_actions");
  if (horizon < 0) throw ShapeError("horizon must be nonnegative");
  mass_.assign(static_cast<size_t>(horizon + 1) * num_states * num_actions, 0.0);
}

double OccupancyMeasure::stage_sum(int stage) const {
  double sum = 0.0;
  for (int s = 0; s < num_states_; ++s) {
    for (int a = 0; a < num_actions_; ++a) sum += at(stage, s, a);
  }
  return sum;
}

void OccupancyMeasure::add_scaled(const OccupancyMeasure& other, double weight) {
  if (other.mass_.size() != mass_.size()) {
    throw ShapeError("occupancy shapes must match");
  }
  for (size_t i = 0; i < mass_.size(); ++i) mass_[i] += weight * other.mass_[i];
}

void OccupancyMeasure::scale(double factor) {
  for (auto& v : mass_) v *= factor;
}

double l1_distance(const OccupancyMeasure& a, const OccupancyMeasure& b) {
  if (a.horizon() != b.horizon() || a.num_states() != b.num_states() ||
      a.num_actions() != b.num_actions()) {
    throw ShapeError("occupancy shapes must match");
  }
  double d = 0.0;
  for (int h = 0; h <= a.horizon(); ++h) {
    for (int s = 0; s < a.num_states(); ++s) {
      for (int act = 0; act < a.num_actions(); ++act) {
        d += std::abs(a.at(h, s, act) - b.at(h, s, act));
      }
    }
  }
  return d;
}

}  // namespace stlplan
