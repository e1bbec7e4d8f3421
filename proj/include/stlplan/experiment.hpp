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

// End-to-end experiments: build the gridworld, compile the formula into the
// product, solve exactly and/or learn model-free, evaluate the resulting
// policy by rollouts, and write report.json / policy.json /
// diagnostics.csv. Everything downstream of the config and seed is
// deterministic, including the report bytes.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "stlplan/dual_solver.hpp"
#include "stlplan/gridworld.hpp"
#include "stlplan/ob_mfc.hpp"
#include "stlplan/stl_product.hpp"

namespace stlplan {

enum class ExperimentMode { Exact, Learn, Both };

struct ExperimentConfig {
  GridSpec grid;
  std::string formula_text;
  double p_thres = 0.5;
  ExperimentMode mode = ExperimentMode::Exact;
  ObMfcHyperparams learner;
  int eval_trajectories = 10000;
  uint64_t seed = 1;
};

// Loads and validates a config document; ConfigError on anything invalid.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

// Built-in configurations reproducing the two benchmark studies: case1 is
// the 6x6 reach-and-hold task, case2 the 4x4 patrol task. Learner
// hyperparameters ship tuned for each.
ExperimentConfig repro_config(const std::string& name);

// Monte Carlo evaluation of a product policy. Each episode is checked two
// ways: the final flag of the last product state, and the trajectory
// monitor replayed on the decoded base signal; `flag_monitor_agree` is
// true when they matched on every episode.
struct EvaluationReport {
  int trajectories = 0;
  double satisfaction = 0.0;
  double satisfaction_se = 0.0;
  double expected_cost = 0.0;
  double cost_se = 0.0;
  bool flag_monitor_agree = true;
};

EvaluationReport evaluate_policy(const AugmentedMdp& augmented,
                                 const Policy& product_policy, int trajectories,
                                 uint64_t seed);

struct ExperimentResult {
  std::optional<DualSolution> exact;
  std::optional<ObMfcResult> learned;
  EvaluationReport evaluation;  // learned policy if present, else exact
  Policy evaluated_policy;
  nlohmann::ordered_json report;
};

ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes report.json, policy.json, and (after learning) diagnostics.csv
// into out_dir, which must already exist or be creatable.
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::string& out_dir);

// Learning curves as CSV: one row per dual iteration.
void emit_plot_data(const std::vector<ObMfcIterate>& diagnostics,
                    const std::string& path);

}  // namespace stlplan
