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

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "stlplan/experiment.hpp"
#include "stlplan/serialize.hpp"

namespace {

using namespace stlplan;

// Exit codes: 0 success, 2 config error, 3 infeasible, 4 numeric failure.
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumeric = 4;

ExperimentMode parse_mode(const std::string& name) {
  if (name == "exact") return ExperimentMode::Exact;
  if (name == "learn") return ExperimentMode::Learn;
  if (name == "both") return ExperimentMode::Both;
  throw ConfigError("mode must be 'exact', 'learn', or 'both'");
}

void print_summary(const ExperimentConfig& config, const ExperimentResult& result) {
  const StlFormula formula =
      parse_formula(config.formula_text, grid_dimension_names());
  std::cout << "formula: " << format_formula(formula, grid_dimension_names())
            << "\n";
  std::cout << "product states: "
            << result.report.at("formula").at("product_states").get<int>()
            << ", horizon: " << horizon(formula) + 1 << "\n";
  if (result.exact) {
    std::cout << "exact optimal cost: " << format_double(result.exact->optimal_value)
              << " (lambda* = " << format_double(result.exact->lambda_star)
              << ", satisfaction = "
              << format_double(1.0 - result.exact->constraint_value) << ")\n";
  }
  if (result.learned) {
    std::cout << "learned: final lambda1 = "
              << format_double(result.learned->final_lambda.lambda[0])
              << ", regret proxy = " << format_double(result.learned->regret_proxy)
              << "\n";
  }
  const auto& ev = result.evaluation;
  std::cout << "evaluation (" << ev.trajectories
            << " trajectories): satisfaction = " << format_double(ev.satisfaction)
            << " +/- " << format_double(ev.satisfaction_se)
            << ", cost = " << format_double(ev.expected_cost) << " +/- "
            << format_double(ev.cost_se) << "\n";
}

int run_and_write(ExperimentConfig config, const std::string& out_dir) {
  const ExperimentResult result = run_experiment(config);
  write_outputs(config, result, out_dir);
  print_summary(config, result);
  std::cout << "outputs written to " << out_dir << "\n";
  return 0;
}

int run_check(const std::string& config_path) {
  const ExperimentConfig config = config_from_json(read_json_file(config_path));
  const StlFormula formula =
      parse_formula(config.formula_text, grid_dimension_names());
  const int H = horizon(formula) + 1;
  const FiniteHorizonMdp base = build_grid_mdp(config.grid, H);
  const AugmentedMdp augmented =
      build_augmented_mdp(base, grid_cost_function(config.grid, H), formula);
  std::cout << "config OK\n";
  std::cout << "formula: " << format_formula(formula, grid_dimension_names())
            << "\n";
  std::cout << "formula horizon: " << horizon(formula) << ", planning horizon: " << H
            << "\n";
  std::cout << "base states: " << base.num_states()
            << ", product states: " << augmented.product->num_states() << "\n";
  return 0;
}

int run_eval(const std::string& policy_path, const std::string& config_path,
             std::optional<uint64_t> seed, std::optional<int> trajectories,
             const std::string& out_dir) {
  const nlohmann::json pj = read_json_file(policy_path);
  if (!pj.is_object() || !pj.contains("policy")) {
    throw ConfigError("policy file needs a 'policy' section");
  }
  nlohmann::json config_json;
  if (!config_path.empty()) {
    config_json = read_json_file(config_path);
  } else if (pj.contains("config")) {
    config_json = pj.at("config");
  } else {
    throw ConfigError("no config embedded in policy file; pass --config");
  }
  ExperimentConfig config = config_from_json(config_json);
  if (seed) config.seed = *seed;
  if (trajectories) config.eval_trajectories = *trajectories;

  const StlFormula formula =
      parse_formula(config.formula_text, grid_dimension_names());
  const int H = horizon(formula) + 1;
  const FiniteHorizonMdp base = build_grid_mdp(config.grid, H);
  const AugmentedMdp augmented =
      build_augmented_mdp(base, grid_cost_function(config.grid, H), formula);
  const Policy policy = policy_from_json(pj.at("policy"));
  const EvaluationReport ev =
      evaluate_policy(augmented, policy, config.eval_trajectories, config.seed);

  std::cout << "evaluation (" << ev.trajectories
            << " trajectories): satisfaction = " << format_double(ev.satisfaction)
            << " +/- " << format_double(ev.satisfaction_se)
            << ", cost = " << format_double(ev.expected_cost) << " +/- "
            << format_double(ev.cost_se) << "\n";
  std::cout << "flag/monitor agreement: " << (ev.flag_monitor_agree ? "yes" : "no")
            << "\n";
  if (!out_dir.empty()) {
    nlohmann::ordered_json report;
    report["config"] = config_to_json(config);
    report["evaluation"] = {{"policy", "file"},
                            {"trajectories", ev.trajectories},
                            {"satisfaction", ev.satisfaction},
                            {"satisfaction_se", ev.satisfaction_se},
                            {"expected_cost", ev.expected_cost},
                            {"cost_se", ev.cost_se},
                            {"flag_monitor_agree", ev.flag_monitor_agree}};
    std::filesystem::create_directories(out_dir);
    write_json_file((std::filesystem::path(out_dir) / "report.json").string(),
                    report);
    std::cout << "outputs written to " << out_dir << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Plan and learn cost-optimal MDP policies under a probabilistic "
               "signal temporal logic constraint"};
  app.require_subcommand(1);

  std::string config_path;
  std::string policy_path;
  std::string out_dir = "out";
  std::string mode_name;
  std::string case_name;
  uint64_t seed = 0;
  int trajectories = 0;
  double p_thres = -1.0;

  auto* check = app.add_subcommand("check", "Parse and validate a config file");
  check->add_option("--config", config_path, "experiment config JSON")
      ->required()
      ->check(CLI::ExistingFile);

  auto* plan = app.add_subcommand("plan", "Exact planning with a known model");
  auto* learn = app.add_subcommand("learn", "Model-free primal-dual learning");
  auto* repro =
      app.add_subcommand("repro", "Run a built-in benchmark (case1 or case2)");
  auto* eval = app.add_subcommand("eval", "Evaluate a saved policy by rollout");

  CLI::Option* seed_opts[4];
  CLI::Option* traj_opts[4];
  int slot = 0;
  for (auto* cmd : {plan, learn, repro, eval}) {
    seed_opts[slot] = cmd->add_option("--seed", seed, "master seed override");
    traj_opts[slot] =
        cmd->add_option("--trajectories", trajectories, "evaluation rollouts")
            ->check(CLI::PositiveNumber);
    ++slot;
  }
  for (auto* cmd : {plan, learn}) {
    cmd->add_option("--config", config_path, "experiment config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", out_dir, "output directory (default: out)");
  }
  repro->add_option("case", case_name, "benchmark name: case1 or case2")
      ->required();
  repro->add_option("--mode", mode_name, "exact, learn, or both");
  repro->add_option("--out", out_dir, "output directory (default: out)");
  repro->add_option("--p-thres", p_thres, "satisfaction threshold override")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_option("--policy", policy_path, "policy JSON produced by plan/learn")
      ->required()
      ->check(CLI::ExistingFile);
  eval->add_option("--config", config_path, "environment config override")
      ->check(CLI::ExistingFile);
  eval->add_option("--out", out_dir, "output directory (default: out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(check)) return run_check(config_path);

    if (app.got_subcommand(eval)) {
      std::optional<uint64_t> seed_override;
      std::optional<int> traj_override;
      if (*seed_opts[3]) seed_override = seed;
      if (*traj_opts[3]) traj_override = trajectories;
      return run_eval(policy_path, eval->count("--config") ? config_path : "",
                      seed_override, traj_override,
                      eval->count("--out") ? out_dir : "");
    }

    ExperimentConfig config;
    int opt_slot = 0;
    if (app.got_subcommand(plan)) {
      config = config_from_json(read_json_file(config_path));
      config.mode = ExperimentMode::Exact;
      opt_slot = 0;
    } else if (app.got_subcommand(learn)) {
      config = config_from_json(read_json_file(config_path));
      config.mode = ExperimentMode::Learn;
      opt_slot = 1;
    } else {
      config = repro_config(case_name);
      if (!mode_name.empty()) config.mode = parse_mode(mode_name);
      if (p_thres >= 0.0) config.p_thres = p_thres;
      opt_slot = 2;
    }
    if (*seed_opts[opt_slot]) {
      config.seed = seed;
      config.learner.seed = seed;
    }
    if (*traj_opts[opt_slot]) config.eval_trajectories = trajectories;
    return run_and_write(std::move(config), out_dir);
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const ToleranceError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
}
