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

#include "stlplan/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <utility>

#include "stlplan/serialize.hpp"
#include "stlplan/simulate.hpp"

namespace stlplan {

namespace {

constexpr uint64_t kTagEvaluation = 3;

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec spec;
  if (!j.is_object()) throw ConfigError("grid section must be an object");
  spec.width = j.value("width", spec.width);
  spec.height = j.value("height", spec.height);
  if (j.contains("start")) {
    const auto& start = j.at("start");
    if (!start.is_array() || start.size() != 2) {
      throw ConfigError("grid start must be [col, row]");
    }
    spec.start_col = start.at(0).get<int>();
    spec.start_row = start.at(1).get<int>();
  }
  spec.move_prob = j.value("move_prob", spec.move_prob);
  if (j.contains("costs")) {
    const auto& costs = j.at("costs");
    spec.rest_cost = costs.value("rest", spec.rest_cost);
    spec.cardinal_cost = costs.value("cardinal", spec.cardinal_cost);
    spec.diagonal_cost = costs.value("diagonal", spec.diagonal_cost);
  }
  const std::string rule = j.value("blocked_slips", "collapse");
  if (rule == "collapse") {
    spec.blocked_rule = BlockedSlipRule::CollapseToStay;
  } else if (rule == "renormalize") {
    spec.blocked_rule = BlockedSlipRule::Renormalize;
  } else {
    throw ConfigError("blocked_slips must be 'collapse' or 'renormalize'");
  }
  return spec;
}

nlohmann::ordered_json grid_to_json(const GridSpec& spec) {
  nlohmann::ordered_json j;
  j["width"] = spec.width;
  j["height"] = spec.height;
  j["start"] = {spec.start_col, spec.start_row};
  j["move_prob"] = spec.move_prob;
  j["costs"] = {{"rest", spec.rest_cost},
                {"cardinal", spec.cardinal_cost},
                {"diagonal", spec.diagonal_cost}};
  j["blocked_slips"] =
      spec.blocked_rule == BlockedSlipRule::CollapseToStay ? "collapse" : "renormalize";
  return j;
}

ObMfcHyperparams learner_from_json(const nlohmann::json& j) {
  ObMfcHyperparams p;
  if (j.is_null()) return p;
  if (!j.is_object()) throw ConfigError("learner section must be an object");
  p.iterations = j.value("iterations", p.iterations);
  p.budget = j.value("budget", p.budget);
  p.eta = j.value("eta", p.eta);
  p.rollouts = j.value("rollouts", p.rollouts);
  p.q_learning.episodes = j.value("episodes", p.q_learning.episodes);
  p.first_call_episodes = j.value("first_episodes", p.first_call_episodes);
  p.warm_start = j.value("warm_start", p.warm_start);
  p.q_learning.eps_start = j.value("eps_start", p.q_learning.eps_start);
  p.q_learning.eps_end = j.value("eps_end", p.q_learning.eps_end);
  p.q_learning.eps_anneal_frac = j.value("eps_anneal_frac", p.q_learning.eps_anneal_frac);
  p.q_learning.alpha_h0 = j.value("alpha_h0", p.q_learning.alpha_h0);
  if (p.iterations <= 0 || p.rollouts <= 0 || p.q_learning.episodes <= 0) {
    throw ConfigError("learner iteration, rollout, and episode counts must be positive");
  }
  if (!(p.budget > 0.0) || !(p.eta > 0.0)) {
    throw ConfigError("learner budget and eta must be positive");
  }
  return p;
}

nlohmann::ordered_json learner_to_json(const ObMfcHyperparams& p) {
  nlohmann::ordered_json j;
  j["iterations"] = p.iterations;
  j["budget"] = p.budget;
  j["eta"] = p.eta;
  j["rollouts"] = p.rollouts;
  j["episodes"] = p.q_learning.episodes;
  j["first_episodes"] = p.first_call_episodes;
  j["warm_start"] = p.warm_start;
  j["eps_start"] = p.q_learning.eps_start;
  j["eps_end"] = p.q_learning.eps_end;
  j["eps_anneal_frac"] = p.q_learning.eps_anneal_frac;
  j["alpha_h0"] = p.q_learning.alpha_h0;
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig config;
  if (j.contains("grid")) config.grid = grid_from_json(j.at("grid"));
  if (!j.contains("formula") || !j.at("formula").is_string()) {
    throw ConfigError("config needs a 'formula' string");
  }
  config.formula_text = j.at("formula").get<std::string>();
  config.p_thres = j.value("p_thres", config.p_thres);
  if (!(config.p_thres >= 0.0 && config.p_thres <= 1.0)) {
    throw ConfigError("p_thres must lie in [0, 1]");
  }
  const std::string mode = j.value("mode", "exact");
  if (mode == "exact") {
    config.mode = ExperimentMode::Exact;
  } else if (mode == "learn") {
    config.mode = ExperimentMode::Learn;
  } else if (mode == "both") {
    config.mode = ExperimentMode::Both;
  } else {
    throw ConfigError("mode must be 'exact', 'learn', or 'both'");
  }
  config.learner = learner_from_json(j.contains("learner") ? j.at("learner")
                                                           : nlohmann::json());
  config.eval_trajectories = j.value("eval_trajectories", config.eval_trajectories);
  if (config.eval_trajectories <= 0) {
    throw ConfigError("eval_trajectories must be positive");
  }
  config.seed = j.value("seed", config.seed);
  config.learner.seed = config.seed;

  // Fail fast on formula problems: parsing errors are config errors.
  parse_formula(config.formula_text, grid_dimension_names());
  return config;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["grid"] = grid_to_json(config.grid);
  j["formula"] = config.formula_text;
  j["p_thres"] = config.p_thres;
  j["mode"] = config.mode == ExperimentMode::Exact   ? "exact"
              : config.mode == ExperimentMode::Learn ? "learn"
                                                     : "both";
  j["learner"] = learner_to_json(config.learner);
  j["eval_trajectories"] = config.eval_trajectories;
  j["seed"] = config.seed;
  return j;
}

EvaluationReport evaluate_policy(const AugmentedMdp& augmented,
                                 const Policy& product_policy, int trajectories,
                                 uint64_t seed) {
  if (trajectories <= 0) throw DomainError("need at least one evaluation episode");
  const auto& product = *augmented.product;
  if (product_policy.horizon() != product.horizon() ||
      product_policy.num_states() != product.num_states() ||
      product_policy.num_actions() != product.num_actions()) {
    throw ShapeError("policy shape does not match product MDP");
  }
  const MdpSimulator sim(augmented.product);
  const int H = product.horizon();
  const int signal_len = H;  // product steps 0..H-1 carry the signal points

  std::vector<char> satisfied(trajectories, 0);
  std::vector<char> agree(trajectories, 0);
  std::vector<double> costs(trajectories, 0.0);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < trajectories; ++r) {
    RngStream rng(derive_seed(seed, kTagEvaluation, r));
    const Trajectory traj = rollout(sim, product_policy, rng);
    const bool flag_sat =
        augmented.codec.final_flag_of(traj.states[H]) == FinalFlag::Yes;
    Signal signal;
    signal.points.reserve(signal_len);
    for (int h = 0; h < signal_len; ++h) {
      const auto point = product.embedding(traj.states[h]);
      signal.points.emplace_back(point.begin(), point.end());
    }
    const bool monitor_sat = monitor(augmented.formula, signal);
    double cost = 0.0;
    for (int h = 0; h <= H; ++h) {
      cost += augmented.objective.at(h, traj.states[h], traj.actions[h]);
    }
    satisfied[r] = flag_sat ? 1 : 0;
    agree[r] = flag_sat == monitor_sat ? 1 : 0;
    costs[r] = cost;
  }

  EvaluationReport report;
  report.trajectories = trajectories;
  int64_t sat_count = 0;
  double cost_sum = 0.0;
  bool all_agree = true;
  for (int r = 0; r < trajectories; ++r) {
    sat_count += satisfied[r];
    cost_sum += costs[r];
    all_agree = all_agree && agree[r];
  }
  const double M = trajectories;
  report.satisfaction = sat_count / M;
  report.satisfaction_se =
      std::sqrt(report.satisfaction * (1.0 - report.satisfaction) / M);
  report.expected_cost = cost_sum / M;
  double sq = 0.0;
  for (int r = 0; r < trajectories; ++r) {
    const double dev = costs[r] - report.expected_cost;
    sq += dev * dev;
  }
  report.cost_se = trajectories > 1 ? std::sqrt(sq / (M - 1.0) / M) : 0.0;
  report.flag_monitor_agree = all_agree;
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  const StlFormula formula =
      parse_formula(config.formula_text, grid_dimension_names());
  const int H = horizon(formula) + 1;
  const FiniteHorizonMdp base = build_grid_mdp(config.grid, H);
  const CostFunction base_cost = grid_cost_function(config.grid, H);
  AugmentedMdp augmented = build_augmented_mdp(base, base_cost, formula);
  const CmdpProblem problem = make_satisfaction_cmdp(augmented, config.p_thres);

  ExperimentResult result{std::nullopt,
                          std::nullopt,
                          {},
                          Policy(H, augmented.product->num_states(),
                                 augmented.product->num_actions()),
                          {}};

  if (config.mode != ExperimentMode::Learn) {
    result.exact = solve_dual(problem);
  }
  if (config.mode != ExperimentMode::Exact) {
    const MdpSimulator sim(augmented.product);
    ObMfcHyperparams params = config.learner;
    params.seed = config.seed;
    result.learned = run_ob_mfc_model_free(sim, problem.objective, problem.constraint,
                                           problem.threshold, params);
  }

  result.evaluated_policy =
      result.learned ? result.learned->policy : result.exact->policy;
  result.evaluation = evaluate_policy(augmented, result.evaluated_policy,
                                      config.eval_trajectories, config.seed);

  nlohmann::ordered_json report;
  report["config"] = config_to_json(config);
  {
    nlohmann::ordered_json fj;
    fj["text"] = format_formula(formula, grid_dimension_names());
    fj["horizon"] = horizon(formula);
    fj["leaves"] = static_cast<int>(formula.leaves.size());
    fj["product_states"] = augmented.product->num_states();
    fj["product_horizon"] = H;
    report["formula"] = std::move(fj);
  }
  if (result.exact) {
    const auto& sol = *result.exact;
    nlohmann::ordered_json ej;
    ej["optimal_value"] = sol.optimal_value;
    ej["lambda_star"] = sol.lambda_star;
    ej["constraint_value"] = sol.constraint_value;
    ej["satisfaction_probability"] = 1.0 - sol.constraint_value;
    auto weights = nlohmann::ordered_json::array();
    for (const auto& [policy, weight] : sol.mixture) weights.push_back(weight);
    ej["mixture_weights"] = std::move(weights);
    ej["best_response_calls"] = sol.best_response_calls;
    report["exact"] = std::move(ej);
  }
  if (result.learned) {
    const auto& learned = *result.learned;
    nlohmann::ordered_json lj;
    lj["iterations"] = static_cast<int>(learned.diagnostics.size());
    lj["final_lambda1"] = learned.final_lambda.lambda[0];
    lj["avg_lambda1"] = learned.avg_lambda1;
    lj["regret_proxy"] = learned.regret_proxy;
    lj["avg_objective_cost"] = cost_of_occupancy(learned.avg_occupancy,
                                                 problem.objective);
    lj["avg_constraint_cost"] = cost_of_occupancy(learned.avg_occupancy,
                                                  problem.constraint);
    report["learned"] = std::move(lj);
  }
  {
    nlohmann::ordered_json vj;
    vj["policy"] = result.learned ? "learned" : "exact";
    vj["trajectories"] = result.evaluation.trajectories;
    vj["satisfaction"] = result.evaluation.satisfaction;
    vj["satisfaction_se"] = result.evaluation.satisfaction_se;
    vj["expected_cost"] = result.evaluation.expected_cost;
    vj["cost_se"] = result.evaluation.cost_se;
    vj["flag_monitor_agree"] = result.evaluation.flag_monitor_agree;
    report["evaluation"] = std::move(vj);
  }
  if (result.exact && result.learned) {
    nlohmann::ordered_json gj;
    gj["cost_vs_exact_pct"] =
        result.exact->optimal_value != 0.0
            ? 100.0 * (result.evaluation.expected_cost - result.exact->optimal_value) /
                  result.exact->optimal_value
            : 0.0;
    gj["satisfaction_vs_threshold"] =
        result.evaluation.satisfaction - config.p_thres;
    report["gap"] = std::move(gj);
  }
  result.report = std::move(report);
  return result;
}

void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + out_dir + "'");

  write_json_file((dir / "report.json").string(), result.report);

  nlohmann::ordered_json pj;
  pj["config"] = config_to_json(config);
  pj["source"] = result.learned ? "learned" : "exact";
  pj["policy"] = policy_to_json(result.evaluated_policy);
  write_json_file((dir / "policy.json").string(), pj);

  if (result.learned) {
    emit_plot_data(result.learned->diagnostics, (dir / "diagnostics.csv").string());
  }
}

void emit_plot_data(const std::vector<ObMfcIterate>& diagnostics,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << "iteration,lambda1,objective_cost,constraint_cost,lagrangian,regret_proxy\n";
  for (const auto& row : diagnostics) {
    out << row.iteration << ',' << format_double(row.lambda1) << ','
        << format_double(row.objective_cost) << ','
        << format_double(row.constraint_cost) << ','
        << format_double(row.lagrangian) << ','
        << format_double(row.regret_proxy) << '\n';
  }
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

ExperimentConfig repro_config(const std::string& name) {
  ExperimentConfig config;
  if (name == "case1") {
    config.grid = GridSpec{};  // 6x6, start (0, 0)
    config.grid.blocked_rule = BlockedSlipRule::Renormalize;
    config.formula_text = "F[0,7] G[0,1] (x > 4 & y > 4)";
    config.p_thres = 0.5;
    config.mode = ExperimentMode::Both;
    config.learner.iterations = 200;
    config.learner.budget = 16.7;
    config.learner.eta = 0.05;
    config.learner.rollouts = 5000;
    config.learner.q_learning.episodes = 40000;
    config.learner.q_learning.alpha_h0 = 10.0;
    config.learner.warm_start = false;
  } else if (name == "case2") {
    GridSpec grid;
    grid.width = 4;
    grid.height = 4;
    grid.start_col = 1;
    grid.start_row = 1;
    config.grid = grid;
    config.formula_text =
        "G[0,12] (F[0,2] (x > 1 & x < 2 & y > 3 & y < 4) & "
        "F[0,2] (x > 2 & x < 3 & y > 2 & y < 3))";
    config.p_thres = 0.7;
    config.mode = ExperimentMode::Both;
    config.learner.iterations = 200;
    config.learner.budget = 93.0;
    config.learner.eta = 0.05;
    config.learner.rollouts = 5000;
    config.learner.q_learning.episodes = 800000;
    config.learner.q_learning.alpha_h0 = 50.0;
    config.learner.warm_start = false;
  } else {
    throw ConfigError("unknown benchmark '" + name + "' (expected case1 or case2)");
  }
  config.seed = 1;
  config.learner.seed = config.seed;
  return config;
}

}  // namespace stlplan
