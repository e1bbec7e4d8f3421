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

#include "stlplan/serialize.hpp"

#include <charconv>
#include <fstream>
#include <vector>

namespace stlplan {

namespace {

void check_type(const nlohmann::json& j, const char* tag) {
  if (!j.is_object() || j.value("type", "") != tag) {
    throw ConfigError(std::string("expected a document of type '") + tag + "'");
  }
}

int get_int(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer()) {
    throw ConfigError(std::string("missing or non-integer field '") + key + "'");
  }
  return j.at(key).get<int>();
}

double get_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ConfigError(std::string("missing or non-numeric field '") + key + "'");
  }
  return j.at(key).get<double>();
}

const nlohmann::json& get_stages(const nlohmann::json& j, const char* key,
                                 int horizon) {
  if (!j.contains(key) || !j.at(key).is_array() ||
      static_cast<int>(j.at(key).size()) != horizon + 1) {
    throw ConfigError(std::string("field '") + key +
                      "' must list horizon + 1 stages");
  }
  return j.at(key);
}

}  // namespace

nlohmann::ordered_json mdp_to_json(const FiniteHorizonMdp& mdp) {
  nlohmann::ordered_json j;
  j["type"] = "finite_horizon_mdp";
  j["num_states"] = mdp.num_states();
  j["num_actions"] = mdp.num_actions();
  j["horizon"] = mdp.horizon();
  j["initial_state"] = mdp.initial_state();
  auto stages = nlohmann::ordered_json::array();
  for (int h = 0; h <= mdp.horizon(); ++h) {
    auto states = nlohmann::ordered_json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
      auto actions = nlohmann::ordered_json::array();
      for (int a = 0; a < mdp.num_actions(); ++a) {
        auto row = nlohmann::ordered_json::array();
        for (const auto& o : mdp.row(h, s, a)) {
          row.push_back(nlohmann::ordered_json::array({o.state, o.prob}));
        }
        actions.push_back(std::move(row));
      }
      states.push_back(std::move(actions));
    }
    stages.push_back(std::move(states));
  }
  j["transitions"] = std::move(stages);
  if (mdp.has_embedding()) {
    auto emb = nlohmann::ordered_json::array();
    for (int s = 0; s < mdp.num_states(); ++s) {
      const auto point = mdp.embedding(s);
      emb.push_back(std::vector<double>(point.begin(), point.end()));
    }
    j["embedding"] = std::move(emb);
  }
  return j;
}

std::shared_ptr<FiniteHorizonMdp> mdp_from_json(const nlohmann::json& j) {
  check_type(j, "finite_horizon_mdp");
  const int S = get_int(j, "num_states");
  const int A = get_int(j, "num_actions");
  const int H = get_int(j, "horizon");
  const int s0 = get_int(j, "initial_state");
  auto mdp = std::make_shared<FiniteHorizonMdp>(S, A, H, s0);
  const auto& stages = get_stages(j, "transitions", H);
  for (int h = 0; h <= H; ++h) {
    const auto& states = stages.at(h);
    if (!states.is_array() || static_cast<int>(states.size()) != S) {
      throw ConfigError("each stage must list every state");
    }
    for (int s = 0; s < S; ++s) {
      const auto& actions = states.at(s);
      if (!actions.is_array() || static_cast<int>(actions.size()) != A) {
        throw ConfigError("each state must list every action");
      }
      for (int a = 0; a < A; ++a) {
        std::vector<Outcome> row;
        for (const auto& entry : actions.at(a)) {
          if (!entry.is_array() || entry.size() != 2) {
            throw ConfigError("transition outcome must be a [state, prob] pair");
          }
          row.push_back({entry.at(0).get<int>(), entry.at(1).get<double>()});
        }
        mdp->set_row(h, s, a, std::move(row));
      }
    }
  }
  if (j.contains("embedding")) {
    const auto& emb = j.at("embedding");
    if (!emb.is_array() || static_cast<int>(emb.size()) != S) {
      throw ConfigError("embedding must list every state");
    }
    for (int s = 0; s < S; ++s) {
      mdp->set_embedding(s, emb.at(s).get<std::vector<double>>());
    }
  }
  mdp->validate();
  return mdp;
}

nlohmann::ordered_json cost_to_json(const CostFunction& cost) {
  nlohmann::ordered_json j;
  j["type"] = "cost_function";
  j["horizon"] = cost.horizon();
  j["num_states"] = cost.num_states();
  j["num_actions"] = cost.num_actions();
  j["upper_bound"] = cost.upper_bound();
  auto stages = nlohmann::ordered_json::array();
  for (int h = 0; h <= cost.horizon(); ++h) {
    auto states = nlohmann::ordered_json::array();
    for (int s = 0; s < cost.num_states(); ++s) {
      auto row = nlohmann::ordered_json::array();
      for (int a = 0; a < cost.num_actions(); ++a) row.push_back(cost.at(h, s, a));
      states.push_back(std::move(row));
    }
    stages.push_back(std::move(states));
  }
  j["values"] = std::move(stages);
  return j;
}

CostFunction cost_from_json(const nlohmann::json& j) {
  check_type(j, "cost_function");
  CostFunction cost(get_int(j, "horizon"), get_int(j, "num_states"),
                    get_int(j, "num_actions"), get_double(j, "upper_bound"));
  const auto& stages = get_stages(j, "values", cost.horizon());
  for (int h = 0; h <= cost.horizon(); ++h) {
    for (int s = 0; s < cost.num_states(); ++s) {
      for (int a = 0; a < cost.num_actions(); ++a) {
        cost.at(h, s, a) = stages.at(h).at(s).at(a).get<double>();
      }
    }
  }
  cost.validate();
  return cost;
}

namespace {

template <typename Table>
nlohmann::ordered_json table_to_json(const Table& table, const char* tag,
                                     const char* field,
                                     double (Table::*get)(int, int, int) const) {
  nlohmann::ordered_json j;
  j["type"] = tag;
  j["horizon"] = table.horizon();
  j["num_states"] = table.num_states();
  j["num_actions"] = table.num_actions();
  auto stages = nlohmann::ordered_json::array();
  for (int h = 0; h <= table.horizon(); ++h) {
    auto states = nlohmann::ordered_json::array();
    for (int s = 0; s < table.num_states(); ++s) {
      auto row = nlohmann::ordered_json::array();
      for (int a = 0; a < table.num_actions(); ++a) {
        row.push_back((table.*get)(h, s, a));
      }
      states.push_back(std::move(row));
    }
    stages.push_back(std::move(states));
  }
  j[field] = std::move(stages);
  return j;
}

}  // namespace

nlohmann::ordered_json policy_to_json(const Policy& policy) {
  return table_to_json(policy, "policy", "probs", &Policy::prob);
}

Policy policy_from_json(const nlohmann::json& j) {
  check_type(j, "policy");
  Policy policy(get_int(j, "horizon"), get_int(j, "num_states"),
                get_int(j, "num_actions"));
  const auto& stages = get_stages(j, "probs", policy.horizon());
  for (int h = 0; h <= policy.horizon(); ++h) {
    for (int s = 0; s < policy.num_states(); ++s) {
      for (int a = 0; a < policy.num_actions(); ++a) {
        policy.prob(h, s, a) = stages.at(h).at(s).at(a).get<double>();
      }
    }
  }
  policy.validate();
  return policy;
}

nlohmann::ordered_json occupancy_to_json(const OccupancyMeasure& occupancy) {
  return table_to_json(occupancy, "occupancy_measure", "mass", &OccupancyMeasure::at);
}

OccupancyMeasure occupancy_from_json(const nlohmann::json& j) {
  check_type(j, "occupancy_measure");
  OccupancyMeasure occ(get_int(j, "horizon"), get_int(j, "num_states"),
                       get_int(j, "num_actions"));
  const auto& stages = get_stages(j, "mass", occ.horizon());
  for (int h = 0; h <= occ.horizon(); ++h) {
    for (int s = 0; s < occ.num_states(); ++s) {
      for (int a = 0; a < occ.num_actions(); ++a) {
        occ.at(h, s, a) = stages.at(h).at(s).at(a).get<double>();
      }
    }
  }
  return occ;
}

nlohmann::ordered_json augmented_to_json(const AugmentedMdp& augmented) {
  nlohmann::ordered_json j;
  j["type"] = "augmented_mdp";
  j["formula"] = formula_to_json(augmented.formula);
  const auto& codec = augmented.codec;
  nlohmann::ordered_json cj;
  cj["num_base_states"] = codec.num_base_states();
  cj["num_leaves"] = codec.num_leaves();
  cj["flag_domain"] = codec.flag_domain();
  cj["final_flags"] = {"no", "yes", "pending"};
  auto tuples = nlohmann::ordered_json::array();
  std::vector<int> flags(codec.num_leaves());
  for (int x = 0; x < codec.num_product_states(); ++x) {
    int base = 0;
    FinalFlag fin = FinalFlag::Pending;
    codec.decode(x, base, flags, fin);
    auto tuple = nlohmann::ordered_json::array();
    tuple.push_back(base);
    for (int f : flags) tuple.push_back(f);
    tuple.push_back(static_cast<int>(fin));
    tuples.push_back(std::move(tuple));
  }
  cj["index_to_tuple"] = std::move(tuples);
  j["codec"] = std::move(cj);
  j["product"] = mdp_to_json(*augmented.product);
  j["reach"] = cost_to_json(augmented.reach);
  j["objective"] = cost_to_json(augmented.objective);
  return j;
}

void write_json_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw ConfigError("failed writing '" + path + "'");
}

nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
  return j;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

}  // namespace stlplan
