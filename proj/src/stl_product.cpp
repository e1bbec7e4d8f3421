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

#include "stlplan/stl_product.hpp"

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace stlplan {

int update_inner_flag(int flag, bool sat_prop, TemporalKind kind, int window) {
  if (flag < 0 || flag > window + 1) {
    throw DomainError("leaf flag " + std::to_string(flag) + " outside {0..," +
                      std::to_string(window + 1) + "}");
  }
  if (kind == TemporalKind::Eventually) {
    // A hit at the current step covers the windows starting at the next
    // window+1 steps; otherwise the previous hit covers one window fewer.
    return sat_prop ? window + 1 : std::max(flag - 1, 0);
  }
  // Run length of consecutive hits ending at the current step, saturated.
  return sat_prop ? std::min(flag, window) + 1 : 0;
}

bool sat_from_flag(int flag, TemporalKind kind, int window) {
  if (flag < 0 || flag > window + 1) {
    throw DomainError("leaf flag " + std::to_string(flag) + " outside {0.., " +
                      std::to_string(window + 1) + "}");
  }
  return kind == TemporalKind::Eventually ? flag > 0 : flag == window + 1;
}

namespace {

bool combine_rec(const InnerFormula& f, std::span<const bool> bits, size_t& next) {
  if (f.is_leaf()) {
    if (next >= bits.size()) throw ShapeError("fewer leaf verdicts than leaves");
    return bits[next++];
  }
  // Evaluate both sides unconditionally; every leaf consumes one bit.
  const bool l = combine_rec(*f.lhs, bits, next);
  const bool r = combine_rec(*f.rhs, bits, next);
  return f.kind == InnerFormula::Kind::And ? (l && r) : (l || r);
}

}  // namespace

bool combine_sat(const InnerFormula& inner, std::span<const bool> leaf_bits) {
  size_t next = 0;
  const bool result = combine_rec(inner, leaf_bits, next);
  if (next != leaf_bits.size()) throw ShapeError("more leaf verdicts than leaves");
  return result;
}

FinalFlag update_final_flag(FinalFlag fin, bool sat_inner, int t, int window,
                            TemporalKind outer_kind) {
  const bool should_be_pending = t <= window;
  if ((fin == FinalFlag::Pending) != should_be_pending) {
    throw DomainError("final flag inconsistent with step " + std::to_string(t));
  }
  if (t < window) return FinalFlag::Pending;
  if (t == window) return sat_inner ? FinalFlag::Yes : FinalFlag::No;
  if (outer_kind == TemporalKind::Eventually) {
    return (sat_inner || fin == FinalFlag::Yes) ? FinalFlag::Yes : FinalFlag::No;
  }
  return (sat_inner && fin == FinalFlag::Yes) ? FinalFlag::Yes : FinalFlag::No;
}

ProductCodec::ProductCodec(int num_base_states, int num_leaves, int flag_domain)
    : num_base_states_(num_base_states),
      num_leaves_(num_leaves),
      flag_domain_(flag_domain) {
  if (num_base_states <= 0) throw ShapeError("num_base_states must be positive");
  if (num_leaves <= 0) throw ShapeError("num_leaves must be positive");
  if (flag_domain <= 0) throw ShapeError("flag_domain must be positive");
  long long space = 1;
  for (int i = 0; i < num_leaves; ++i) space *= flag_domain;
  const long long total = static_cast<long long>(num_base_states) * space * 3;
  if (total > (1LL << 31) - 1) throw ShapeError("product state space too large");
  flag_space_ = static_cast<int>(space);
  num_product_states_ = static_cast<int>(total);
}

int ProductCodec::encode(int base_state, std::span<const int> flags,
                         FinalFlag fin) const {
  if (base_state < 0 || base_state >= num_base_states_) {
    throw ShapeError("base state out of range");
  }
  if (static_cast<int>(flags.size()) != num_leaves_) {
    throw ShapeError("flag count does not match leaf count");
  }
  int code = 0;
  for (int i = 0; i < num_leaves_; ++i) {
    if (flags[i] < 0 || flags[i] >= flag_domain_) {
      throw DomainError("leaf flag out of range");
    }
    code = code * flag_domain_ + flags[i];
  }
  return (base_state * flag_space_ + code) * 3 + static_cast<int>(fin);
}

void ProductCodec::decode(int index, int& base_state, std::span<int> flags,
                          FinalFlag& fin) const {
  if (index < 0 || index >= num_product_states_) {
    throw ShapeError("product state index out of range");
  }
  if (static_cast<int>(flags.size()) != num_leaves_) {
    throw ShapeError("flag count does not match leaf count");
  }
  fin = static_cast<FinalFlag>(index % 3);
  index /= 3;
  int code = index % flag_space_;
  base_state = index / flag_space_;
  for (int i = num_leaves_ - 1; i >= 0; --i) {
    flags[i] = code % flag_domain_;
    code /= flag_domain_;
  }
}

int ProductCodec::base_state_of(int index) const {
  if (index < 0 || index >= num_product_states_) {
    throw ShapeError("product state index out of range");
  }
  return (index / 3) / flag_space_;
}

AugmentedMdp build_augmented_mdp(const FiniteHorizonMdp& base,
                                 const CostFunction& base_objective,
                                 const StlFormula& formula) {
  if (!base.has_embedding()) {
    throw ShapeError("base MDP needs a state embedding for predicates");
  }
  const int wanted_horizon = horizon(formula) + 1;
  if (base.horizon() != wanted_horizon) {
    throw HorizonMismatchError("base horizon " + std::to_string(base.horizon()) +
                               " does not equal formula horizon + 1 = " +
                               std::to_string(wanted_horizon));
  }
  if (base_objective.horizon() != base.horizon() ||
      base_objective.num_states() != base.num_states() ||
      base_objective.num_actions() != base.num_actions()) {
    throw ShapeError("objective shape does not match base MDP");
  }

  const int S = base.num_states();
  const int A = base.num_actions();
  const int H = base.horizon();
  const int n = static_cast<int>(formula.leaves.size());
  const int T_in = formula.inner_window;
  const ProductCodec codec(S, n, T_in + 2);
  const int P = codec.num_product_states();

  // Leaf proposition truth per base state, fixed in time.
  std::vector<bool> leaf_truth(static_cast<size_t>(S) * n);
  for (int s = 0; s < S; ++s) {
    const auto point = base.embedding(s);
    for (int i = 0; i < n; ++i) {
      leaf_truth[static_cast<size_t>(s) * n + i] =
          eval_prop(*formula.leaves[i].prop, point);
    }
  }

  auto product =
      std::make_shared<FiniteHorizonMdp>(P, A, H, codec.encode(
          base.initial_state(), std::vector<int>(n, 0), FinalFlag::Pending));

  // Product states inherit the embedding of their base state so rollouts can
  // be monitored as signals directly.
  for (int x = 0; x < P; ++x) {
    const auto point = base.embedding(codec.base_state_of(x));
    product->set_embedding(x, std::vector<double>(point.begin(), point.end()));
  }

  std::vector<int> flags(n), new_flags(n);
  // vector<bool> packs bits and cannot back a span<const bool>.
  const std::unique_ptr<bool[]> bits(new bool[n]);
  std::vector<Outcome> row;
  for (int h = 0; h <= H; ++h) {
    for (int x = 0; x < P; ++x) {
      int s = 0;
      FinalFlag fin = FinalFlag::Pending;
      codec.decode(x, s, flags, fin);
      // The final flag is pending exactly until the first inner window has
      // closed. Combinations violating that never occur from the initial
      // state; give them self-loops so every row stays stochastic.
      if ((fin == FinalFlag::Pending) != (h <= T_in)) {
        for (int a = 0; a < A; ++a) product->set_row(h, x, a, {{x, 1.0}});
        continue;
      }
      for (int i = 0; i < n; ++i) {
        const auto& leaf = formula.leaves[i];
        new_flags[i] = update_inner_flag(flags[i],
                                         leaf_truth[static_cast<size_t>(s) * n + i],
                                         leaf.kind, leaf.window);
        bits[i] = sat_from_flag(new_flags[i], leaf.kind, leaf.window);
      }
      const bool sat_inner =
          combine_sat(*formula.inner, std::span<const bool>(bits.get(), n));
      const FinalFlag next_fin =
          update_final_flag(fin, sat_inner, h, T_in, formula.outer_kind);
      for (int a = 0; a < A; ++a) {
        const auto base_row = base.row(h, s, a);
        row.clear();
        row.reserve(base_row.size());
        for (const auto& o : base_row) {
          row.push_back({codec.encode(o.state, new_flags, next_fin), o.prob});
        }
        product->set_row(h, x, a, row);
      }
    }
  }

  CostFunction reach(H, P, A, 1.0);
  for (int x = 0; x < P; ++x) {
    if (codec.final_flag_of(x) == FinalFlag::Yes) {
      for (int a = 0; a < A; ++a) reach.at(H, x, a) = 1.0;
    }
  }

  CostFunction objective(H, P, A, base_objective.upper_bound());
  for (int h = 0; h <= H; ++h) {
    for (int x = 0; x < P; ++x) {
      const int s = codec.base_state_of(x);
      for (int a = 0; a < A; ++a) objective.at(h, x, a) = base_objective.at(h, s, a);
    }
  }

  return AugmentedMdp{std::move(product), codec, formula, std::move(reach),
                      std::move(objective)};
}

CmdpProblem make_satisfaction_cmdp(const AugmentedMdp& augmented, double p_thres) {
  if (!(p_thres >= 0.0 && p_thres <= 1.0)) {
    throw DomainError("satisfaction threshold must lie in [0, 1]");
  }
  const auto& mdp = *augmented.product;
  const int H = mdp.horizon();
  const int A = mdp.num_actions();
  // Complement of the reach indicator at the last stage: expected miss mass.
  CostFunction miss(H, mdp.num_states(), A, 1.0);
  for (int x = 0; x < mdp.num_states(); ++x) {
    if (augmented.codec.final_flag_of(x) != FinalFlag::Yes) {
      for (int a = 0; a < A; ++a) miss.at(H, x, a) = 1.0;
    }
  }
  return CmdpProblem{augmented.product, augmented.objective, std::move(miss),
                     1.0 - p_thres, ConstraintDirection::LessEqual};
}

Policy lift_policy(const ProductCodec& codec, const Policy& base_policy) {
  Policy lifted(base_policy.horizon(), codec.num_product_states(),
                base_policy.num_actions());
  for (int h = 0; h <= base_policy.horizon(); ++h) {
    for (int x = 0; x < codec.num_product_states(); ++x) {
      const int s = codec.base_state_of(x);
      for (int a = 0; a < base_policy.num_actions(); ++a) {
        lifted.prob(h, x, a) = base_policy.prob(h, s, a);
      }
    }
  }
  return lifted;
}

}  // namespace stlplan
