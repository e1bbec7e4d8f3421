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

// Compiles a two-layer temporal formula into extra state so that
// satisfaction becomes a reachability event. Each inner leaf F[0,T] phi or
// G[0,T] phi gets a counter flag over {0, .., T+1} summarizing exactly
// enough history of phi to decide the leaf on every length-T+1 window, and
// one three-valued final flag folds leaf verdicts across the outer window.
// After the last step, the final flag equals 1 on a trajectory if and only
// if the trajectory satisfies the formula, so a cost charged at the last
// stage measures the satisfaction probability of a policy.

#pragma once

#include <memory>
#include <span>
#include <vector>

#include "stlplan/mdp.hpp"
#include "stlplan/stl_formula.hpp"

namespace stlplan {

// Verdict of the outer formula while a trajectory is still running:
// undecided until the first full inner window has elapsed, then the fold
// (conjunction for an outer G, disjunction for an outer F) of the inner
// verdicts seen so far.
enum class FinalFlag : int { No = 0, Yes = 1, Pending = 2 };

// Advances one leaf flag given whether the leaf proposition held at the
// step being left. For an F-leaf the flag counts how many upcoming windows
// the latest hit still covers; for a G-leaf it counts the current run of
// consecutive hits, saturating at window + 1. Throws DomainError if `flag`
// is outside {0, .., window + 1}.
int update_inner_flag(int flag, bool sat_prop, TemporalKind kind, int window);

// Verdict of a leaf on the window that just completed, read off the
// updated flag: an F-leaf is satisfied while its countdown is positive, a
// G-leaf exactly when its run is saturated at window + 1.
bool sat_from_flag(int flag, TemporalKind kind, int window);

// Folds per-leaf verdicts through the and/or structure of the inner
// formula. `leaf_bits` lists verdicts in left-to-right leaf order; throws
// ShapeError if the count does not match the number of leaves.
bool combine_sat(const InnerFormula& inner, std::span<const bool> leaf_bits);

// Advances the final flag at the transition out of step t. The verdict
// `sat_inner` is for the window ending at step t + 1 (computed from the
// updated leaf flags). `window` is the shared inner window, so the first
// verdict exists at t == window. Requires fin == Pending exactly while
// t <= window; throws DomainError otherwise.
FinalFlag update_final_flag(FinalFlag fin, bool sat_inner, int t, int window,
                            TemporalKind outer_kind);

// Bijection between dense product-state indices and
// (base state, leaf flags, final flag) tuples. Flags are mixed-radix with
// the first leaf most significant; the final flag is the fastest-varying
// digit. The codec covers the full rectangle so indices stay stable whether
// or not a combination is reachable.
class ProductCodec {
 public:
  ProductCodec(int num_base_states, int num_leaves, int flag_domain);

  int num_base_states() const { return num_base_states_; }
  int num_leaves() const { return num_leaves_; }
  int flag_domain() const { return flag_domain_; }
  int num_product_states() const { return num_product_states_; }

  int encode(int base_state, std::span<const int> flags, FinalFlag fin) const;
  void decode(int index, int& base_state, std::span<int> flags, FinalFlag& fin) const;

  int base_state_of(int index) const;
  FinalFlag final_flag_of(int index) const {
    return static_cast<FinalFlag>(index % 3);
  }

 private:
  int num_base_states_;
  int num_leaves_;
  int flag_domain_;
  int flag_space_;
  int num_product_states_;
};

// Product of a base MDP with the formula's flag machine, plus the two cost
// tables the constrained problem needs.
struct AugmentedMdp {
  std::shared_ptr<const FiniteHorizonMdp> product;
  ProductCodec codec;
  StlFormula formula;
  // Satisfaction indicator: 1 at the last stage in states whose final flag
  // is Yes, 0 elsewhere. Its expected value is the satisfaction probability.
  CostFunction reach;
  // Base objective lifted to product states.
  CostFunction objective;
};

// Builds the product. The base MDP must have an embedding (predicates read
// it) and horizon equal to horizon(formula) + 1: one step per signal point
// plus one closing step at which the last inner window resolves. Throws
// HorizonMismatchError otherwise. Flag combinations that cannot occur at
// any reachable time keep self-loop rows so the kernel stays stochastic.
AugmentedMdp build_augmented_mdp(const FiniteHorizonMdp& base,
                                 const CostFunction& base_objective,
                                 const StlFormula& formula);

// Constrained problem "minimize cost subject to satisfaction probability
// at least p_thres", stated in the <= form every solver here consumes: the
// constraint cost charges 1 at the last stage when the final flag is not
// Yes, and the threshold is 1 - p_thres. Requires p_thres in [0, 1].
CmdpProblem make_satisfaction_cmdp(const AugmentedMdp& augmented, double p_thres);

// Lifts a policy on base states to one on product states that ignores the
// flags, for comparing base and product behavior in tests.
Policy lift_policy(const ProductCodec& codec, const Policy& base_policy);

}  // namespace stlplan
