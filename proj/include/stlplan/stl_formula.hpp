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

// Bounded temporal formulas over discrete-time signals, restricted to two
// temporal layers: one outer operator F/G over [0, T_o] applied to a
// boolean combination of inner F/G leaves that share a common window
// [0, T_in]. Leaves test propositional formulas over threshold predicates
// on individual signal coordinates. This fragment is exactly what the flag
// construction in stl_product.hpp can track with finitely many counters.

#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "nlohmann/json.hpp"
#include "stlplan/errors.hpp"

namespace stlplan {

enum class Comparator { Less, Greater };

// Strict threshold test on one coordinate of a signal point.
struct Predicate {
  int dimension = 0;
  Comparator comparator = Comparator::Greater;
  double threshold = 0.0;
};

// Propositional layer: true | predicate | negation | conjunction.
// Nodes are immutable after construction and shared by pointer.
struct PropFormula {
  enum class Kind { True, Pred, Not, And };
  using Ptr = std::shared_ptr<const PropFormula>;

  Kind kind = Kind::True;
  Predicate pred;   // Kind::Pred only.
  Ptr lhs, rhs;     // Kind::Not uses lhs; Kind::And uses both.

  static Ptr make_true();
  static Ptr make_pred(Predicate p);
  static Ptr make_not(Ptr f);
  static Ptr make_and(Ptr l, Ptr r);
};

enum class TemporalKind { Eventually, Always };

// Inner layer: conjunctions and disjunctions of temporal leaves
// F[0,T] phi / G[0,T] phi.
struct InnerFormula {
  enum class Kind { Eventually, Always, And, Or };
  using Ptr = std::shared_ptr<const InnerFormula>;

  Kind kind = Kind::Eventually;
  int window = 0;         // Leaf kinds only.
  PropFormula::Ptr prop;  // Leaf kinds only.
  Ptr lhs, rhs;           // And / Or only.

  static Ptr make_leaf(TemporalKind k, int window, PropFormula::Ptr prop);
  static Ptr make_and(Ptr l, Ptr r);
  static Ptr make_or(Ptr l, Ptr r);

  bool is_leaf() const { return kind == Kind::Eventually || kind == Kind::Always; }
  TemporalKind leaf_kind() const {
    return kind == Kind::Eventually ? TemporalKind::Eventually : TemporalKind::Always;
  }
};

// One temporal leaf of the inner formula, in left-to-right order.
struct LeafInfo {
  TemporalKind kind = TemporalKind::Eventually;
  int window = 0;
  PropFormula::Ptr prop;
};

// Complete two-layer formula. `leaves` lists the inner temporal leaves
// left-to-right; every leaf shares `inner_window`.
struct StlFormula {
  TemporalKind outer_kind = TemporalKind::Eventually;
  int outer_window = 0;
  InnerFormula::Ptr inner;
  std::vector<LeafInfo> leaves;
  int inner_window = 0;
};

// Builds a formula from components, collecting leaves and checking the
// common-window requirement. Throws FragmentError on a window mismatch or
// negative window.
StlFormula make_stl_formula(TemporalKind outer_kind, int outer_window,
                            InnerFormula::Ptr inner);

// Number of extra steps, beyond the step it is evaluated at, that a formula
// can look ahead. A signal with points 0..horizon suffices to decide
// satisfaction at step 0.
int horizon(const PropFormula& f);
int horizon(const InnerFormula& f);
int horizon(const StlFormula& f);

// Truth value of a propositional formula at one signal point. Throws
// DimensionError if a predicate indexes past the end of the point.
bool eval_prop(const PropFormula& f, std::span<const double> point);

// Finite discrete-time signal; one point per step, all of equal dimension.
struct Signal {
  std::vector<std::vector<double>> points;

  int size() const { return static_cast<int>(points.size()); }
};

// Whether the signal satisfies the formula at step 0. The signal must have
// at least horizon(f) + 1 points; extra points are ignored. Direct
// evaluation of the semantics, independent of the flag construction, so it
// doubles as the reference oracle for it.
bool monitor(const StlFormula& f, const Signal& signal);

// Parses the concrete syntax, e.g. "F[0,7] G[0,1] (x > 4 & y > 4)".
// `dimensions` gives the coordinate name for each embedding dimension.
// Disjunction inside a leaf proposition is rewritten with negation and
// conjunction; everything else parses structurally. Throws SyntaxError for
// malformed text and FragmentError for formulas outside the fragment.
StlFormula parse_formula(const std::string& text,
                         const std::vector<std::string>& dimensions);

// Canonical text form; parse_formula(format_formula(f)) reproduces f.
std::string format_formula(const StlFormula& f,
                           const std::vector<std::string>& dimensions);

// Kind-tagged JSON tree, structurally round-trippable.
nlohmann::ordered_json formula_to_json(const StlFormula& f);
StlFormula formula_from_json(const nlohmann::json& j);

}  // namespace stlplan
