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

#include "stlplan/stl_formula.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

namespace stlplan {

PropFormula::Ptr PropFormula::make_true() {
  auto f = std::make_shared<PropFormula>();
  f->kind = Kind::True;
  return f;
}

PropFormula::Ptr PropFormula::make_pred(Predicate p) {
  if (p.dimension < 0) throw DomainError("predicate dimension must be nonnegative");
  auto f = std::make_shared<PropFormula>();
  f->kind = Kind::Pred;
  f->pred = p;
  return f;
}

PropFormula::Ptr PropFormula::make_not(Ptr child) {
  if (!child) throw DomainError("negation of null formula");
  auto f = std::make_shared<PropFormula>();
  f->kind = Kind::Not;
  f->lhs = std::move(child);
  return f;
}

PropFormula::Ptr PropFormula::make_and(Ptr l, Ptr r) {
  if (!l || !r) throw DomainError("conjunction of null formula");
  auto f = std::make_shared<PropFormula>();
  f->kind = Kind::And;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

InnerFormula::Ptr InnerFormula::make_leaf(TemporalKind k, int window,
                                          PropFormula::Ptr prop) {
  if (window < 0) throw FragmentError("temporal window must be nonnegative");
  if (!prop) throw DomainError("temporal leaf with null proposition");
  auto f = std::make_shared<InnerFormula>();
  f->kind = k == TemporalKind::Eventually ? Kind::Eventually : Kind::Always;
  f->window = window;
  f->prop = std::move(prop);
  return f;
}

InnerFormula::Ptr InnerFormula::make_and(Ptr l, Ptr r) {
  if (!l || !r) throw DomainError("conjunction of null formula");
  auto f = std::make_shared<InnerFormula>();
  f->kind = Kind::And;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

InnerFormula::Ptr InnerFormula::make_or(Ptr l, Ptr r) {
  if (!l || !r) throw DomainError("disjunction of null formula");
  auto f = std::make_shared<InnerFormula>();
  f->kind = Kind::Or;
  f->lhs = std::move(l);
  f->rhs = std::move(r);
  return f;
}

namespace {

void collect_leaves(const InnerFormula& f, std::vector<LeafInfo>& out) {
  if (f.is_leaf()) {
    out.push_back({f.leaf_kind(), f.window, f.prop});
    return;
  }
  collect_leaves(*f.lhs, out);
  collect_leaves(*f.rhs, out);
}

}  // namespace

StlFormula make_stl_formula(TemporalKind outer_kind, int outer_window,
                            InnerFormula::Ptr inner) {
  if (outer_window < 0) throw FragmentError("outer window must be nonnegative");
  if (!inner) throw DomainError("outer operator with null inner formula");
  StlFormula f;
  f.outer_kind = outer_kind;
  f.outer_window = outer_window;
  f.inner = std::move(inner);
  collect_leaves(*f.inner, f.leaves);
  f.inner_window = f.leaves.front().window;
  for (const auto& leaf : f.leaves) {
    if (leaf.window != f.inner_window) {
      throw FragmentError("all inner leaves must share one window");
    }
  }
  return f;
}

int horizon(const PropFormula&) { return 0; }

int horizon(const InnerFormula& f) {
  if (f.is_leaf()) return f.window + horizon(*f.prop);
  return std::max(horizon(*f.lhs), horizon(*f.rhs));
}

int horizon(const StlFormula& f) { return f.outer_window + horizon(*f.inner); }

bool eval_prop(const PropFormula& f, std::span<const double> point) {
  switch (f.kind) {
    case PropFormula::Kind::True:
      return true;
    case PropFormula::Kind::Pred: {
      const auto& p = f.pred;
      if (p.dimension >= static_cast<int>(point.size())) {
        throw DimensionError("predicate dimension " + std::to_string(p.dimension) +
                             " out of range for point of dimension " +
                             std::to_string(point.size()));
      }
      const double v = point[p.dimension];
      return p.comparator == Comparator::Less ? v < p.threshold : v > p.threshold;
    }
    case PropFormula::Kind::Not:
      return !eval_prop(*f.lhs, point);
    case PropFormula::Kind::And:
      return eval_prop(*f.lhs, point) && eval_prop(*f.rhs, point);
  }
  throw DomainError("corrupt propositional formula node");
}

namespace {

// Satisfaction of an inner formula on the window starting at step t.
bool eval_inner_at(const InnerFormula& f, const Signal& sig, int t) {
  switch (f.kind) {
    case InnerFormula::Kind::Eventually:
      for (int u = t; u <= t + f.window; ++u) {
        if (eval_prop(*f.prop, sig.points[u])) return true;
      }
      return false;
    case InnerFormula::Kind::Always:
      for (int u = t; u <= t + f.window; ++u) {
        if (!eval_prop(*f.prop, sig.points[u])) return false;
      }
      return true;
    case InnerFormula::Kind::And:
      return eval_inner_at(*f.lhs, sig, t) && eval_inner_at(*f.rhs, sig, t);
    case InnerFormula::Kind::Or:
      return eval_inner_at(*f.lhs, sig, t) || eval_inner_at(*f.rhs, sig, t);
  }
  throw DomainError("corrupt inner formula node");
}

}  // namespace

bool monitor(const StlFormula& f, const Signal& signal) {
  const int needed = horizon(f) + 1;
  if (signal.size() < needed) {
    throw SignalTooShortError("signal has " + std::to_string(signal.size()) +
                              " points, needs " + std::to_string(needed));
  }
  if (f.outer_kind == TemporalKind::Eventually) {
    for (int t = 0; t <= f.outer_window; ++t) {
      if (eval_inner_at(*f.inner, signal, t)) return true;
    }
    return false;
  }
  for (int t = 0; t <= f.outer_window; ++t) {
    if (!eval_inner_at(*f.inner, signal, t)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Parsing.

namespace {

struct Lexer {
  const std::string& text;
  size_t pos = 0;

  explicit Lexer(const std::string& t) : text(t) {}

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= text.size();
  }

  char peek() {
    skip_ws();
    return pos < text.size() ? text[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < text.size() && text[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) {
      throw SyntaxError(std::string("expected '") + c + "' at position " +
                        std::to_string(pos) + " in formula");
    }
  }

  // Identifier: letters, digits, underscores; starts with letter or '_'.
  std::string ident() {
    skip_ws();
    size_t start = pos;
    if (pos < text.size() &&
        (std::isalpha(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
      ++pos;
      while (pos < text.size() &&
             (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
        ++pos;
      }
    }
    if (start == pos) {
      throw SyntaxError("expected identifier at position " + std::to_string(pos));
    }
    return text.substr(start, pos - start);
  }

  double number() {
    skip_ws();
    size_t start = pos;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
    while (pos < text.size() &&
           (std::isdigit(static_cast<unsigned char>(text[pos])) || text[pos] == '.' ||
            text[pos] == 'e' || text[pos] == 'E' ||
            ((text[pos] == '+' || text[pos] == '-') && pos > start &&
             (text[pos - 1] == 'e' || text[pos - 1] == 'E')))) {
      ++pos;
    }
    if (start == pos) {
      throw SyntaxError("expected number at position " + std::to_string(pos));
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + pos, value);
    if (ec != std::errc() || ptr != text.data() + pos) {
      throw SyntaxError("malformed number at position " + std::to_string(start));
    }
    return value;
  }

  // True when an F/G temporal operator starts here (letter followed by '[').
  bool at_temporal_op() {
    skip_ws();
    if (pos >= text.size() || (text[pos] != 'F' && text[pos] != 'G')) return false;
    size_t look = pos + 1;
    while (look < text.size() && std::isspace(static_cast<unsigned char>(text[look]))) ++look;
    return look < text.size() && text[look] == '[';
  }
};

struct Parser {
  Lexer lex;
  const std::vector<std::string>& dims;

  Parser(const std::string& text, const std::vector<std::string>& dimensions)
      : lex(text), dims(dimensions) {}

  int dim_index(const std::string& name) {
    auto it = std::find(dims.begin(), dims.end(), name);
    if (it == dims.end()) {
      throw DimensionError("unknown coordinate '" + name + "' in formula");
    }
    return static_cast<int>(it - dims.begin());
  }

  // Interval suffix [0, T] with integer endpoints and zero lower bound.
  int interval() {
    lex.expect('[');
    const double lo = lex.number();
    lex.expect(',');
    const double hi = lex.number();
    lex.expect(']');
    if (lo != std::floor(lo) || hi != std::floor(hi)) {
      throw FragmentError("interval endpoints must be integers");
    }
    if (lo != 0.0) throw FragmentError("interval lower bound must be 0");
    if (hi < 0.0) throw FragmentError("interval upper bound must be nonnegative");
    return static_cast<int>(hi);
  }

  TemporalKind temporal_kind() {
    const char c = lex.peek();
    if (c == 'F') {
      ++lex.pos;
      return TemporalKind::Eventually;
    }
    if (c == 'G') {
      ++lex.pos;
      return TemporalKind::Always;
    }
    throw SyntaxError("expected temporal operator F or G at position " +
                      std::to_string(lex.pos));
  }

  // prop := prop_and ('|' prop_and)*    disjunction rewritten as !(!a & !b)
  PropFormula::Ptr prop() {
    auto f = prop_and();
    while (lex.consume('|')) {
      auto r = prop_and();
      f = PropFormula::make_not(
          PropFormula::make_and(PropFormula::make_not(f), PropFormula::make_not(r)));
    }
    return f;
  }

  PropFormula::Ptr prop_and() {
    auto f = prop_unary();
    while (lex.consume('&')) f = PropFormula::make_and(f, prop_unary());
    return f;
  }

  PropFormula::Ptr prop_unary() {
    if (lex.at_temporal_op()) {
      throw FragmentError("temporal operator nested deeper than two layers");
    }
    if (lex.consume('!')) return PropFormula::make_not(prop_unary());
    if (lex.consume('(')) {
      auto f = prop();
      lex.expect(')');
      return f;
    }
    const std::string name = lex.ident();
    if (name == "true") return PropFormula::make_true();
    Predicate p;
    p.dimension = dim_index(name);
    if (lex.consume('<')) {
      p.comparator = Comparator::Less;
    } else if (lex.consume('>')) {
      p.comparator = Comparator::Greater;
    } else {
      throw SyntaxError("expected '<' or '>' after coordinate '" + name + "'");
    }
    p.threshold = lex.number();
    return PropFormula::make_pred(p);
  }

  // inner := inner_and ('|' inner_and)*
  InnerFormula::Ptr inner() {
    auto f = inner_and();
    while (lex.consume('|')) f = InnerFormula::make_or(f, inner_and());
    return f;
  }

  InnerFormula::Ptr inner_and() {
    auto f = inner_term();
    while (lex.consume('&')) f = InnerFormula::make_and(f, inner_term());
    return f;
  }

  InnerFormula::Ptr inner_term() {
    if (lex.at_temporal_op()) {
      const TemporalKind k = temporal_kind();
      const int window = interval();
      return InnerFormula::make_leaf(k, window, prop_unary());
    }
    if (lex.consume('(')) {
      auto f = inner();
      lex.expect(')');
      return f;
    }
    throw SyntaxError("expected temporal leaf or '(' at position " +
                      std::to_string(lex.pos));
  }
};

}  // namespace

StlFormula parse_formula(const std::string& text,
                         const std::vector<std::string>& dimensions) {
  Parser parser(text, dimensions);
  if (!parser.lex.at_temporal_op()) {
    throw SyntaxError("formula must start with an outer F[0,T] or G[0,T]");
  }
  const TemporalKind outer = parser.temporal_kind();
  const int outer_window = parser.interval();
  auto inner = parser.inner();
  if (!parser.lex.eof()) {
    throw SyntaxError("unexpected trailing text at position " +
                      std::to_string(parser.lex.pos));
  }
  return make_stl_formula(outer, outer_window, inner);
}

// ---------------------------------------------------------------------------
// Formatting.

namespace {

std::string format_number(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_prop(const PropFormula& f, const std::vector<std::string>& dims) {
  switch (f.kind) {
    case PropFormula::Kind::True:
      return "true";
    case PropFormula::Kind::Pred: {
      const auto& p = f.pred;
      const std::string name = p.dimension < static_cast<int>(dims.size())
                                   ? dims[p.dimension]
                                   : "#" + std::to_string(p.dimension);
      return name + (p.comparator == Comparator::Less ? " < " : " > ") +
             format_number(p.threshold);
    }
    case PropFormula::Kind::Not: {
      const auto& child = *f.lhs;
      if (child.kind == PropFormula::Kind::True || child.kind == PropFormula::Kind::Not) {
        return "!" + format_prop(child, dims);
      }
      return "!(" + format_prop(child, dims) + ")";
    }
    case PropFormula::Kind::And: {
      // '&' parses left-associated; parenthesize a right child conjunction.
      std::string l = format_prop(*f.lhs, dims);
      std::string r = format_prop(*f.rhs, dims);
      if (f.rhs->kind == PropFormula::Kind::And) r = "(" + r + ")";
      return l + " & " + r;
    }
  }
  throw DomainError("corrupt propositional formula node");
}

std::string format_leaf_arg(const PropFormula& f, const std::vector<std::string>& dims) {
  if (f.kind == PropFormula::Kind::And) return "(" + format_prop(f, dims) + ")";
  return format_prop(f, dims);
}

std::string format_inner(const InnerFormula& f, const std::vector<std::string>& dims) {
  switch (f.kind) {
    case InnerFormula::Kind::Eventually:
      return "F[0," + std::to_string(f.window) + "] " + format_leaf_arg(*f.prop, dims);
    case InnerFormula::Kind::Always:
      return "G[0," + std::to_string(f.window) + "] " + format_leaf_arg(*f.prop, dims);
    case InnerFormula::Kind::And: {
      std::string l = format_inner(*f.lhs, dims);
      std::string r = format_inner(*f.rhs, dims);
      if (f.lhs->kind == InnerFormula::Kind::Or) l = "(" + l + ")";
      if (f.rhs->kind == InnerFormula::Kind::And || f.rhs->kind == InnerFormula::Kind::Or) {
        r = "(" + r + ")";
      }
      return l + " & " + r;
    }
    case InnerFormula::Kind::Or: {
      std::string l = format_inner(*f.lhs, dims);
      std::string r = format_inner(*f.rhs, dims);
      if (f.rhs->kind == InnerFormula::Kind::Or) r = "(" + r + ")";
      return l + " | " + r;
    }
  }
  throw DomainError("corrupt inner formula node");
}

}  // namespace

std::string format_formula(const StlFormula& f, const std::vector<std::string>& dims) {
  const std::string op = f.outer_kind == TemporalKind::Eventually ? "F" : "G";
  std::string inner = format_inner(*f.inner, dims);
  if (!f.inner->is_leaf()) inner = "(" + inner + ")";
  return op + "[0," + std::to_string(f.outer_window) + "] " + inner;
}

// ---------------------------------------------------------------------------
// JSON round trip.

namespace {

nlohmann::ordered_json prop_to_json(const PropFormula& f) {
  nlohmann::ordered_json j;
  switch (f.kind) {
    case PropFormula::Kind::True:
      j["kind"] = "true";
      break;
    case PropFormula::Kind::Pred:
      j["kind"] = "pred";
      j["dim"] = f.pred.dimension;
      j["cmp"] = f.pred.comparator == Comparator::Less ? "<" : ">";
      j["threshold"] = f.pred.threshold;
      break;
    case PropFormula::Kind::Not:
      j["kind"] = "not";
      j["child"] = prop_to_json(*f.lhs);
      break;
    case PropFormula::Kind::And:
      j["kind"] = "and";
      j["lhs"] = prop_to_json(*f.lhs);
      j["rhs"] = prop_to_json(*f.rhs);
      break;
  }
  return j;
}

PropFormula::Ptr prop_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "true") return PropFormula::make_true();
  if (kind == "pred") {
    Predicate p;
    p.dimension = j.at("dim").get<int>();
    p.comparator = j.at("cmp").get<std::string>() == "<" ? Comparator::Less
                                                         : Comparator::Greater;
    p.threshold = j.at("threshold").get<double>();
    return PropFormula::make_pred(p);
  }
  if (kind == "not") return PropFormula::make_not(prop_from_json(j.at("child")));
  if (kind == "and") {
    return PropFormula::make_and(prop_from_json(j.at("lhs")),
                                 prop_from_json(j.at("rhs")));
  }
  throw DomainError("unknown propositional node kind '" + kind + "'");
}

nlohmann::ordered_json inner_to_json(const InnerFormula& f) {
  nlohmann::ordered_json j;
  switch (f.kind) {
    case InnerFormula::Kind::Eventually:
    case InnerFormula::Kind::Always:
      j["kind"] = f.kind == InnerFormula::Kind::Eventually ? "eventually" : "always";
      j["window"] = f.window;
      j["prop"] = prop_to_json(*f.prop);
      break;
    case InnerFormula::Kind::And:
    case InnerFormula::Kind::Or:
      j["kind"] = f.kind == InnerFormula::Kind::And ? "and" : "or";
      j["lhs"] = inner_to_json(*f.lhs);
      j["rhs"] = inner_to_json(*f.rhs);
      break;
  }
  return j;
}

InnerFormula::Ptr inner_from_json(const nlohmann::json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "eventually" || kind == "always") {
    return InnerFormula::make_leaf(
        kind == "eventually" ? TemporalKind::Eventually : TemporalKind::Always,
        j.at("window").get<int>(), prop_from_json(j.at("prop")));
  }
  if (kind == "and") {
    return InnerFormula::make_and(inner_from_json(j.at("lhs")),
                                  inner_from_json(j.at("rhs")));
  }
  if (kind == "or") {
    return InnerFormula::make_or(inner_from_json(j.at("lhs")),
                                 inner_from_json(j.at("rhs")));
  }
  throw DomainError("unknown inner node kind '" + kind + "'");
}

}  // namespace

nlohmann::ordered_json formula_to_json(const StlFormula& f) {
  nlohmann::ordered_json j;
  j["outer"] = f.outer_kind == TemporalKind::Eventually ? "eventually" : "always";
  j["window"] = f.outer_window;
  j["inner"] = inner_to_json(*f.inner);
  return j;
}

StlFormula formula_from_json(const nlohmann::json& j) {
  const std::string outer = j.at("outer").get<std::string>();
  return make_stl_formula(
      outer == "eventually" ? TemporalKind::Eventually : TemporalKind::Always,
      j.at("window").get<int>(), inner_from_json(j.at("inner")));
}

}  // namespace stlplan
