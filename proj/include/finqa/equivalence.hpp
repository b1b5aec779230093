#pragma once

// Gold-program evaluation: arguments are replaced by symbols, step references are inlined
// into a single expression tree, and two programs are equivalent when their trees agree
// up to argument order of add/multiply.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "finqa/dsl.hpp"
#include "finqa/error.hpp"
#include "finqa/executor.hpp"

namespace finqa {

struct Symbol {
  std::size_t id = 0;
  bool operator==(const Symbol&) const = default;
};

struct SymbolicNode;

/// Either a leaf symbol or a shared, immutable operation node.
using SymbolicExpr = std::variant<Symbol, std::shared_ptr<const SymbolicNode>>;

struct SymbolicNode {
  OperationKind op;
  std::array<SymbolicExpr, 2> children;
};

inline SymbolicExpr make_node(OperationKind op, SymbolicExpr lhs, SymbolicExpr rhs) {
  return std::make_shared<const SymbolicNode>(SymbolicNode{op, {std::move(lhs), std::move(rhs)}});
}

inline bool structurally_equal(const SymbolicExpr& a, const SymbolicExpr& b) {
  if (a.index() != b.index()) return false;
  if (const auto* sa = std::get_if<Symbol>(&a)) return *sa == std::get<Symbol>(b);
  const auto& na = *std::get<1>(a);
  const auto& nb = *std::get<1>(b);
  return na.op == nb.op && structurally_equal(na.children[0], nb.children[0]) &&
         structurally_equal(na.children[1], nb.children[1]);
}

/// Literal -> symbol numbering by first occurrence. Share one table across programs to
/// give identical literals the same symbol in both.
class SymbolTable {
 public:
  Symbol intern(const Argument& arg) {
    std::string key = literal_key(arg);
    auto [it, inserted] = ids_.try_emplace(key, keys_.size());
    if (inserted) {
      std::optional<double> v;
      if (key.starts_with("n:")) v = std::strtod(key.c_str() + 2, nullptr);
      values_.push_back(v);
      keys_.push_back(std::move(key));
    }
    return Symbol{it->second};
  }

  std::size_t size() const noexcept { return keys_.size(); }
  const std::string& key(std::size_t id) const { return keys_.at(id); }
  /// The numeric value behind a number or constant symbol; empty for names.
  std::optional<double> value(std::size_t id) const { return values_.at(id); }

  /// Normalized identity of a literal: numerals and constants by value (so "5,735",
  /// "5735" and const_5735 coincide), names by trimmed text.
  static std::string literal_key(const Argument& arg) {
    auto numeric = [](double v) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "n:%.17g", v);
      return std::string(buf);
    };
    if (const auto* n = std::get_if<NumberLiteral>(&arg)) return numeric(n->value);
    if (const auto* c = std::get_if<NamedConstant>(&arg)) return numeric(c->value);
    if (const auto* r = std::get_if<RowRef>(&arg)) {
      if (auto v = try_parse_financial_number(r->name)) return numeric(*v);
      return "r:" + std::string(detail::trim(r->name));
    }
    if (std::holds_alternative<NoneArg>(arg)) return "none";
    throw Error(Errc::ForwardStepRef, "step reference has no literal identity");
  }

 private:
  std::map<std::string, std::size_t> ids_;
  std::vector<std::string> keys_;
  std::vector<std::optional<double>> values_;
};

/// Inlines every step reference and returns the tree of the final step. Literals are
/// numbered in step/argument order, dead steps included.
inline SymbolicExpr symbolize(const Program& p, SymbolTable& table) {
  if (p.steps.empty()) throw Error(Errc::MalformedSyntax, "empty program");
  std::vector<SymbolicExpr> inlined;
  inlined.reserve(p.steps.size());
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    const Step& step = p.steps[s];
    std::array<SymbolicExpr, 2> kids;
    for (std::size_t k = 0; k < 2; ++k) {
      if (const auto* ref = std::get_if<StepRef>(&step.args[k])) {
        if (ref->index >= s) {
          throw Error(Errc::ForwardStepRef, "#" + std::to_string(ref->index) + " in step " + std::to_string(s));
        }
        kids[k] = inlined[ref->index];
      } else {
        kids[k] = table.intern(step.args[k]);
      }
    }
    inlined.push_back(make_node(step.op, std::move(kids[0]), std::move(kids[1])));
  }
  return inlined.back();
}

inline SymbolicExpr symbolize(const Program& p) {
  SymbolTable table;
  return symbolize(p, table);
}

struct CanonicalForm {
  std::string text;
  bool operator==(const CanonicalForm&) const = default;
  auto operator<=>(const CanonicalForm&) const = default;
};

namespace detail {

inline std::string canonical_text(const SymbolicExpr& e) {
  if (const auto* s = std::get_if<Symbol>(&e)) return "S" + std::to_string(s->id);
  const auto& node = *std::get<1>(e);
  std::string lhs = canonical_text(node.children[0]);
  std::string rhs = canonical_text(node.children[1]);
  if (is_commutative(node.op) && rhs < lhs) std::swap(lhs, rhs);
  std::string out(op_name(node.op));
  out += '(';
  out += lhs;
  out += ',';
  out += rhs;
  out += ')';
  return out;
}

}  // namespace detail

inline CanonicalForm canonicalize(const SymbolicExpr& e) { return {detail::canonical_text(e)}; }

inline bool programs_equivalent(const Program& a, const Program& b) {
  SymbolTable table;
  auto ea = symbolize(a, table);
  auto eb = symbolize(b, table);
  return canonicalize(ea) == canonicalize(eb);
}

// ---------------------------------------------------------------------------
// Randomized functional check

struct SymbolAssignment {
  std::vector<double> scalars;
  std::vector<std::array<double, 3>> rows;  // stand-in numeric view for table operations
};

/// Evaluates a symbolic tree under an assignment. Table operations aggregate the row
/// symbol's stand-in vector.
inline Answer evaluate_symbolic(const SymbolicExpr& e, const SymbolAssignment& values) {
  if (const auto* s = std::get_if<Symbol>(&e)) return values.scalars.at(s->id);
  const auto& node = *std::get<1>(e);
  if (is_table_op(node.op)) {
    const auto* row = std::get_if<Symbol>(&node.children[0]);
    if (!row) throw Error(Errc::ArityViolation, "table operation over a computed value");
    const auto& v = values.rows.at(row->id);
    switch (node.op) {
      case OperationKind::TableMax: return std::max({v[0], v[1], v[2]});
      case OperationKind::TableMin: return std::min({v[0], v[1], v[2]});
      case OperationKind::TableSum: return v[0] + v[1] + v[2];
      default: return (v[0] + v[1] + v[2]) / 3.0;
    }
  }
  auto number = [&](const SymbolicExpr& child) {
    Answer r = evaluate_symbolic(child, values);
    if (std::holds_alternative<Boolean>(r)) throw Error(Errc::BooleanInArithmetic, "greater used as operand");
    return std::get<double>(r);
  };
  const double a = number(node.children[0]);
  const double b = number(node.children[1]);
  switch (node.op) {
    case OperationKind::Add: return a + b;
    case OperationKind::Subtract: return a - b;
    case OperationKind::Multiply: return a * b;
    case OperationKind::Divide: return a / b;
    case OperationKind::Exp: return std::pow(a, b);
    case OperationKind::Greater: return Boolean{a > b};
    default: break;
  }
  throw Error(Errc::UnknownOperation, std::string(op_name(node.op)));
}

inline constexpr double kOracleLow = 1.5;
inline constexpr double kOracleHigh = 9.5;
inline constexpr double kOracleRelTol = 1e-6;
inline constexpr int kOracleMaxRedraws = 10;

/// Functional equivalence by random evaluation: every named symbol is drawn uniformly
/// from [1.5, 9.5], numbers and constants keep their values, and both trees must agree
/// in each trial. Deterministic given the seed.
inline bool random_eval_oracle(const Program& a, const Program& b, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(Errc::InvalidArgument, "trials must be >= 1");
  SymbolTable table;
  auto ea = symbolize(a, table);
  auto eb = symbolize(b, table);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> draw(kOracleLow, kOracleHigh);
  SymbolAssignment values;
  values.scalars.resize(table.size());
  values.rows.resize(table.size());

  auto finite = [](const Answer& r) {
    const auto* d = std::get_if<double>(&r);
    return !d || std::isfinite(*d);
  };

  for (int t = 0; t < trials; ++t) {
    Answer ra, rb;
    int attempt = 0;
    for (;; ++attempt) {
      for (std::size_t i = 0; i < table.size(); ++i) {
        values.scalars[i] = draw(rng);
        if (auto v = table.value(i)) values.scalars[i] = *v;
        for (double& x : values.rows[i]) x = draw(rng);
      }
      ra = evaluate_symbolic(ea, values);
      rb = evaluate_symbolic(eb, values);
      if (finite(ra) && finite(rb)) break;
      if (attempt == kOracleMaxRedraws) {
        throw Error(Errc::NonFiniteResult, "no finite evaluation after " +
                                               std::to_string(kOracleMaxRedraws) + " redraws");
      }
    }
    if (ra.index() != rb.index()) return false;
    if (const auto* ba = std::get_if<Boolean>(&ra)) {
      if (!(*ba == std::get<Boolean>(rb))) return false;
      continue;
    }
    const double x = std::get<double>(ra);
    const double y = std::get<double>(rb);
    const double scale = std::max({std::abs(x), std::abs(y), 1e-12});
    if (std::abs(x - y) > kOracleRelTol * scale) return false;
  }
  return true;
}

}  // namespace finqa
