#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "finqa/dsl.hpp"
#include "finqa/error.hpp"

namespace finqa {

struct TableRow {
  std::string name;
  std::vector<std::string> cells;
};

struct FinTable {
  std::vector<std::string> header;
  std::vector<TableRow> rows;

  /// Exact match after trimming, then a case-insensitive fallback.
  const TableRow* find_row(std::string_view name) const {
    std::string_view key = detail::trim(name);
    for (const auto& r : rows)
      if (detail::trim(r.name) == key) return &r;
    auto lower_eq = [](std::string_view a, std::string_view b) {
      return a.size() == b.size() &&
             std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
             });
    };
    for (const auto& r : rows)
      if (lower_eq(detail::trim(r.name), key)) return &r;
    return nullptr;
  }
};

/// Cells of the row that parse as financial numbers, in order.
inline std::vector<double> numeric_view(const TableRow& row) {
  std::vector<double> out;
  for (const auto& c : row.cells)
    if (auto v = try_parse_financial_number(c)) out.push_back(*v);
  return out;
}

struct Boolean {
  bool value = false;
  std::string_view text() const noexcept { return value ? "yes" : "no"; }
  bool operator==(const Boolean&) const = default;
};

using Answer = std::variant<double, Boolean>;

inline std::string to_string(const Answer& a) {
  if (const auto* b = std::get_if<Boolean>(&a)) return std::string(b->text());
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", std::get<double>(a));
  return buf;
}

struct ExecContext {
  const FinTable& table;
  std::vector<Answer> memory;
};

inline constexpr double kDivisionEpsilon = 1e-12;

inline double resolve_argument(const Argument& arg, const ExecContext& ctx) {
  struct Visitor {
    const ExecContext& ctx;
    double operator()(const NumberLiteral& a) const { return a.value; }
    double operator()(const NamedConstant& a) const { return a.value; }
    double operator()(const StepRef& a) const {
      if (a.index >= ctx.memory.size()) {
        throw Error(Errc::MemoryOutOfRange, "#" + std::to_string(a.index) + " with " +
                                                std::to_string(ctx.memory.size()) +
                                                " completed steps");
      }
      const Answer& v = ctx.memory[a.index];
      if (std::holds_alternative<Boolean>(v)) {
        throw Error(Errc::BooleanInArithmetic, "#" + std::to_string(a.index) + " is a yes/no value");
      }
      return std::get<double>(v);
    }
    double operator()(const RowRef& a) const {
      throw Error(Errc::UnresolvedRowRef, "'" + a.name + "' is not a number");
    }
    double operator()(const NoneArg&) const {
      throw Error(Errc::ArityViolation, "none has no numeric value");
    }
  };
  return std::visit(Visitor{ctx}, arg);
}

namespace detail {

inline double checked(double v, OperationKind op) {
  if (!std::isfinite(v)) {
    throw Error(Errc::NonFiniteResult, std::string(op_name(op)) + " produced a non-finite value");
  }
  return v;
}

inline double table_aggregate(OperationKind op, const Argument& row_arg, const FinTable& table) {
  const auto* ref = std::get_if<RowRef>(&row_arg);
  if (!ref) throw Error(Errc::ArityViolation, "table operation needs a row name");
  const TableRow* row = table.find_row(ref->name);
  if (!row) throw Error(Errc::RowNotFound, "'" + ref->name + "'");
  auto values = numeric_view(*row);
  if (values.empty()) throw Error(Errc::EmptyNumericRow, "'" + ref->name + "'");
  switch (op) {
    case OperationKind::TableMax: return *std::max_element(values.begin(), values.end());
    case OperationKind::TableMin: return *std::min_element(values.begin(), values.end());
    case OperationKind::TableSum: return std::accumulate(values.begin(), values.end(), 0.0);
    case OperationKind::TableAverage:
      return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    default: break;
  }
  throw Error(Errc::ArityViolation, "not a table operation");
}

}  // namespace detail

/// Evaluates one step against the context; does not append to memory.
inline Answer execute_step(const Step& step, const ExecContext& ctx) {
  if (is_table_op(step.op)) {
    return detail::checked(detail::table_aggregate(step.op, step.args[0], ctx.table), step.op);
  }
  const double a = resolve_argument(step.args[0], ctx);
  const double b = resolve_argument(step.args[1], ctx);
  switch (step.op) {
    case OperationKind::Add: return detail::checked(a + b, step.op);
    case OperationKind::Subtract: return detail::checked(a - b, step.op);
    case OperationKind::Multiply: return detail::checked(a * b, step.op);
    case OperationKind::Divide:
      if (std::abs(b) < kDivisionEpsilon) throw Error(Errc::DivisionByZero, "divisor " + std::to_string(b));
      return detail::checked(a / b, step.op);
    case OperationKind::Exp: return detail::checked(std::pow(a, b), step.op);
    case OperationKind::Greater: return Boolean{a > b};
    default: break;
  }
  throw Error(Errc::UnknownOperation, std::string(op_name(step.op)));
}

inline Answer execute_program(const Program& p, const FinTable& table) {
  if (p.steps.empty()) throw Error(Errc::MalformedSyntax, "empty program");
  ExecContext ctx{table, {}};
  ctx.memory.reserve(p.steps.size());
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    Answer v = execute_step(p.steps[i], ctx);
    if (std::holds_alternative<Boolean>(v) && i + 1 != p.steps.size()) {
      throw Error(Errc::BooleanInArithmetic,
                  "yes/no value produced at step " + std::to_string(i) + " before the final step");
    }
    ctx.memory.push_back(v);
  }
  return ctx.memory.back();
}

inline Answer execute_program(const Program& p) {
  static const FinTable empty;
  return execute_program(p, empty);
}

// ---------------------------------------------------------------------------
// Answer comparison

struct Tolerances {
  double abs_tol = 1e-5;
  double rel_tol = 1e-4;
  bool percent_lenient = false;
};

/// Gold answers arrive as numbers or strings ("yes", "14.1%", "$ 5,735").
inline Answer parse_gold_answer(std::string_view text) {
  std::string_view t = detail::trim(text);
  if (t == "yes") return Boolean{true};
  if (t == "no") return Boolean{false};
  return parse_financial_number(t);
}

namespace detail {

inline double round5(double v) { return std::round(v * 1e5) / 1e5; }

inline bool numeric_match(double pred, double gold, const Tolerances& tol) {
  const double p = round5(pred);
  const double g = round5(gold);
  return std::abs(p - g) <= std::max(tol.abs_tol, tol.rel_tol * std::abs(g));
}

}  // namespace detail

inline bool compare_answers(const Answer& pred, const Answer& gold, const Tolerances& tol = {}) {
  if (tol.abs_tol < 0 || tol.rel_tol < 0) throw Error(Errc::InvalidArgument, "negative tolerance");
  const auto* pb = std::get_if<Boolean>(&pred);
  const auto* gb = std::get_if<Boolean>(&gold);
  if (pb && gb) return *pb == *gb;
  if (pb || gb) throw Error(Errc::TypeMismatch, "yes/no answer compared with a number");
  const double p = std::get<double>(pred);
  const double g = std::get<double>(gold);
  if (detail::numeric_match(p, g, tol)) return true;
  if (tol.percent_lenient) {
    return detail::numeric_match(p * 100.0, g, tol) || detail::numeric_match(p / 100.0, g, tol);
  }
  return false;
}

inline bool compare_answers(const Answer& pred, std::string_view gold, const Tolerances& tol = {}) {
  return compare_answers(pred, parse_gold_answer(gold), tol);
}

}  // namespace finqa
