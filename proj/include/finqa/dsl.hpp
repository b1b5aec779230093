#pragma once

// Reasoning-program surface syntax: `op(arg, arg), op(arg, arg), ...`
//
// Arguments are classified at parse time:
//   numerals            -> NumberLiteral   (raw text kept for round-tripping)
//   const_<digits>      -> NamedConstant   (const_m1 is -1)
//   #<n>                -> StepRef
//   none                -> NoneArg
//   anything else       -> RowRef          (row names, or symbolic names like k4)

#include <array>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "finqa/error.hpp"

namespace finqa {

enum class OperationKind : std::uint8_t {
  Add,
  Subtract,
  Multiply,
  Divide,
  Greater,
  Exp,
  TableMax,
  TableMin,
  TableSum,
  TableAverage,
};

inline constexpr std::array<OperationKind, 10> kAllOperations = {
    OperationKind::Add,      OperationKind::Subtract, OperationKind::Multiply,
    OperationKind::Divide,   OperationKind::Greater,  OperationKind::Exp,
    OperationKind::TableMax, OperationKind::TableMin, OperationKind::TableSum,
    OperationKind::TableAverage};

constexpr std::string_view op_name(OperationKind op) noexcept {
  switch (op) {
    case OperationKind::Add: return "add";
    case OperationKind::Subtract: return "subtract";
    case OperationKind::Multiply: return "multiply";
    case OperationKind::Divide: return "divide";
    case OperationKind::Greater: return "greater";
    case OperationKind::Exp: return "exp";
    case OperationKind::TableMax: return "table-max";
    case OperationKind::TableMin: return "table-min";
    case OperationKind::TableSum: return "table-sum";
    case OperationKind::TableAverage: return "table-average";
  }
  return "?";
}

constexpr bool is_table_op(OperationKind op) noexcept {
  return op == OperationKind::TableMax || op == OperationKind::TableMin ||
         op == OperationKind::TableSum || op == OperationKind::TableAverage;
}

constexpr bool is_commutative(OperationKind op) noexcept {
  return op == OperationKind::Add || op == OperationKind::Multiply;
}

/// Looks up an operation by name. Accepts the underscore spelling (`table_max`) as an alias.
inline std::optional<OperationKind> op_from_name(std::string_view name) noexcept {
  for (auto op : kAllOperations) {
    std::string_view canonical = op_name(op);
    if (name == canonical) return op;
    if (name.size() == canonical.size() && is_table_op(op)) {
      bool alias = true;
      for (std::size_t i = 0; i < name.size(); ++i) {
        char expect = canonical[i] == '-' ? '_' : canonical[i];
        if (name[i] != expect) {
          alias = false;
          break;
        }
      }
      if (alias) return op;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Arguments

struct NumberLiteral {
  double value = 0.0;
  std::string raw;
  bool operator==(const NumberLiteral&) const = default;
};

struct NamedConstant {
  std::string name;
  double value = 0.0;
  bool operator==(const NamedConstant&) const = default;
};

struct StepRef {
  std::size_t index = 0;
  bool operator==(const StepRef&) const = default;
};

struct RowRef {
  std::string name;
  bool operator==(const RowRef&) const = default;
};

struct NoneArg {
  bool operator==(const NoneArg&) const = default;
};

using Argument = std::variant<NumberLiteral, NamedConstant, StepRef, RowRef, NoneArg>;

struct Step {
  OperationKind op = OperationKind::Add;
  std::array<Argument, 2> args;
  bool operator==(const Step&) const = default;
};

struct Program {
  std::vector<Step> steps;
  bool operator==(const Program&) const = default;
};

// ---------------------------------------------------------------------------
// Lexical helpers

namespace detail {

inline bool is_space(char c) noexcept {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool is_digit(char c) noexcept { return c >= '0' && c <= '9'; }

/// Plain numeral: optional minus, digits with optional fraction (or a bare fraction),
/// optional exponent.
inline bool is_numeral(std::string_view s) noexcept {
  std::size_t i = 0;
  if (i < s.size() && s[i] == '-') ++i;
  std::size_t int_digits = 0;
  while (i < s.size() && is_digit(s[i])) ++i, ++int_digits;
  std::size_t frac_digits = 0;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && is_digit(s[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < s.size() && is_digit(s[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == s.size();
}

/// Parses a numeral accepted by is_numeral; nullopt when out of double range.
inline std::optional<double> numeral_value(std::string_view s) noexcept {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool all_digits(std::string_view s) noexcept {
  if (s.empty()) return false;
  for (char c : s)
    if (!is_digit(c)) return false;
  return true;
}

}  // namespace detail

/// Parses a financial-format numeral: currency symbols ($, £, €), thousands separators,
/// a trailing percent sign (kept unscaled) and accounting parentheses (negation).
inline double parse_financial_number(std::string_view text) {
  std::string_view trimmed = detail::trim(text);
  if (trimmed.empty()) throw Error(Errc::NotANumber, "empty text");

  std::string s;
  s.reserve(trimmed.size());
  for (std::size_t i = 0; i < trimmed.size();) {
    if (trimmed.substr(i, 2) == "\xC2\xA3") {  // £
      i += 2;
    } else if (trimmed.substr(i, 3) == "\xE2\x82\xAC") {  // €
      i += 3;
    } else {
      char c = trimmed[i++];
      if (c != '$' && c != ',' && !detail::is_space(c)) s.push_back(c);
    }
  }

  bool negate = false;
  std::string_view body = s;
  if (body.size() >= 2 && body.front() == '(' && body.back() == ')') {
    negate = true;
    body = body.substr(1, body.size() - 2);
  }
  if (!body.empty() && body.back() == '%') body.remove_suffix(1);
  if (!detail::is_numeral(body)) {
    throw Error(Errc::NotANumber, "no numeral in '" + std::string(trimmed) + "'");
  }
  auto value = detail::numeral_value(body);
  if (!value) throw Error(Errc::NotANumber, "numeral out of range: '" + std::string(trimmed) + "'");
  return negate ? -*value : *value;
}

/// Non-throwing variant, used for numeric views of table rows.
inline std::optional<double> try_parse_financial_number(std::string_view text) noexcept {
  try {
    return parse_financial_number(text);
  } catch (const Error&) {
    return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline Argument classify_argument(std::string_view text, std::size_t step_index) {
  if (text == "none") return NoneArg{};
  if (text.front() == '#') {
    std::string_view digits = text.substr(1);
    if (!all_digits(digits)) {
      throw Error(Errc::MalformedSyntax, "bad step reference '" + std::string(text) + "'");
    }
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || index >= step_index) {
      throw Error(Errc::ForwardStepRef, "'" + std::string(text) + "' in step " +
                                            std::to_string(step_index) +
                                            " does not refer to an earlier step");
    }
    return StepRef{index};
  }
  if (text.starts_with("const_")) {
    std::string_view tail = text.substr(6);
    if (tail == "m1") return NamedConstant{std::string(text), -1.0};
    if (all_digits(tail)) {
      auto v = numeral_value(tail);
      if (v) return NamedConstant{std::string(text), *v};
    }
    throw Error(Errc::MalformedSyntax, "unknown constant '" + std::string(text) + "'");
  }
  if (is_numeral(text)) {
    auto v = numeral_value(text);
    if (!v) throw Error(Errc::MalformedSyntax, "numeral out of range '" + std::string(text) + "'");
    return NumberLiteral{*v, std::string(text)};
  }
  return RowRef{std::string(text)};
}

inline void check_slots(const Step& step, std::size_t step_index) {
  auto where = [&] {
    return std::string(op_name(step.op)) + " at step " + std::to_string(step_index);
  };
  if (is_table_op(step.op)) {
    if (!std::holds_alternative<RowRef>(step.args[0])) {
      throw Error(Errc::ArityViolation, where() + ": first argument must be a row name");
    }
    if (!std::holds_alternative<NoneArg>(step.args[1])) {
      throw Error(Errc::ArityViolation, where() + ": second argument must be none");
    }
  } else {
    for (const auto& a : step.args) {
      if (std::holds_alternative<NoneArg>(a)) {
        throw Error(Errc::ArityViolation, where() + ": none is only valid in table operations");
      }
    }
  }
}

}  // namespace detail

/// Parses `op(a, b), op(a, b), ...`. Whitespace around tokens is ignored. Arguments may
/// contain balanced parentheses (row names such as "net income ( loss )").
inline Program parse_program(std::string_view text) {
  Program program;
  std::size_t pos = 0;
  const std::size_t n = text.size();

  auto skip_ws = [&] {
    while (pos < n && detail::is_space(text[pos])) ++pos;
  };

  skip_ws();
  if (pos == n) throw Error(Errc::MalformedSyntax, "empty program");

  while (true) {
    skip_ws();
    std::size_t name_begin = pos;
    while (pos < n && text[pos] != '(' && text[pos] != ',' && text[pos] != ')') ++pos;
    if (pos == n || text[pos] != '(') {
      throw Error(Errc::MalformedSyntax, "expected '(' after operation name at offset " +
                                             std::to_string(name_begin));
    }
    std::string_view name = detail::trim(text.substr(name_begin, pos - name_begin));
    if (name.empty()) throw Error(Errc::MalformedSyntax, "missing operation name");
    auto op = op_from_name(name);
    if (!op) throw Error(Errc::UnknownOperation, "'" + std::string(name) + "'");
    ++pos;  // '('

    const std::size_t step_index = program.steps.size();
    std::vector<std::string_view> raw_args;
    while (true) {
      std::size_t arg_begin = pos;
      int depth = 0;
      while (pos < n) {
        char c = text[pos];
        if (c == '(') {
          ++depth;
        } else if (c == ')') {
          if (depth == 0) break;
          --depth;
        } else if (c == ',' && depth == 0) {
          break;
        }
        ++pos;
      }
      if (pos == n) {
        throw Error(Errc::MalformedSyntax, "missing ')' for step " + std::to_string(step_index));
      }
      std::string_view arg = detail::trim(text.substr(arg_begin, pos - arg_begin));
      if (arg.empty()) {
        throw Error(Errc::MalformedSyntax, "empty argument in step " + std::to_string(step_index));
      }
      raw_args.push_back(arg);
      if (text[pos++] == ')') break;
    }
    if (raw_args.size() != 2) {
      throw Error(Errc::ArityViolation, std::string(op_name(*op)) + " takes 2 arguments, got " +
                                            std::to_string(raw_args.size()));
    }

    Step step{*op, {detail::classify_argument(raw_args[0], step_index),
                    detail::classify_argument(raw_args[1], step_index)}};
    detail::check_slots(step, step_index);
    program.steps.push_back(std::move(step));

    skip_ws();
    if (pos == n) break;
    if (text[pos] != ',') {
      throw Error(Errc::MalformedSyntax, "expected ',' between steps at offset " + std::to_string(pos));
    }
    ++pos;
    skip_ws();
    if (pos == n) throw Error(Errc::MalformedSyntax, "trailing ','");
  }
  return program;
}

// ---------------------------------------------------------------------------
// Serialization

inline std::string to_string(const Argument& arg) {
  struct Visitor {
    std::string operator()(const NumberLiteral& a) const { return a.raw; }
    std::string operator()(const NamedConstant& a) const { return a.name; }
    std::string operator()(const StepRef& a) const { return "#" + std::to_string(a.index); }
    std::string operator()(const RowRef& a) const { return a.name; }
    std::string operator()(const NoneArg&) const { return "none"; }
  };
  return std::visit(Visitor{}, arg);
}

inline std::string serialize_program(const Program& p) {
  std::string out;
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const Step& s = p.steps[i];
    if (i) out += ", ";
    out += op_name(s.op);
    out += '(';
    out += to_string(s.args[0]);
    out += ", ";
    out += to_string(s.args[1]);
    out += ')';
  }
  return out;
}

}  // namespace finqa
