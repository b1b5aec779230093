#pragma once

// Constrained decoding for reasoning programs. Tokens follow the fused opener convention
// (`add(` is one token), so each step is exactly four tokens: opener, arg, arg, `)`.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "finqa/dsl.hpp"
#include "finqa/error.hpp"

namespace finqa {

inline constexpr std::size_t kMaxProgramSteps = 16;

enum class TokenClass { Op, Close, None, Eof, Number, Constant, Row, Memory };

inline constexpr std::string_view kCloseToken = ")";
inline constexpr std::string_view kNoneToken = "none";
inline constexpr std::string_view kEofToken = "EOF";

inline std::string opener_token(OperationKind op) { return std::string(op_name(op)) + "("; }

/// The decoder's token inventory, split into disjoint classes. Index layout:
/// ops, `)`, `none`, EOF, numbers, constants, rows, memory `#0..#M`.
class VocabPartition {
 public:
  VocabPartition(std::vector<std::string> numbers, std::vector<std::string> constants,
                 std::vector<std::string> rows, std::size_t memory_count = kMaxProgramSteps,
                 std::vector<OperationKind> ops = {kAllOperations.begin(), kAllOperations.end()},
                 std::size_t max_steps = kMaxProgramSteps)
      : max_steps_(max_steps) {
    if (max_steps_ == 0) throw Error(Errc::InvalidVocabulary, "max_steps must be >= 1");
    for (auto op : ops) add(opener_token(op), TokenClass::Op, op, 0);
    add(std::string(kCloseToken), TokenClass::Close);
    add(std::string(kNoneToken), TokenClass::None);
    add(std::string(kEofToken), TokenClass::Eof);
    for (auto& t : numbers) {
      if (!detail::is_numeral(t)) throw Error(Errc::InvalidVocabulary, "'" + t + "' is not a numeral");
      add(std::move(t), TokenClass::Number);
    }
    for (auto& t : constants) {
      if (!is_argument_kind<NamedConstant>(t)) {
        throw Error(Errc::InvalidVocabulary, "'" + t + "' is not a named constant");
      }
      add(std::move(t), TokenClass::Constant);
    }
    for (auto& t : rows) {
      if (!is_argument_kind<RowRef>(t)) throw Error(Errc::InvalidVocabulary, "'" + t + "' is not a row name");
      add(std::move(t), TokenClass::Row);
    }
    for (std::size_t k = 0; k < memory_count; ++k) {
      add("#" + std::to_string(k), TokenClass::Memory, OperationKind::Add, k);
    }
  }

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t max_steps() const noexcept { return max_steps_; }
  const std::string& token(std::size_t i) const { return entries_.at(i).text; }
  TokenClass token_class(std::size_t i) const { return entries_.at(i).cls; }
  OperationKind token_op(std::size_t i) const { return entries_.at(i).op; }
  std::size_t memory_index(std::size_t i) const { return entries_.at(i).memory; }

  std::optional<std::size_t> index_of(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t eof_index() const { return *index_of(kEofToken); }

  bool has_class(TokenClass c) const {
    return std::any_of(entries_.begin(), entries_.end(), [c](const Entry& e) { return e.cls == c; });
  }

 private:
  struct Entry {
    std::string text;
    TokenClass cls;
    OperationKind op;
    std::size_t memory;
  };

  template <class Kind>
  static bool is_argument_kind(const std::string& t) {
    if (t.empty() || detail::trim(t) != t) return false;
    if (t.find_first_of("(),") != std::string::npos) return false;
    try {
      return std::holds_alternative<Kind>(detail::classify_argument(t, kMaxProgramSteps + 1));
    } catch (const Error&) {
      return false;
    }
  }

  void add(std::string text, TokenClass cls, OperationKind op = OperationKind::Add, std::size_t memory = 0) {
    auto [it, inserted] = index_.try_emplace(text, entries_.size());
    if (!inserted) throw Error(Errc::InvalidVocabulary, "token '" + text + "' appears in two classes");
    entries_.push_back({std::move(text), cls, op, memory});
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t max_steps_;
};

enum class Slot { ExpectOp, ExpectArg1, ExpectArg2, ExpectClose, Done };

constexpr std::string_view slot_name(Slot s) noexcept {
  switch (s) {
    case Slot::ExpectOp: return "ExpectOp";
    case Slot::ExpectArg1: return "ExpectArg1";
    case Slot::ExpectArg2: return "ExpectArg2";
    case Slot::ExpectClose: return "ExpectClose";
    case Slot::Done: return "Done";
  }
  return "?";
}

struct DecodeState {
  std::size_t completed_steps = 0;
  Slot slot = Slot::ExpectOp;
  OperationKind op = OperationKind::Add;  // meaningful in the argument/close slots
  bool sealed = false;                    // a `greater` step completed; only EOF may follow
  bool operator==(const DecodeState&) const = default;
};

inline std::string describe(const DecodeState& s) {
  std::string out(slot_name(s.slot));
  if (s.slot == Slot::ExpectArg1 || s.slot == Slot::ExpectArg2 || s.slot == Slot::ExpectClose) {
    out += "(" + std::string(op_name(s.op)) + ")";
  }
  return out + " steps=" + std::to_string(s.completed_steps);
}

struct TokenMask {
  std::vector<bool> valid;

  bool operator[](std::size_t i) const { return valid.at(i); }
  std::size_t count() const { return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true)); }
};

inline DecodeState initial_state() noexcept { return {}; }

namespace detail {

inline bool math_arg_allowed(const VocabPartition& v, std::size_t i, std::size_t completed) {
  switch (v.token_class(i)) {
    case TokenClass::Number:
    case TokenClass::Constant: return true;
    case TokenClass::Memory: return v.memory_index(i) < completed;
    default: return false;
  }
}

/// An opener is offered only if its argument slots can be filled, so no state dead-ends.
inline bool op_viable(const VocabPartition& v, OperationKind op, std::size_t completed) {
  if (is_table_op(op)) return v.has_class(TokenClass::Row);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (math_arg_allowed(v, i, completed)) return true;
  return false;
}

inline bool token_allowed(const DecodeState& s, const VocabPartition& v, std::size_t i) {
  const TokenClass cls = v.token_class(i);
  switch (s.slot) {
    case Slot::Done: return cls == TokenClass::Eof;
    case Slot::ExpectOp:
      if (cls == TokenClass::Eof) return s.completed_steps >= 1;
      if (cls != TokenClass::Op) return false;
      return !s.sealed && s.completed_steps < v.max_steps() && op_viable(v, v.token_op(i), s.completed_steps);
    case Slot::ExpectArg1:
      if (is_table_op(s.op)) return cls == TokenClass::Row;
      return math_arg_allowed(v, i, s.completed_steps);
    case Slot::ExpectArg2:
      if (is_table_op(s.op)) return cls == TokenClass::None;
      return math_arg_allowed(v, i, s.completed_steps);
    case Slot::ExpectClose: return cls == TokenClass::Close;
  }
  return false;
}

}  // namespace detail

inline TokenMask valid_mask(const DecodeState& s, const VocabPartition& v) {
  TokenMask mask{std::vector<bool>(v.size(), false)};
  for (std::size_t i = 0; i < v.size(); ++i) mask.valid[i] = detail::token_allowed(s, v, i);
  return mask;
}

inline DecodeState advance(const DecodeState& s, const VocabPartition& v, std::size_t token) {
  if (token >= v.size()) throw Error(Errc::InvalidToken, "token index out of range");
  if (!detail::token_allowed(s, v, token)) {
    throw Error(Errc::InvalidToken, "'" + v.token(token) + "' not allowed in " + describe(s));
  }
  DecodeState next = s;
  switch (s.slot) {
    case Slot::ExpectOp:
      if (v.token_class(token) == TokenClass::Eof) {
        next.slot = Slot::Done;
      } else {
        next.slot = Slot::ExpectArg1;
        next.op = v.token_op(token);
      }
      break;
    case Slot::ExpectArg1: next.slot = Slot::ExpectArg2; break;
    case Slot::ExpectArg2: next.slot = Slot::ExpectClose; break;
    case Slot::ExpectClose:
      next.slot = Slot::ExpectOp;
      next.completed_steps += 1;
      next.sealed = s.op == OperationKind::Greater;
      break;
    case Slot::Done: break;
  }
  return next;
}

inline DecodeState advance(const DecodeState& s, const VocabPartition& v, std::string_view token) {
  auto idx = v.index_of(token);
  if (!idx) throw Error(Errc::InvalidToken, "'" + std::string(token) + "' is not in the vocabulary");
  return advance(s, v, *idx);
}

/// True iff the sequence is a complete program followed by a single EOF.
inline bool accepts(std::span<const std::size_t> tokens, const VocabPartition& v) {
  DecodeState s = initial_state();
  for (std::size_t t : tokens) {
    if (s.slot == Slot::Done) return false;
    if (t >= v.size() || !detail::token_allowed(s, v, t)) return false;
    s = advance(s, v, t);
  }
  return s.slot == Slot::Done;
}

inline bool accepts(std::span<const std::string> tokens, const VocabPartition& v) {
  std::vector<std::size_t> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto idx = v.index_of(t);
    if (!idx) return false;
    ids.push_back(*idx);
  }
  return accepts(std::span<const std::size_t>(ids), v);
}

/// Splits (possibly partial) program text into decoder tokens: openers such as `add(`,
/// arguments, and `)`. Commas are separators, not tokens.
inline std::vector<std::string> tokenize_program(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    char c = text[pos];
    if (detail::is_space(c) || c == ',') {
      ++pos;
      continue;
    }
    if (c == ')') {
      out.emplace_back(kCloseToken);
      ++pos;
      continue;
    }
    std::size_t begin = pos;
    while (pos < text.size() && text[pos] != ',' && text[pos] != '(' && text[pos] != ')') ++pos;
    std::string word(detail::trim(text.substr(begin, pos - begin)));
    if (pos < text.size() && text[pos] == '(') {
      ++pos;
      if (auto op = op_from_name(word)) {
        out.push_back(opener_token(*op));
      } else {
        out.push_back(word + "(");
      }
    } else if (!word.empty()) {
      out.push_back(std::move(word));
    }
  }
  return out;
}

}  // namespace finqa
