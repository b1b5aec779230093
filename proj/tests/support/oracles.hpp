#pragma once

// Test-only reference implementations and generators. Nothing here calls into the code
// paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "finqa/attention.hpp"
#include "finqa/dsl.hpp"

namespace finqa::ref {

using Rng = std::mt19937_64;

inline std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

template <class T>
const T& pick_from(Rng& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

inline bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline NumberLiteral literal(const std::string& raw) { return {std::strtod(raw.c_str(), nullptr), raw}; }

// ---------------------------------------------------------------------------
// Program generators

/// Any valid program with up to `max_steps` steps, exercising every argument kind.
inline Program random_program(Rng& rng, std::size_t max_steps) {
  static const std::vector<std::string> numerals = {"0", "1", "5735", "-3", "0.5", "14.10", "1e3", ".25", "2.5E-2", "100"};
  static const std::vector<std::pair<std::string, double>> constants = {
      {"const_100", 100}, {"const_m1", -1}, {"const_1000000", 1e6}, {"const_2", 2}};
  static const std::vector<std::string> rows = {"k4", "net revenue", "net income ( loss )", "total_assets", "2015 sales"};
  Program p;
  const std::size_t steps = 1 + pick(rng, max_steps);
  for (std::size_t s = 0; s < steps; ++s) {
    Step step;
    step.op = kAllOperations[pick(rng, kAllOperations.size())];
    if (is_table_op(step.op)) {
      step.args = {RowRef{pick_from(rng, rows)}, NoneArg{}};
    } else {
      for (auto& a : step.args) {
        switch (pick(rng, s > 0 ? 4 : 3)) {
          case 0: a = literal(pick_from(rng, numerals)); break;
          case 1: {
            const auto& [name, value] = pick_from(rng, constants);
            a = NamedConstant{name, value};
            break;
          }
          case 2: a = RowRef{pick_from(rng, rows)}; break;
          default: a = StepRef{pick(rng, s)}; break;
        }
      }
    }
    p.steps.push_back(step);
  }
  return p;
}

/// Programs over add/subtract/multiply/exp with small integer literals. Exponents are
/// literals in [0, 3] so values stay finite.
inline Program random_arith_program(Rng& rng, std::size_t max_steps) {
  static const std::vector<OperationKind> ops = {OperationKind::Add, OperationKind::Subtract, OperationKind::Multiply,
                                                 OperationKind::Exp};
  Program p;
  const std::size_t steps = 1 + pick(rng, max_steps);
  auto small_int = [&](int lo, int hi) {
    return literal(std::to_string(std::uniform_int_distribution<int>(lo, hi)(rng)));
  };
  for (std::size_t s = 0; s < steps; ++s) {
    Step step;
    step.op = pick_from(rng, ops);
    for (std::size_t k = 0; k < 2; ++k) {
      if (step.op == OperationKind::Exp && k == 1) {
        step.args[k] = small_int(0, 3);
      } else if (s > 0 && coin(rng, 0.6)) {
        step.args[k] = StepRef{s - 1 - pick(rng, std::min<std::size_t>(s, 2))};
      } else {
        step.args[k] = small_int(-9, 9);
      }
    }
    p.steps.push_back(step);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Brute-force program evaluator: recursion from the final step, no step memory.

inline double brute_force_value(const Program& p, std::size_t step) {
  const Step& s = p.steps.at(step);
  auto arg = [&](const Argument& a) -> double {
    if (const auto* r = std::get_if<StepRef>(&a)) return brute_force_value(p, r->index);
    if (const auto* n = std::get_if<NumberLiteral>(&a)) return std::strtod(n->raw.c_str(), nullptr);
    if (const auto* c = std::get_if<NamedConstant>(&a)) return c->value;
    std::abort();
  };
  const double x = arg(s.args[0]);
  const double y = arg(s.args[1]);
  switch (s.op) {
    case OperationKind::Add: return x + y;
    case OperationKind::Subtract: return x - y;
    case OperationKind::Multiply: return x * y;
    case OperationKind::Divide: return x / y;
    case OperationKind::Exp: {
      // integer exponents by repeated multiplication
      double r = 1.0;
      for (int i = 0; i < static_cast<int>(y); ++i) r *= x;
      return r;
    }
    default: std::abort();
  }
}

inline double brute_force_value(const Program& p) { return brute_force_value(p, p.steps.size() - 1); }

// ---------------------------------------------------------------------------
// Token sequences -> program text, following the fused-opener convention.

inline std::string detokenize(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& t = tokens[i];
    if (i > 0 && !tokens[i - 1].ends_with("(") && t != ")") out += ", ";
    out += t;
  }
  return out;
}

/// Slot rules the parser alone does not enforce: math operations take no row names,
/// `greater` only as the final step, and at most `max_steps` steps.
inline bool slot_rules_hold(const Program& p, std::size_t max_steps) {
  if (p.steps.size() > max_steps) return false;
  for (std::size_t s = 0; s < p.steps.size(); ++s) {
    const Step& step = p.steps[s];
    if (step.op == OperationKind::Greater && s + 1 != p.steps.size()) return false;
    if (!is_table_op(step.op)) {
      for (const auto& a : step.args)
        if (std::holds_alternative<RowRef>(a)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Attention, written out loop by loop.

using attn::Matrix;

inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline Matrix naive_softmax_times(const Matrix& logits, const Matrix& v) {
  Matrix out(logits.rows(), v.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < logits.cols(); ++j) z += std::exp(logits(i, j));
    for (std::size_t c = 0; c < v.cols(); ++c) {
      double acc = 0.0;
      for (std::size_t j = 0; j < logits.cols(); ++j) acc += std::exp(logits(i, j)) / z * v(j, c);
      out(i, c) = acc;
    }
  }
  return out;
}

inline Matrix naive_standard_attention(const Matrix& h, const Matrix& wq, const Matrix& wk, const Matrix& wv,
                                       double scale) {
  Matrix q = naive_matmul(h, wq), k = naive_matmul(h, wk), v = naive_matmul(h, wv);
  Matrix logits(h.rows(), h.rows());
  for (std::size_t i = 0; i < h.rows(); ++i)
    for (std::size_t j = 0; j < h.rows(); ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < h.cols(); ++c) s += q(i, c) * k(j, c);
      logits(i, j) = s / scale;
    }
  return naive_softmax_times(logits, v);
}

inline std::size_t naive_bucket(long i, long j, long k) {
  long delta = i - j;
  if (delta < -k) delta = -k;
  if (delta > k - 1) delta = k - 1;
  return static_cast<std::size_t>(delta + k);
}

struct NaiveDisentangled {
  Matrix scores;  // unscaled
  Matrix output;
};

/// Element-by-element evaluation of the three-term score.
inline NaiveDisentangled naive_disentangled(const Matrix& h, const Matrix& p, std::size_t k, const Matrix& wqc,
                                            const Matrix& wkc, const Matrix& wvc, const Matrix& wqr, const Matrix& wkr) {
  const std::size_t n = h.rows(), d = h.cols();
  Matrix qc = naive_matmul(h, wqc), kc = naive_matmul(h, wkc), vc = naive_matmul(h, wvc);
  Matrix qr = naive_matmul(p, wqr), kr = naive_matmul(p, wkr);
  NaiveDisentangled r{Matrix(n, n), Matrix()};
  Matrix logits(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t ij = naive_bucket(static_cast<long>(i), static_cast<long>(j), static_cast<long>(k));
      const std::size_t ji = naive_bucket(static_cast<long>(j), static_cast<long>(i), static_cast<long>(k));
      double c2c = 0.0, c2p = 0.0, p2c = 0.0;
      for (std::size_t c = 0; c < d; ++c) {
        c2c += qc(i, c) * kc(j, c);
        c2p += qc(i, c) * kr(ij, c);
        p2c += kc(j, c) * qr(ji, c);
      }
      r.scores(i, j) = c2c + c2p + p2c;
      logits(i, j) = r.scores(i, j) / std::sqrt(3.0 * static_cast<double>(d));
    }
  r.output = naive_softmax_times(logits, vc);
  return r;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

}  // namespace finqa::ref
