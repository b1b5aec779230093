#pragma once

// Single-head attention kernels in double precision, with analytic backward passes and a
// central finite-difference gradient checker.
//
//   standard:      softmax(Q K^T / sqrt(d)) V
//   disentangled:  A~[i][j] = Qc_i . Kc_j + Qc_i . Kr_{rel(i,j)} + Kc_j . Qr_{rel(j,i)}
//                  out      = softmax(A~ / sqrt(3d)) Vc
//
// Relative buckets: rel(i, j) = clamp(i - j, -k, k - 1) + k, indexing a 2k-row table.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "finqa/error.hpp"

namespace finqa::attn {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw Error(Errc::DimensionMismatch, std::to_string(data_.size()) + " values for a " +
                                               std::to_string(rows_) + "x" + std::to_string(cols_) + " matrix");
    }
    for (double x : data_)
      if (!std::isfinite(x)) throw Error(Errc::InvalidArgument, "matrix entries must be finite");
  }

  /// Entries uniform in [lo, hi).
  template <class Rng>
  static Matrix random(std::size_t rows, std::size_t cols, Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    Matrix m(rows, cols);
    for (double& x : m.data_) x = dist(rng);
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool same_shape(const Matrix& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape(const Matrix& m) { return std::to_string(m.rows()) + "x" + std::to_string(m.cols()); }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// a * b
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw Error(Errc::DimensionMismatch, shape(a) + " * " + shape(b));
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  return out;
}

/// a * b^T
inline Matrix matmul_bt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) throw Error(Errc::DimensionMismatch, shape(a) + " * " + shape(b) + "^T");
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.rows(); ++j) out(i, j) = dot(a.row(i), b.row(j));
  return out;
}

/// a^T * b
inline Matrix matmul_at(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw Error(Errc::DimensionMismatch, shape(a) + "^T * " + shape(b));
  Matrix out(a.cols(), b.cols());
  for (std::size_t k = 0; k < a.rows(); ++k)
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
    }
  return out;
}

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw Error(Errc::DimensionMismatch, shape(a) + " + " + shape(b));
  Matrix out = a;
  auto o = out.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
  return out;
}

inline Matrix& operator+=(Matrix& a, const Matrix& b) {
  a = a + b;
  return a;
}

inline Matrix scaled(const Matrix& a, double s) {
  Matrix out = a;
  for (double& x : out.data()) x *= s;
  return out;
}

inline double sum(const Matrix& m) {
  double s = 0.0;
  for (double x : m.data()) s += x;
  return s;
}

/// Numerically stable row-wise softmax.
inline Matrix softmax_rows(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t i = 0; i < logits.rows(); ++i) {
    auto in = logits.row(i);
    auto o = out.row(i);
    const double mx = *std::max_element(in.begin(), in.end());
    double z = 0.0;
    for (std::size_t j = 0; j < in.size(); ++j) z += (o[j] = std::exp(in[j] - mx));
    for (double& x : o) x /= z;
  }
  return out;
}

/// Backward of row softmax: dS = P o (dP - rowsum(P o dP)).
inline Matrix softmax_rows_backward(const Matrix& probs, const Matrix& d_probs) {
  Matrix out(probs.rows(), probs.cols());
  for (std::size_t i = 0; i < probs.rows(); ++i) {
    const double inner = dot(probs.row(i), d_probs.row(i));
    for (std::size_t j = 0; j < probs.cols(); ++j) out(i, j) = probs(i, j) * (d_probs(i, j) - inner);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Domain types

struct AttentionConfig {
  std::size_t n = 1;  // sequence length
  std::size_t d = 1;  // hidden size
  std::size_t k = 1;  // max relative distance

  void validate() const {
    if (n < 1 || d < 1 || k < 1) throw Error(Errc::InvalidArgument, "n, d and k must be >= 1");
  }
};

struct ProjectionSet {
  Matrix w_qc, w_kc, w_vc, w_qr, w_kr;

  std::size_t dim() const noexcept { return w_qc.rows(); }

  void validate() const {
    const std::size_t d = dim();
    for (const Matrix* m : {&w_qc, &w_kc, &w_vc, &w_qr, &w_kr}) {
      if (m->rows() != d || m->cols() != d) {
        throw Error(Errc::DimensionMismatch, "projection " + shape(*m) + ", expected " + std::to_string(d) +
                                                 "x" + std::to_string(d));
      }
    }
  }

  template <class Rng>
  static ProjectionSet random(std::size_t d, Rng& rng, double lo = -1.0, double hi = 1.0) {
    return {Matrix::random(d, d, rng, lo, hi), Matrix::random(d, d, rng, lo, hi), Matrix::random(d, d, rng, lo, hi),
            Matrix::random(d, d, rng, lo, hi), Matrix::random(d, d, rng, lo, hi)};
  }
};

/// Relative-position embeddings: 2k rows, one per bucket.
struct RelPositionTable {
  std::size_t k = 1;
  Matrix p;

  void validate() const {
    if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
    if (p.rows() != 2 * k) {
      throw Error(Errc::DimensionMismatch, "position table has " + std::to_string(p.rows()) + " rows, expected " +
                                               std::to_string(2 * k));
    }
  }
};

struct AttentionResult {
  Matrix scores;  // logits before scaling
  Matrix probs;   // row-stochastic attention weights
  Matrix output;  // probs * V
};

// ---------------------------------------------------------------------------
// Standard attention

inline void check_square_projection(const Matrix& h, const Matrix& w, const char* what) {
  if (w.rows() != h.cols() || w.cols() != h.cols()) {
    throw Error(Errc::DimensionMismatch, std::string(what) + " is " + shape(w) + " for hidden size " +
                                             std::to_string(h.cols()));
  }
}

/// softmax(Q K^T / scale) V. The scale defaults to sqrt(d).
inline AttentionResult standard_attention(const Matrix& h, const Matrix& w_q, const Matrix& w_k, const Matrix& w_v,
                                          std::optional<double> scale = std::nullopt) {
  if (h.rows() == 0 || h.cols() == 0) throw Error(Errc::DimensionMismatch, "empty hidden states");
  check_square_projection(h, w_q, "W_q");
  check_square_projection(h, w_k, "W_k");
  check_square_projection(h, w_v, "W_v");
  const double s = scale.value_or(std::sqrt(static_cast<double>(h.cols())));
  Matrix q = matmul(h, w_q);
  Matrix k = matmul(h, w_k);
  Matrix v = matmul(h, w_v);
  AttentionResult r;
  r.scores = matmul_bt(q, k);
  r.probs = softmax_rows(scaled(r.scores, 1.0 / s));
  r.output = matmul(r.probs, v);
  return r;
}

struct StandardGrads {
  Matrix d_h, d_wq, d_wk, d_wv;
};

/// Gradients of sum(d_out o output) with respect to H and the three projections.
inline StandardGrads standard_attention_backward(const Matrix& h, const Matrix& w_q, const Matrix& w_k,
                                                 const Matrix& w_v, const Matrix& d_out) {
  const double s = std::sqrt(static_cast<double>(h.cols()));
  Matrix q = matmul(h, w_q);
  Matrix k = matmul(h, w_k);
  Matrix v = matmul(h, w_v);
  Matrix probs = softmax_rows(scaled(matmul_bt(q, k), 1.0 / s));
  if (!d_out.same_shape(h)) throw Error(Errc::DimensionMismatch, "upstream gradient " + shape(d_out));

  Matrix d_probs = matmul_bt(d_out, v);
  Matrix d_v = matmul_at(probs, d_out);
  Matrix d_logits = scaled(softmax_rows_backward(probs, d_probs), 1.0 / s);
  Matrix d_q = matmul(d_logits, k);
  Matrix d_k = matmul_at(d_logits, q);

  StandardGrads g;
  g.d_wq = matmul_at(h, d_q);
  g.d_wk = matmul_at(h, d_k);
  g.d_wv = matmul_at(h, d_v);
  g.d_h = matmul_bt(d_q, w_q) + matmul_bt(d_k, w_k) + matmul_bt(d_v, w_v);
  return g;
}

// ---------------------------------------------------------------------------
// Disentangled attention

inline std::size_t rel_index(std::int64_t i, std::int64_t j, std::size_t k) {
  const auto kk = static_cast<std::int64_t>(k);
  return static_cast<std::size_t>(std::clamp(i - j, -kk, kk - 1) + kk);
}

namespace detail {

inline std::vector<std::int64_t> default_positions(std::size_t n) {
  std::vector<std::int64_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = static_cast<std::int64_t>(i);
  return pos;
}

inline void check_disentangled(const Matrix& h_query, const Matrix& h, const RelPositionTable& rel,
                               const ProjectionSet& proj, std::span<const std::int64_t> positions) {
  rel.validate();
  proj.validate();
  if (h.rows() == 0 || h.cols() == 0) throw Error(Errc::DimensionMismatch, "empty hidden states");
  if (!h_query.same_shape(h)) throw Error(Errc::DimensionMismatch, "query input " + shape(h_query) + " vs " + shape(h));
  if (proj.dim() != h.cols()) {
    throw Error(Errc::DimensionMismatch, "projections are " + std::to_string(proj.dim()) + "-dimensional, H is " + shape(h));
  }
  if (rel.p.cols() != h.cols()) throw Error(Errc::DimensionMismatch, "position table " + shape(rel.p));
  if (positions.size() != h.rows()) throw Error(Errc::DimensionMismatch, "positions do not match sequence length");
}

struct DisentangledForward {
  Matrix q_c, k_c, v_c, q_r, k_r;
  std::vector<std::int64_t> pos;
  AttentionResult result;
};

inline DisentangledForward disentangled_forward(const Matrix& h_query, const Matrix& h, const RelPositionTable& rel,
                                                const ProjectionSet& proj, std::span<const std::int64_t> positions) {
  check_disentangled(h_query, h, rel, proj, positions);
  DisentangledForward f;
  f.q_c = matmul(h_query, proj.w_qc);
  f.k_c = matmul(h, proj.w_kc);
  f.v_c = matmul(h, proj.w_vc);
  f.q_r = matmul(rel.p, proj.w_qr);
  f.k_r = matmul(rel.p, proj.w_kr);
  f.pos.assign(positions.begin(), positions.end());

  const std::size_t n = h.rows();
  Matrix& scores = f.result.scores = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t ij = rel_index(f.pos[i], f.pos[j], rel.k);
      const std::size_t ji = rel_index(f.pos[j], f.pos[i], rel.k);
      scores(i, j) = dot(f.q_c.row(i), f.k_c.row(j)) + dot(f.q_c.row(i), f.k_r.row(ij)) +
                     dot(f.k_c.row(j), f.q_r.row(ji));
    }
  const double s = std::sqrt(3.0 * static_cast<double>(h.cols()));
  f.result.probs = softmax_rows(scaled(scores, 1.0 / s));
  f.result.output = matmul(f.result.probs, f.v_c);
  return f;
}

}  // namespace detail

/// Disentangled attention over positions 0..n-1, or explicit absolute positions.
inline AttentionResult disentangled_attention(const Matrix& h, const RelPositionTable& rel, const ProjectionSet& proj,
                                              std::span<const std::int64_t> positions = {}) {
  auto pos = positions.empty() ? detail::default_positions(h.rows())
                               : std::vector<std::int64_t>(positions.begin(), positions.end());
  return detail::disentangled_forward(h, h, rel, proj, pos).result;
}

struct DisentangledGrads {
  Matrix d_h, d_p, d_wqc, d_wkc, d_wvc, d_wqr, d_wkr;
};

inline DisentangledGrads disentangled_attention_backward(const Matrix& h, const RelPositionTable& rel,
                                                         const ProjectionSet& proj, const Matrix& d_out) {
  auto pos = detail::default_positions(h.rows());
  auto f = detail::disentangled_forward(h, h, rel, proj, pos);
  if (!d_out.same_shape(h)) throw Error(Errc::DimensionMismatch, "upstream gradient " + shape(d_out));
  const std::size_t n = h.rows();
  const std::size_t d = h.cols();
  const double s = std::sqrt(3.0 * static_cast<double>(d));

  Matrix d_probs = matmul_bt(d_out, f.v_c);
  Matrix d_vc = matmul_at(f.result.probs, d_out);
  Matrix d_scores = scaled(softmax_rows_backward(f.result.probs, d_probs), 1.0 / s);

  Matrix d_qc(n, d), d_kc(n, d), d_qr(2 * rel.k, d), d_kr(2 * rel.k, d);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double g = d_scores(i, j);
      const std::size_t ij = rel_index(f.pos[i], f.pos[j], rel.k);
      const std::size_t ji = rel_index(f.pos[j], f.pos[i], rel.k);
      for (std::size_t c = 0; c < d; ++c) {
        d_qc(i, c) += g * (f.k_c(j, c) + f.k_r(ij, c));
        d_kc(j, c) += g * (f.q_c(i, c) + f.q_r(ji, c));
        d_kr(ij, c) += g * f.q_c(i, c);
        d_qr(ji, c) += g * f.k_c(j, c);
      }
    }

  DisentangledGrads g;
  g.d_wqc = matmul_at(h, d_qc);
  g.d_wkc = matmul_at(h, d_kc);
  g.d_wvc = matmul_at(h, d_vc);
  g.d_wqr = matmul_at(rel.p, d_qr);
  g.d_wkr = matmul_at(rel.p, d_kr);
  g.d_h = matmul_bt(d_qc, proj.w_qc) + matmul_bt(d_kc, proj.w_kc) + matmul_bt(d_vc, proj.w_vc);
  g.d_p = matmul_bt(d_qr, proj.w_qr) + matmul_bt(d_kr, proj.w_kr);
  return g;
}

// ---------------------------------------------------------------------------
// Enhanced mask decoder

/// Absolute-position injection: H + I.
inline Matrix emd_inject(const Matrix& h, const Matrix& abs_positions) {
  if (!h.same_shape(abs_positions)) {
    throw Error(Errc::DimensionMismatch, "H is " + shape(h) + ", I is " + shape(abs_positions));
  }
  return h + abs_positions;
}

/// Final decoding layer: absolute positions enter the query side only; keys and values
/// still come from H.
inline AttentionResult emd_decode(const Matrix& h, const Matrix& abs_positions, const RelPositionTable& rel,
                                  const ProjectionSet& proj) {
  Matrix query_input = emd_inject(h, abs_positions);
  auto pos = detail::default_positions(h.rows());
  return detail::disentangled_forward(query_input, h, rel, proj, pos).result;
}

// ---------------------------------------------------------------------------
// Scale-invariant fine-tuning primitives

enum class SiftNorm { MeanVariance, UnitL2 };

inline constexpr double kSiftEpsilon = 1e-12;

/// Per-row normalization: zero mean and unit population variance (default), or unit L2 norm.
inline Matrix sift_normalize(const Matrix& e, SiftNorm mode = SiftNorm::MeanVariance) {
  if (e.cols() < 2) throw Error(Errc::InvalidArgument, "rows need at least 2 entries");
  Matrix out(e.rows(), e.cols());
  const double d = static_cast<double>(e.cols());
  for (std::size_t r = 0; r < e.rows(); ++r) {
    auto in = e.row(r);
    auto o = out.row(r);
    if (mode == SiftNorm::UnitL2) {
      const double norm = std::sqrt(dot(in, in));
      if (norm < kSiftEpsilon) throw Error(Errc::DegenerateRow, "row " + std::to_string(r) + " has zero norm");
      for (std::size_t c = 0; c < in.size(); ++c) o[c] = in[c] / norm;
      continue;
    }
    double mean = 0.0;
    for (double x : in) mean += x;
    mean /= d;
    double var = 0.0;
    for (double x : in) var += (x - mean) * (x - mean);
    var /= d;
    if (std::sqrt(var) < kSiftEpsilon) throw Error(Errc::DegenerateRow, "row " + std::to_string(r) + " is constant");
    const double denom = std::sqrt(var + kSiftEpsilon);
    for (std::size_t c = 0; c < in.size(); ++c) o[c] = (in[c] - mean) / denom;
  }
  return out;
}

/// Adds to each row a seeded random direction of L2 length eps.
inline Matrix sift_perturb(const Matrix& e, double eps, std::uint64_t seed) {
  if (!(eps > 0) || !std::isfinite(eps)) throw Error(Errc::InvalidArgument, "eps must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix out = e;
  std::vector<double> dir(e.cols());
  for (std::size_t r = 0; r < e.rows(); ++r) {
    double norm = 0.0;
    while (norm < 1e-6) {
      for (double& x : dir) x = gauss(rng);
      norm = std::sqrt(dot(dir, dir));
    }
    auto o = out.row(r);
    for (std::size_t c = 0; c < dir.size(); ++c) o[c] += eps * dir[c] / norm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Gradient checking

using LossFn = std::function<double(std::span<const Matrix>)>;
using GradFn = std::function<std::vector<Matrix>(std::span<const Matrix>)>;

inline constexpr double kFiniteDifferenceStep = 1e-5;
/// Denominator floor of the relative error, so entries with near-zero gradient are
/// judged on absolute error.
inline constexpr double kRelErrorFloor = 1e-3;

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<double> per_input;  // max relative error per input matrix
  double tol = 0.0;
  bool passed() const noexcept { return max_rel_error <= tol; }
};

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kRelErrorFloor});
}

/// Compares grad(inputs) against central differences of loss(inputs), entry by entry.
inline GradCheckReport grad_check(const LossFn& loss, const GradFn& grad, std::vector<Matrix> inputs, double tol,
                                  double step = kFiniteDifferenceStep) {
  if (!(tol > 0)) throw Error(Errc::InvalidArgument, "tol must be > 0");
  auto analytic = grad(inputs);
  if (analytic.size() != inputs.size()) throw Error(Errc::DimensionMismatch, "one gradient per input expected");
  GradCheckReport report;
  report.tol = tol;
  for (std::size_t m = 0; m < inputs.size(); ++m) {
    if (!analytic[m].same_shape(inputs[m])) {
      throw Error(Errc::DimensionMismatch, "gradient " + std::to_string(m) + " has shape " + shape(analytic[m]));
    }
    double worst = 0.0;
    auto values = inputs[m].data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss(inputs);
      values[i] = saved - step;
      const double down = loss(inputs);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = analytic[m].data()[i];
      if (!std::isfinite(numeric) || !std::isfinite(a)) {
        throw Error(Errc::NonFiniteGradient, "input " + std::to_string(m) + " entry " + std::to_string(i));
      }
      worst = std::max(worst, relative_error(a, numeric));
    }
    report.per_input.push_back(worst);
    report.max_rel_error = std::max(report.max_rel_error, worst);
  }
  return report;
}

/// Loss = sum of output entries. Inputs: H, W_q, W_k, W_v.
struct StandardAttentionProblem {
  static double loss(std::span<const Matrix> in) { return sum(standard_attention(in[0], in[1], in[2], in[3]).output); }

  static std::vector<Matrix> grad(std::span<const Matrix> in) {
    Matrix ones(in[0].rows(), in[0].cols(), 1.0);
    auto g = standard_attention_backward(in[0], in[1], in[2], in[3], ones);
    return {g.d_h, g.d_wq, g.d_wk, g.d_wv};
  }
};

/// Loss = sum of output entries. Inputs: H, P, W_qc, W_kc, W_vc, W_qr, W_kr (k fixed).
struct DisentangledAttentionProblem {
  std::size_t k;

  static RelPositionTable table(std::size_t k, const Matrix& p) { return {k, p}; }
  static ProjectionSet projections(std::span<const Matrix> in) { return {in[2], in[3], in[4], in[5], in[6]}; }

  double loss(std::span<const Matrix> in) const {
    return sum(disentangled_attention(in[0], table(k, in[1]), projections(in)).output);
  }

  std::vector<Matrix> grad(std::span<const Matrix> in) const {
    Matrix ones(in[0].rows(), in[0].cols(), 1.0);
    auto g = disentangled_attention_backward(in[0], table(k, in[1]), projections(in), ones);
    return {g.d_h, g.d_p, g.d_wqc, g.d_wkc, g.d_wvc, g.d_wqr, g.d_wkr};
  }
};

inline GradCheckReport grad_check_standard(const Matrix& h, const Matrix& w_q, const Matrix& w_k, const Matrix& w_v,
                                           double tol) {
  return grad_check(StandardAttentionProblem::loss, StandardAttentionProblem::grad, {h, w_q, w_k, w_v}, tol);
}

inline GradCheckReport grad_check_disentangled(const Matrix& h, const RelPositionTable& rel, const ProjectionSet& proj,
                                               double tol) {
  DisentangledAttentionProblem prob{rel.k};
  return grad_check([prob](std::span<const Matrix> in) { return prob.loss(in); },
                    [prob](std::span<const Matrix> in) { return prob.grad(in); },
                    {h, rel.p, proj.w_qc, proj.w_kc, proj.w_vc, proj.w_qr, proj.w_kr}, tol);
}

}  // namespace finqa::attn
