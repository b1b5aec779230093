#pragma once

// Ensemble arithmetic for the retriever and generator stages.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "finqa/dsl.hpp"
#include "finqa/equivalence.hpp"
#include "finqa/error.hpp"

namespace finqa {

/// fact_id -> relevance score.
using ScoreMap = std::map<std::string, double>;

/// Per-fact mean over the maps that contain the fact. A fact absent from a map does not
/// count as a zero score.
inline ScoreMap average_retriever_scores(std::span<const ScoreMap> maps) {
  if (maps.empty()) throw Error(Errc::EmptyInput, "no score maps to average");
  std::map<std::string, std::pair<double, std::size_t>> acc;
  for (const auto& m : maps) {
    for (const auto& [fact, score] : m) {
      if (!std::isfinite(score)) throw Error(Errc::InvalidArgument, "non-finite score for '" + fact + "'");
      auto& [sum, count] = acc[fact];
      sum += score;
      ++count;
    }
  }
  ScoreMap out;
  for (const auto& [fact, sc] : acc) out.emplace(fact, sc.first / static_cast<double>(sc.second));
  return out;
}

/// Descending score, ties by ascending fact_id.
inline std::vector<std::string> rank_top_k(const ScoreMap& scores, std::size_t k) {
  if (k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  std::vector<std::pair<std::string, double>> items(scores.begin(), scores.end());
  auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  };
  const std::size_t n = std::min(k, items.size());
  std::partial_sort(items.begin(), items.begin() + static_cast<std::ptrdiff_t>(n), items.end(), better);
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(std::move(items[i].first));
  return out;
}

inline double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& gold, std::size_t k) {
  if (gold.empty()) throw Error(Errc::EmptyGold, "recall needs at least one gold fact");
  const std::size_t n = std::min(k, ranked.size());
  std::set<std::string> seen;
  for (std::size_t i = 0; i < n; ++i)
    if (gold.count(ranked[i])) seen.insert(ranked[i]);
  return static_cast<double>(seen.size()) / static_cast<double>(gold.size());
}

/// Draws min(neg_rate * |gold|, |non-gold|) distinct non-gold facts without replacement.
inline std::vector<std::string> sample_negatives(std::span<const std::string> all_facts,
                                                 const std::set<std::string>& gold, int neg_rate,
                                                 std::uint64_t seed) {
  if (neg_rate < 1) throw Error(Errc::InvalidArgument, "neg_rate must be >= 1");
  std::vector<std::string> pool;
  std::unordered_set<std::string> seen;
  for (const auto& f : all_facts) {
    if (gold.count(f) || !seen.insert(f).second) continue;
    pool.push_back(f);
  }
  const std::size_t want = std::min(static_cast<std::size_t>(neg_rate) * gold.size(), pool.size());
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < want; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(want);
  return pool;
}

/// Concatenates splits in order. Record ids must be unique across the result.
template <class Record, class IdOf>
std::vector<Record> combine_splits(std::span<const std::vector<Record>> splits, IdOf id_of) {
  std::vector<Record> out;
  std::set<std::string> ids;
  for (const auto& split : splits) {
    for (const auto& rec : split) {
      std::string id = id_of(rec);
      if (!ids.insert(id).second) throw Error(Errc::DuplicateRecordId, "'" + id + "'");
      out.push_back(rec);
    }
  }
  return out;
}

/// Per-model fusion weights, non-negative and normalized to sum to one.
class FusionWeights {
 public:
  explicit FusionWeights(std::vector<double> raw) : w_(std::move(raw)) {
    if (w_.empty()) throw Error(Errc::InvalidWeights, "no weights");
    double sum = 0.0;
    for (double x : w_) {
      if (!std::isfinite(x) || x < 0) throw Error(Errc::InvalidWeights, "weights must be finite and >= 0");
      sum += x;
    }
    if (sum <= 0) throw Error(Errc::InvalidWeights, "weights sum to zero");
    for (double& x : w_) x /= sum;
  }

  static FusionWeights uniform(std::size_t models) { return FusionWeights(std::vector<double>(models, 1.0)); }

  std::size_t size() const noexcept { return w_.size(); }
  double operator[](std::size_t m) const { return w_.at(m); }
  std::span<const double> values() const noexcept { return w_; }

 private:
  std::vector<double> w_;
};

struct CandidateProgram {
  Program program;
  std::vector<double> per_model_scores;
};

struct FusionResult {
  Program program;
  double fused_score = 0.0;
  CanonicalForm form;
};

/// Weighted marginalization over candidate programs. Candidates with the same canonical
/// form pool their per-model scores; each pool scores sum_m w_m * score_m and the best
/// pool wins, ties going to the lexicographically smallest serialized program.
inline FusionResult weighted_program_fusion(std::span<const CandidateProgram> candidates, const FusionWeights& w) {
  if (candidates.empty()) throw Error(Errc::EmptyInput, "no candidates");
  struct Pool {
    std::vector<double> scores;
    const Program* representative;
    std::string representative_text;
  };
  SymbolTable symbols;
  std::map<CanonicalForm, Pool> pools;
  for (const auto& c : candidates) {
    if (c.per_model_scores.size() != w.size()) {
      throw Error(Errc::DimensionMismatch, std::to_string(c.per_model_scores.size()) + " scores for " +
                                               std::to_string(w.size()) + " models");
    }
    for (double s : c.per_model_scores) {
      if (!std::isfinite(s) || s < 0) throw Error(Errc::InvalidArgument, "candidate scores must be finite and >= 0");
    }
    CanonicalForm form = canonicalize(symbolize(c.program, symbols));
    std::string text = serialize_program(c.program);
    auto [it, inserted] = pools.try_emplace(form, Pool{std::vector<double>(w.size(), 0.0), &c.program, text});
    Pool& pool = it->second;
    for (std::size_t m = 0; m < w.size(); ++m) pool.scores[m] += c.per_model_scores[m];
    if (!inserted && text < pool.representative_text) {
      pool.representative = &c.program;
      pool.representative_text = std::move(text);
    }
  }

  const std::pair<const CanonicalForm, Pool>* best = nullptr;
  double best_score = 0.0;
  for (const auto& entry : pools) {
    double fused = 0.0;
    for (std::size_t m = 0; m < w.size(); ++m) fused += w[m] * entry.second.scores[m];
    if (!best || fused > best_score ||
        (fused == best_score && entry.second.representative_text < best->second.representative_text)) {
      best = &entry;
      best_score = fused;
    }
  }
  return {*best->second.representative, best_score, best->first};
}

}  // namespace finqa
