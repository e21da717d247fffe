#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsqa/metrics/numbers.hpp"
#include "vsqa/metrics/text.hpp"

namespace vsqa::metrics {

using Tokens = std::vector<std::string>;
using NgramCounts = std::map<std::vector<std::string>, int>;

inline NgramCounts ngram_counts(const Tokens& tokens, std::size_t n) {
  NgramCounts counts;
  if (n == 0 || tokens.size() < n) return counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
    ++counts[std::vector<std::string>(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                                      tokens.begin() + static_cast<std::ptrdiff_t>(i + n))];
  }
  return counts;
}

inline constexpr double kBleuSmoothingEpsilon = 1e-9;

/// Cumulative sentence BLEU-N against a single reference: uniform weights, clipped
/// precisions, zero numerators smoothed to epsilon / denominator, standard brevity penalty.
inline double bleu(const Tokens& reference, const Tokens& predicted, int max_n) {
  if (max_n < 1 || max_n > 4) throw std::invalid_argument("BLEU order must be in [1, 4]");
  if (predicted.empty()) return 0.0;

  std::array<int, 4> matched{}, total{};
  for (int n = 1; n <= max_n; ++n) {
    const auto hyp = ngram_counts(predicted, static_cast<std::size_t>(n));
    const auto ref = ngram_counts(reference, static_cast<std::size_t>(n));
    for (const auto& [gram, count] : hyp) {
      const auto it = ref.find(gram);
      matched[n - 1] += std::min(count, it == ref.end() ? 0 : it->second);
      total[n - 1] += count;
    }
  }
  if (matched[0] == 0) return 0.0;

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    const double denom = std::max(1, total[n - 1]);
    const double num = matched[n - 1] == 0 ? kBleuSmoothingEpsilon : matched[n - 1];
    log_sum += std::log(num / denom) / max_n;
  }
  const double r = static_cast<double>(reference.size());
  const double c = static_cast<double>(predicted.size());
  const double bp = c > r ? 1.0 : std::exp(1.0 - r / c);
  return bp * std::exp(log_sum);
}

inline std::array<double, 4> bleu_1_to_4(std::string_view reference, std::string_view predicted) {
  const auto ref = surface_tokens(reference);
  const auto hyp = surface_tokens(predicted);
  return {bleu(ref, hyp, 1), bleu(ref, hyp, 2), bleu(ref, hyp, 3), bleu(ref, hyp, 4)};
}

struct RougeScores {
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rouge_l = 0.0;
};

namespace detail {

inline double f1(double overlap, double pred_total, double ref_total) {
  if (pred_total <= 0.0 || ref_total <= 0.0) return 0.0;
  const double p = overlap / pred_total;
  const double r = overlap / ref_total;
  return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
}

inline double rouge_n(const Tokens& reference, const Tokens& predicted, std::size_t n) {
  const auto ref = ngram_counts(reference, n);
  const auto hyp = ngram_counts(predicted, n);
  int overlap = 0, ref_total = 0, hyp_total = 0;
  for (const auto& [gram, count] : ref) ref_total += count;
  for (const auto& [gram, count] : hyp) {
    hyp_total += count;
    const auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  return f1(overlap, hyp_total, ref_total);
}

inline std::size_t lcs_length(const Tokens& a, const Tokens& b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (const auto& x : a) {
    std::size_t diag = 0;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = x == b[j - 1] ? diag + 1 : std::max(row[j], row[j - 1]);
      diag = up;
    }
  }
  return row[b.size()];
}

}  // namespace detail

/// ROUGE-1, ROUGE-2 and ROUGE-L as F1. Either side empty gives 0.
inline RougeScores rouge(const Tokens& reference, const Tokens& predicted) {
  RougeScores s;
  s.rouge1 = detail::rouge_n(reference, predicted, 1);
  s.rouge2 = detail::rouge_n(reference, predicted, 2);
  s.rouge_l = detail::f1(static_cast<double>(detail::lcs_length(reference, predicted)),
                         static_cast<double>(predicted.size()), static_cast<double>(reference.size()));
  return s;
}

inline RougeScores rouge(std::string_view reference, std::string_view predicted) {
  return rouge(surface_tokens(reference), surface_tokens(predicted));
}

/// Corpus-level document frequencies over the reference side. Build once, then
/// score items independently (and concurrently: score() is const).
class CiderIdf {
 public:
  static constexpr std::size_t kMaxN = 4;

  explicit CiderIdf(const std::vector<Tokens>& references, std::array<double, 4> weights = {0.25, 0.25, 0.25, 0.25})
      : weights_(weights), log_docs_(references.empty() ? 0.0 : std::log(static_cast<double>(references.size()))) {
    if (references.empty()) throw std::invalid_argument("CIDEr needs a non-empty corpus");
    for (const auto& ref : references) {
      for (std::size_t n = 1; n <= kMaxN; ++n) {
        for (const auto& [gram, count] : ngram_counts(ref, n)) ++doc_freq_[gram];
      }
    }
  }

  /// Plain CIDEr for one item: mean over n of TF-IDF cosine, times 10.
  double score(const Tokens& reference, const Tokens& predicted) const {
    double total = 0.0;
    for (std::size_t n = 1; n <= kMaxN; ++n) {
      const auto hyp = weigh(ngram_counts(predicted, n));
      const auto ref = weigh(ngram_counts(reference, n));
      double dot = 0.0, hyp_norm = 0.0, ref_norm = 0.0;
      for (const auto& [gram, w] : hyp) {
        hyp_norm += w * w;
        if (const auto it = ref.find(gram); it != ref.end()) dot += w * it->second;
      }
      for (const auto& [gram, w] : ref) ref_norm += w * w;
      if (hyp_norm != 0.0 && ref_norm != 0.0) total += weights_[n - 1] * dot / (std::sqrt(hyp_norm) * std::sqrt(ref_norm));
    }
    return 10.0 * total;
  }

 private:
  std::map<std::vector<std::string>, double> weigh(const NgramCounts& counts) const {
    std::map<std::vector<std::string>, double> out;
    for (const auto& [gram, tf] : counts) {
      const auto it = doc_freq_.find(gram);
      const double df = it == doc_freq_.end() ? 1.0 : std::max(1.0, static_cast<double>(it->second));
      out.emplace(gram, tf * (log_docs_ - std::log(df)));
    }
    return out;
  }

  std::array<double, 4> weights_;
  double log_docs_;
  std::map<std::vector<std::string>, int> doc_freq_;
};

struct TextPair {
  std::string reference;
  std::string prediction;
};

inline std::vector<double> cider(const std::vector<TextPair>& corpus, const MetricConfig& cfg = {}) {
  std::vector<Tokens> refs, preds;
  for (const auto& p : corpus) {
    refs.push_back(surface_tokens(p.reference));
    preds.push_back(surface_tokens(p.prediction));
  }
  const CiderIdf idf(refs, cfg.cider_weights);
  std::vector<double> out;
  out.reserve(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) out.push_back(idf.score(refs[i], preds[i]));
  return out;
}

}  // namespace vsqa::metrics
