#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <string_view>

#include "vsqa/metrics/ngram.hpp"
#include "vsqa/metrics/numbers.hpp"
#include "vsqa/metrics/text.hpp"

namespace vsqa::metrics {

inline constexpr double kUndefined = std::numeric_limits<double>::quiet_NaN();

/// All rule-based scores for one (reference, prediction) pair. Numerical values
/// are NaN when either side has no numbers.
struct MetricScores {
  double mean_relative_error = kUndefined;
  double numerical_score = kUndefined;
  double word_recall = 0.0;
  std::array<double, 4> bleu{};
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rouge_l = 0.0;
  double cider = 0.0;
};

/// Everything except CIDEr, which needs the corpus.
inline MetricScores score_pair(std::string_view reference, std::string_view predicted, const MetricConfig& cfg = {}) {
  cfg.validate();
  MetricScores s;
  const auto num = numerical_score(reference, predicted, cfg);
  s.mean_relative_error = num.mean_relative_error;
  s.numerical_score = num.score;
  s.word_recall = word_recall(reference, predicted);
  const auto ref = surface_tokens(reference);
  const auto hyp = surface_tokens(predicted);
  for (int n = 1; n <= 4; ++n) s.bleu[n - 1] = n <= cfg.bleu_max_n ? bleu(ref, hyp, n) : kUndefined;
  const auto r = rouge(ref, hyp);
  s.rouge1 = r.rouge1;
  s.rouge2 = r.rouge2;
  s.rouge_l = r.rouge_l;
  return s;
}

}  // namespace vsqa::metrics
