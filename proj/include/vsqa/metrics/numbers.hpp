#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vsqa::metrics {

struct MetricConfig {
  double lambda = 1.0;
  double epsilon = 1e-6;
  int bleu_max_n = 4;
  std::string stopword_list = "nltk-english";
  std::array<double, 4> cider_weights{0.25, 0.25, 0.25, 0.25};

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("metric lambda must be > 0");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw std::invalid_argument("metric epsilon must be > 0");
    if (bleu_max_n < 1 || bleu_max_n > 4) throw std::invalid_argument("bleu_max_n must be in [1, 4]");
    if (stopword_list != "nltk-english") throw std::invalid_argument("unknown stopword list: " + stopword_list);
    double sum = 0.0;
    for (double w : cider_weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("cider weights must be >= 0");
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("cider weights must sum to 1");
  }
};

namespace detail {

inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_word_char(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80;
}

}  // namespace detail

/// Signed decimals and scientific notation, in textual order. Digits glued to a
/// preceding letter ("x2", "abc123") are skipped; trailing units ("10Hz") are fine.
inline std::vector<double> extract_numbers(std::string_view text) {
  using detail::is_digit;
  std::vector<double> out;
  const std::size_t n = text.size();
  std::size_t i = 0;
  while (i < n) {
    const bool sign = (text[i] == '-' || text[i] == '+');
    std::size_t start = i;
    std::size_t j = sign ? i + 1 : i;
    const bool leading_dot = j + 1 < n && text[j] == '.' && is_digit(text[j + 1]);
    if (j >= n || !(is_digit(text[j]) || leading_dot)) {
      ++i;
      continue;
    }
    // A sign only counts when it does not follow a word or number ("5-6" is two numbers).
    if (sign && start > 0 && (std::isalnum(static_cast<unsigned char>(text[start - 1])) || text[start - 1] == '.')) {
      ++start;
    }
    const bool embedded = start > 0 && (detail::is_word_char(text[start - 1]) || is_digit(text[start - 1]));
    while (j < n && is_digit(text[j])) ++j;
    if (j + 1 < n && text[j] == '.' && is_digit(text[j + 1])) {
      ++j;
      while (j < n && is_digit(text[j])) ++j;
    }
    if (j < n && (text[j] == 'e' || text[j] == 'E')) {
      std::size_t k = j + 1;
      if (k < n && (text[k] == '+' || text[k] == '-')) ++k;
      if (k < n && is_digit(text[k])) {
        while (k < n && is_digit(text[k])) ++k;
        // "5e3x" still counts; "5em" is 5 followed by a word.
        j = k;
      }
    }
    if (!embedded) {
      const std::string token(text.substr(start, j - start));
      const double v = std::strtod(token.c_str(), nullptr);
      if (std::isfinite(v)) out.push_back(v);
    }
    // Skip the rest of an alphanumeric run so "x2y3" yields nothing.
    while (j < n && (detail::is_word_char(text[j]) || (embedded && is_digit(text[j])))) ++j;
    i = j;
  }
  return out;
}

struct NumericalResult {
  double mean_relative_error = std::numeric_limits<double>::quiet_NaN();
  double score = std::numeric_limits<double>::quiet_NaN();
  std::size_t compared = 0;

  bool defined() const { return !std::isnan(score); }
};

/// Index-paired relative error over min(n, k) numbers, mapped through exp(-lambda * mean).
inline NumericalResult numerical_score(const std::vector<double>& reference, const std::vector<double>& predicted,
                                       const MetricConfig& cfg = {}) {
  cfg.validate();
  NumericalResult r;
  if (reference.empty() || predicted.empty()) return r;
  r.compared = std::min(reference.size(), predicted.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < r.compared; ++i) {
    sum += std::abs(predicted[i] - reference[i]) / std::max(std::abs(reference[i]), cfg.epsilon);
  }
  r.mean_relative_error = sum / static_cast<double>(r.compared);
  r.score = std::exp(-cfg.lambda * r.mean_relative_error);
  return r;
}

inline NumericalResult numerical_score(std::string_view reference, std::string_view predicted,
                                       const MetricConfig& cfg = {}) {
  return numerical_score(extract_numbers(reference), extract_numbers(predicted), cfg);
}

}  // namespace vsqa::metrics
