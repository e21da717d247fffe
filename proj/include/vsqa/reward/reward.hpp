#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsqa/reward/text_norm.hpp"
#include "vsqa/reward/vocabulary.hpp"

namespace vsqa::reward {

struct RewardConfig {
  double beta_exact = 0.1;
  double clamp_lo = 0.0;
  double clamp_hi = 1.0;

  void validate() const {
    if (!(beta_exact >= 0.0) || !std::isfinite(beta_exact)) throw std::invalid_argument("beta_exact must be >= 0");
    if (!(clamp_lo <= clamp_hi)) throw std::invalid_argument("clamp_lo must not exceed clamp_hi");
  }
};

namespace detail {

inline std::size_t lcs_length(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1, 0);
  for (char x : a) {
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

/// Plain Levenshtein edit distance (insert, delete, substitute all cost 1).
inline std::size_t levenshtein(std::string_view a, std::string_view b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0u : 1u)});
      diag = up;
    }
  }
  return row[b.size()];
}

/// Similarity in [0, 100] on normalized text: 100 * (1 - indel / (len_a + len_b)),
/// where indel counts insertions and deletions only. Two empty strings score 100.
inline double fuzzy_ratio(std::string_view a, std::string_view b) {
  const std::string x = normalize_label(a);
  const std::string y = normalize_label(b);
  const std::size_t total = x.size() + y.size();
  if (total == 0) return 100.0;
  return 100.0 * 2.0 * static_cast<double>(detail::lcs_length(x, y)) / static_cast<double>(total);
}

struct BestMatch {
  double score = 0.0;
  std::string synonym;
  double weight = 0.0;
};

/// Highest-scoring synonym; an earlier entry keeps its place on ties.
inline BestMatch find_best_match(std::string_view answer, const std::vector<Synonym>& acceptable) {
  if (acceptable.empty()) throw std::invalid_argument("no acceptable answers to match against");
  BestMatch best;
  for (const auto& s : acceptable) {
    const double score = fuzzy_ratio(answer, s.text);
    if (score > best.score) best = {score, s.text, s.weight};
  }
  return best;
}

inline double calculate_reward(const BestMatch& match, const RewardConfig& cfg = {}) {
  double s = match.score / 100.0 * match.weight;
  if (match.score == 100.0) s += cfg.beta_exact;
  return std::clamp(s, cfg.clamp_lo, cfg.clamp_hi);
}

/// Text of the last complete <answer>...</answer> span, trimmed; the whole text otherwise.
inline std::string extract_answer(std::string_view raw) {
  static constexpr std::string_view kOpen = "<answer>";
  static constexpr std::string_view kClose = "</answer>";
  std::optional<std::pair<std::size_t, std::size_t>> last;
  std::optional<std::size_t> open_end;
  std::size_t i = 0;
  while (i < raw.size()) {
    if (raw.compare(i, kOpen.size(), kOpen) == 0) {
      open_end = i + kOpen.size();
      i = *open_end;
    } else if (raw.compare(i, kClose.size(), kClose) == 0) {
      if (open_end) last = std::make_pair(*open_end, i);
      open_end.reset();
      i += kClose.size();
    } else {
      ++i;
    }
  }
  if (!last) return std::string(trim(raw));
  return std::string(trim(raw.substr(last->first, last->second - last->first)));
}

/// Text between the first <think> and the next </think>, if present.
inline std::optional<std::string> extract_thought(std::string_view raw) {
  const auto open = raw.find("<think>");
  if (open == std::string_view::npos) return std::nullopt;
  const auto close = raw.find("</think>", open);
  if (close == std::string_view::npos) return std::nullopt;
  return std::string(trim(raw.substr(open + 7, close - open - 7)));
}

struct Completion {
  std::string raw;
  std::optional<std::string> thought;
  std::string answer;

  static Completion parse(std::string raw_text) {
    Completion c;
    c.thought = extract_thought(raw_text);
    c.answer = extract_answer(raw_text);
    c.raw = std::move(raw_text);
    return c;
  }
};

struct RewardDetail {
  double reward = 0.0;
  std::string label;
  std::string answer;
  std::optional<BestMatch> match;  // empty when the label is unknown
};

inline RewardDetail score_completion(std::string_view completion, std::string_view gold,
                                     const SynonymVocabulary& vocab, const RewardConfig& cfg = {}) {
  RewardDetail d;
  d.answer = extract_answer(completion);
  d.label = normalize_label(extract_answer(gold));
  const auto* acceptable = vocab.find(d.label);
  if (acceptable == nullptr) return d;
  d.match = find_best_match(d.answer, *acceptable);
  d.reward = calculate_reward(*d.match, cfg);
  return d;
}

/// One reward per completion; labels missing from the vocabulary score 0.
inline std::vector<double> reward_batch(const std::vector<std::string>& completions,
                                        const std::vector<std::string>& gold_answers,
                                        const SynonymVocabulary& vocab, const RewardConfig& cfg = {}) {
  cfg.validate();
  if (completions.size() != gold_answers.size()) {
    throw std::invalid_argument("completions and gold answers differ in length");
  }
  std::vector<double> out;
  out.reserve(completions.size());
  for (std::size_t i = 0; i < completions.size(); ++i) {
    out.push_back(score_completion(completions[i], gold_answers[i], vocab, cfg).reward);
  }
  return out;
}

}  // namespace vsqa::reward
