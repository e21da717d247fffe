#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "oracle_values.hpp"
#include "vsqa/metrics/scores.hpp"

namespace m = vsqa::metrics;

TEST(ExtractNumbers, AnswerSentences) {
  EXPECT_EQ(m::extract_numbers("The amplitude of this signal is 0.29."), std::vector<double>{0.29});
  EXPECT_TRUE(m::extract_numbers("no numbers here").empty());
  EXPECT_EQ(m::extract_numbers("[0.12] seconds"), std::vector<double>{0.12});
  EXPECT_EQ(m::extract_numbers("The shock interval of this signal is [0.12] seconds."), std::vector<double>{0.12});
}

TEST(ExtractNumbers, SignsScientificUnitsAndEmbeddedDigits) {
  EXPECT_EQ(m::extract_numbers("phase -1.57 and +2"), (std::vector<double>{-1.57, 2.0}));
  EXPECT_EQ(m::extract_numbers("1e3 and 2.5E-2"), (std::vector<double>{1000.0, 0.025}));
  EXPECT_EQ(m::extract_numbers("10Hz carrier, 120 Hz"), (std::vector<double>{10.0, 120.0}));
  EXPECT_EQ(m::extract_numbers("model x2 and abc123 and CH4"), std::vector<double>{});
  EXPECT_EQ(m::extract_numbers("range 5-6"), (std::vector<double>{5.0, 6.0}));
  EXPECT_EQ(m::extract_numbers("[0.1, 0.2, 0.3]"), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_EQ(m::extract_numbers("value .5"), std::vector<double>{0.5});
}

TEST(NumericalScore, MatchesHighPrecisionOracle) {
  const auto r = m::numerical_score("50", "50.14");
  EXPECT_NEAR(r.mean_relative_error, oracle::kEMean50, 1e-12);
  EXPECT_NEAR(r.score, oracle::kNumericalScore50, 1e-9);
  EXPECT_EQ(r.compared, 1u);
}

TEST(NumericalScore, ExactAndUndefinedCases) {
  const auto exact = m::numerical_score(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0, 2.0});
  EXPECT_EQ(exact.mean_relative_error, 0.0);
  EXPECT_EQ(exact.score, 1.0);
  EXPECT_TRUE(std::isnan(m::numerical_score(std::vector<double>{}, std::vector<double>{1.0}).score));
  EXPECT_TRUE(std::isnan(m::numerical_score(std::vector<double>{1.0}, std::vector<double>{}).score));
  EXPECT_FALSE(m::numerical_score("no numbers", "42").defined());
}

TEST(NumericalScore, UsesShorterSequenceAndEpsilonFloor) {
  const auto r = m::numerical_score(std::vector<double>{10.0, 20.0, 30.0}, std::vector<double>{11.0});
  EXPECT_EQ(r.compared, 1u);
  EXPECT_DOUBLE_EQ(r.mean_relative_error, 0.1);
  const auto z = m::numerical_score(std::vector<double>{0.0}, std::vector<double>{1e-6});
  EXPECT_DOUBLE_EQ(z.mean_relative_error, 1.0);
}

TEST(NumericalScore, StrictlyDecreasingAndScaleInvariant) {
  double previous = 2.0;
  for (int i = 0; i < 20; ++i) {
    const auto r = m::numerical_score(std::vector<double>{5.0, 7.0}, std::vector<double>{5.0 + 0.3 * i, 7.0});
    EXPECT_LT(r.score, previous);
    previous = r.score;
  }
  const auto a = m::numerical_score(std::vector<double>{3.0, -4.0}, std::vector<double>{3.3, -5.0});
  const auto b = m::numerical_score(std::vector<double>{-21.0, 28.0}, std::vector<double>{-23.1, 35.0});
  EXPECT_NEAR(a.mean_relative_error, b.mean_relative_error, 1e-12);
}

TEST(MetricConfig, RejectsInvalidValues) {
  m::MetricConfig c;
  c.lambda = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.epsilon = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.bleu_max_n = 5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(NormalizeTokens, Pipeline) {
  EXPECT_EQ(m::normalize_tokens("The Signal, the SIGNAL."), m::TokenSet{"signal"});
  EXPECT_EQ(m::normalize_tokens("oscillates periodically"), (m::TokenSet{"oscillate", "periodically"}));
  EXPECT_TRUE(m::normalize_tokens("").empty());
  EXPECT_EQ(m::normalize_tokens("50.0 Hertz"), (m::TokenSet{"50", "hz"}));
  EXPECT_EQ(m::normalize_tokens("50hz"), (m::TokenSet{"50", "hz"}));
  EXPECT_EQ(m::normalize_tokens("The phase is -1.50 radians"), (m::TokenSet{"phase", "-1.5", "radian"}));
  EXPECT_EQ(m::normalize_tokens("frequencies of harmonics"), (m::TokenSet{"frequency", "harmonic"}));
  EXPECT_EQ(m::normalize_tokens("0.12 seconds"), (m::TokenSet{"0.12", "second"}));
}

TEST(Lemmatize, SuffixRulesAndExceptions) {
  EXPECT_EQ(m::lemmatize("signals"), "signal");
  EXPECT_EQ(m::lemmatize("boxes"), "box");
  EXPECT_EQ(m::lemmatize("analysis"), "analysis");
  EXPECT_EQ(m::lemmatize("analyses"), "analysis");
  EXPECT_EQ(m::lemmatize("class"), "class");
  EXPECT_EQ(m::lemmatize("series"), "series");
  EXPECT_EQ(m::lemmatize("has"), "has");
}

TEST(CanonicalNumber, Representations) {
  EXPECT_EQ(m::canonical_number("50.0"), "50");
  EXPECT_EQ(m::canonical_number("0.50"), "0.5");
  EXPECT_EQ(m::canonical_number("007"), "7");
  EXPECT_EQ(m::canonical_number("-0.0"), "0");
  EXPECT_EQ(m::canonical_number("abc"), "abc");
}

TEST(WordRecall, EdgeCases) {
  EXPECT_EQ(m::word_recall(m::TokenSet{"a", "b"}, m::TokenSet{"a", "b"}), 100.0);
  EXPECT_EQ(m::word_recall(m::TokenSet{}, m::TokenSet{"x"}), 100.0);
  EXPECT_EQ(m::word_recall(m::TokenSet{"a", "b", "c", "d"}, m::TokenSet{"a", "b"}), 50.0);
  EXPECT_EQ(m::word_recall(m::TokenSet{"a"}, m::TokenSet{}), 0.0);
}

TEST(WordRecall, MonotoneUnderAddedPredictionTokens) {
  const m::TokenSet ref{"alpha", "beta", "gamma", "delta", "epsilon"};
  const std::vector<std::string> pool{"zeta", "beta", "eta", "delta", "alpha", "theta", "epsilon", "gamma"};
  m::TokenSet pred;
  double previous = m::word_recall(ref, pred);
  for (const auto& t : pool) {
    pred.insert(t);
    const double now = m::word_recall(ref, pred);
    EXPECT_GE(now, previous);
    previous = now;
  }
  EXPECT_EQ(previous, 100.0);
}

TEST(Bleu, ToyCorpusMatchesReference) {
  for (std::size_t i = 0; i < oracle::kToyCorpus.size(); ++i) {
    const auto& pair = oracle::kToyCorpus[i];
    const auto got = m::bleu_1_to_4(pair.reference, pair.prediction);
    for (int n = 0; n < 4; ++n) {
      EXPECT_NEAR(got[n], oracle::kBleu[i][n], 1e-6) << "row " << i << " BLEU-" << n + 1;
    }
  }
}

TEST(Bleu, IdentityDisjointAndEmpty) {
  const auto same = m::bleu_1_to_4("a b c d e", "a b c d e");
  for (double v : same) EXPECT_DOUBLE_EQ(v, 1.0);
  const auto none = m::bleu_1_to_4("a b c", "x y z");
  EXPECT_LT(none[0], 1e-6);
  const auto empty = m::bleu_1_to_4("a b c", "");
  for (double v : empty) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(m::bleu({"a"}, {"a"}, 0), std::invalid_argument);
  EXPECT_THROW(m::bleu({"a"}, {"a"}, 5), std::invalid_argument);
}

TEST(Rouge, ToyCorpusMatchesReference) {
  for (std::size_t i = 0; i < oracle::kToyCorpus.size(); ++i) {
    const auto& pair = oracle::kToyCorpus[i];
    const auto got = m::rouge(pair.reference, pair.prediction);
    EXPECT_NEAR(got.rouge1, oracle::kRouge[i][0], 1e-6) << "row " << i;
    EXPECT_NEAR(got.rouge2, oracle::kRouge[i][1], 1e-6) << "row " << i;
    EXPECT_NEAR(got.rouge_l, oracle::kRouge[i][2], 1e-6) << "row " << i;
  }
}

TEST(Rouge, IdentityDisjointAndEmpty) {
  const auto same = m::rouge("the carrier is 100 hz", "the carrier is 100 hz");
  EXPECT_DOUBLE_EQ(same.rouge1, 1.0);
  EXPECT_DOUBLE_EQ(same.rouge2, 1.0);
  EXPECT_DOUBLE_EQ(same.rouge_l, 1.0);
  const auto none = m::rouge("a b c", "x y z");
  EXPECT_EQ(none.rouge1, 0.0);
  EXPECT_EQ(none.rouge2, 0.0);
  EXPECT_EQ(none.rouge_l, 0.0);
  const auto empty = m::rouge("", "");
  EXPECT_EQ(empty.rouge1, 0.0);
  EXPECT_EQ(empty.rouge_l, 0.0);
}

TEST(BleuRouge, PrecisionVersusRecallOrientation) {
  // Prediction is a strict subsequence of the reference.
  const std::string ref = "the signal decays after each impact";
  const std::string pred = "signal decays after each impact";
  const auto ref_tokens = m::surface_tokens(ref);
  const auto pred_tokens = m::surface_tokens(pred);
  const auto unigrams = m::ngram_counts(pred_tokens, 1);
  int matched = 0;
  for (const auto& [gram, count] : unigrams) matched += count;
  EXPECT_EQ(matched, static_cast<int>(pred_tokens.size()));
  const double bp = std::exp(1.0 - static_cast<double>(ref_tokens.size()) / pred_tokens.size());
  EXPECT_LT(bp, 1.0);
  // Unigram precision is 1, so BLEU-1 equals the brevity penalty.
  EXPECT_NEAR(m::bleu(ref_tokens, pred_tokens, 1), bp, 1e-12);
  // ROUGE-1 recall component is 5/6; F1 with precision 1.
  const double recall = 5.0 / 6.0;
  EXPECT_NEAR(m::rouge(ref, pred).rouge1, 2.0 * recall / (1.0 + recall), 1e-12);
}

TEST(Cider, ToyCorpusMatchesReference) {
  std::vector<m::TextPair> corpus;
  for (const auto& p : oracle::kToyCorpus) corpus.push_back({p.reference, p.prediction});
  const auto got = m::cider(corpus);
  ASSERT_EQ(got.size(), oracle::kCider.size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], oracle::kCider[i], 1e-4) << "row " << i;
}

TEST(Cider, SelfSimilarityAndOrthogonal) {
  const std::vector<m::TextPair> corpus{{"alpha beta gamma delta", "alpha beta gamma delta"},
                                        {"one two three four", "one two three four"},
                                        {"red green blue cyan", "red green blue cyan"}};
  const auto s = m::cider(corpus);
  EXPECT_NEAR(s[0], 10.0, 1e-12);
  EXPECT_NEAR(s[1], s[0], 1e-12);
  EXPECT_NEAR(s[2], s[0], 1e-12);

  const std::vector<m::TextPair> orth{{"alpha beta", "zeta eta"}, {"one two", "three four"}};
  for (double v : m::cider(orth)) EXPECT_EQ(v, 0.0);
}

TEST(Cider, SingleItemCorpusIsDegenerate) {
  EXPECT_EQ(m::cider({{"a b c", "a b c"}}).front(), 0.0);
  EXPECT_THROW(m::cider({}), std::invalid_argument);
}

TEST(Cider, PermutationInvariant) {
  std::vector<m::TextPair> corpus;
  for (const auto& p : oracle::kToyCorpus) corpus.push_back({p.reference, p.prediction});
  const auto base = m::cider(corpus);
  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937 rng(3);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<m::TextPair> shuffled;
  for (auto i : order) shuffled.push_back(corpus[i]);
  const auto got = m::cider(shuffled);
  for (std::size_t k = 0; k < order.size(); ++k) EXPECT_NEAR(got[k], base[order[k]], 1e-12);
}

TEST(ScorePair, IdenticalAnswerScoresPerfectly) {
  const auto s = m::score_pair("The base frequency of this signal is 50 Hz.", "The base frequency of this signal is 50 Hz.");
  EXPECT_EQ(s.word_recall, 100.0);
  EXPECT_EQ(s.numerical_score, 1.0);
  for (double b : s.bleu) EXPECT_DOUBLE_EQ(b, 1.0);
  EXPECT_DOUBLE_EQ(s.rouge1, 1.0);
  EXPECT_DOUBLE_EQ(s.rouge2, 1.0);
  EXPECT_DOUBLE_EQ(s.rouge_l, 1.0);
  const auto t = m::score_pair("This is an amplitude modulated signal.", "This is an amplitude modulated signal.");
  EXPECT_TRUE(std::isnan(t.numerical_score));
}
