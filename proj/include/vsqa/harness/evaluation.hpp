#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vsqa/common/parallel.hpp"
#include "vsqa/metrics/scores.hpp"
#include "vsqa/sqa/dataset.hpp"

namespace vsqa::harness {

namespace wf = vsqa::waveforms;

/// One gold QA turn paired with the model's prediction for it.
struct EvalSample {
  std::string sample_id;  // "<record_id>#<turn>"
  std::string record_id;
  std::size_t turn = 0;
  wf::Category category = wf::Category::SH;
  std::string question;
  std::string prediction;
  std::string gold;

  bool operator==(const EvalSample&) const = default;
};

struct LoadedSamples {
  std::vector<EvalSample> samples;
  std::size_t missing_predictions = 0;  // gold turns with no prediction; scored against ""
  std::size_t unused_predictions = 0;   // prediction keys that match no gold turn
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string sample_key(const std::string& record_id, std::size_t turn) {
  return record_id + "#" + std::to_string(turn);
}

/// Gold turns in dataset order. A directory argument means its eval split.
inline std::vector<EvalSample> load_gold(const std::filesystem::path& dataset) {
  const auto file = std::filesystem::is_directory(dataset) ? dataset / sqa::kEvalFile : dataset;
  std::vector<EvalSample> out;
  for (const auto& r : sqa::read_records(file)) {
    for (std::size_t t = 0; t < r.qa.size(); ++t) {
      out.push_back({sample_key(r.record_id, t), r.record_id, t, r.category, r.qa[t].question, "", r.qa[t].answer});
    }
  }
  return out;
}

/// Prediction lines are {"id": record id, "turn": QA index, "prediction": text}.
inline std::map<std::string, std::string> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open predictions " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto j = nlohmann::json::parse(line);
      const auto key = sample_key(j.at("id").get<std::string>(), j.at("turn").get<std::size_t>());
      if (!out.emplace(key, j.at("prediction").get<std::string>()).second) {
        throw InputError(where + ": duplicate prediction for " + key);
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return out;
}

/// Keyed join of gold turns and predictions; the result follows dataset order.
inline LoadedSamples load_predictions(const std::filesystem::path& dataset, const std::filesystem::path& predictions) {
  LoadedSamples out;
  out.samples = load_gold(dataset);
  auto preds = read_predictions(predictions);
  for (auto& s : out.samples) {
    const auto it = preds.find(s.sample_id);
    if (it == preds.end()) {
      ++out.missing_predictions;
      continue;
    }
    s.prediction = std::move(it->second);
    preds.erase(it);
  }
  out.unused_predictions = preds.size();
  return out;
}

/// Per-sample metrics; CIDEr document frequencies come from the whole sample set.
inline std::vector<metrics::MetricScores> calculate_rule_based(const std::vector<EvalSample>& samples,
                                                               const metrics::MetricConfig& cfg = {},
                                                               std::size_t workers = 1) {
  cfg.validate();
  std::vector<metrics::MetricScores> out(samples.size());
  if (samples.empty()) return out;
  parallel_for(samples.size(), workers,
               [&](std::size_t i) { out[i] = metrics::score_pair(samples[i].gold, samples[i].prediction, cfg); });
  std::vector<metrics::TextPair> corpus;
  corpus.reserve(samples.size());
  for (const auto& s : samples) corpus.push_back({s.gold, s.prediction});
  const auto cider = metrics::cider(corpus, cfg);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].cider = cider[i];
  return out;
}

inline const std::vector<std::string>& rule_metric_names() {
  static const std::vector<std::string> names{"word_recall", "mean_relative_error", "numerical_score", "cider",
                                              "bleu1",       "bleu2",               "bleu3",           "bleu4",
                                              "rouge1",      "rouge2",              "rouge_l"};
  return names;
}

inline std::vector<double> metric_values(const metrics::MetricScores& s) {
  return {s.word_recall, s.mean_relative_error, s.numerical_score, s.cider, s.bleu[0], s.bleu[1],
          s.bleu[2],     s.bleu[3],             s.rouge1,          s.rouge2, s.rouge_l};
}

/// One row to aggregate: values align with the metric name list; NaN means "not defined here".
struct AggregateRow {
  wf::Category category;
  std::string question;
  std::vector<double> values;
};

struct MetricSummary {
  double mean = metrics::kUndefined;
  std::size_t valid = 0;
};

struct GroupSummary {
  wf::Category category = wf::Category::SH;
  std::string question;  // empty for category and overall rows
  std::size_t count = 0;
  std::vector<MetricSummary> metrics;
};

struct Aggregation {
  std::vector<std::string> metric_names;
  std::vector<GroupSummary> groups;      // (category, question), sorted
  std::vector<GroupSummary> categories;  // in category order
  GroupSummary overall;                  // unweighted mean of category means
};

namespace detail {

struct Accumulator {
  std::size_t count = 0;
  std::vector<double> sums;
  std::vector<std::size_t> valid;

  explicit Accumulator(std::size_t k = 0) : sums(k, 0.0), valid(k, 0) {}

  void add(const std::vector<double>& values) {
    ++count;
    for (std::size_t m = 0; m < values.size(); ++m) {
      if (std::isnan(values[m])) continue;
      sums[m] += values[m];
      ++valid[m];
    }
  }

  std::vector<MetricSummary> summaries() const {
    std::vector<MetricSummary> out(sums.size());
    for (std::size_t m = 0; m < sums.size(); ++m) {
      out[m].valid = valid[m];
      if (valid[m] > 0) out[m].mean = sums[m] / static_cast<double>(valid[m]);
    }
    return out;
  }
};

}  // namespace detail

/// Means per (category, question) and per category, then the overall row as the plain mean
/// of category means. NaN values are skipped and the number of values used is reported.
/// Sums run in a fixed order so results do not depend on row order within a group.
inline Aggregation group_and_average(const std::vector<AggregateRow>& rows, std::vector<std::string> metric_names) {
  const std::size_t k = metric_names.size();
  for (const auto& r : rows) {
    if (r.values.size() != k) throw std::invalid_argument("row has the wrong number of metric values");
  }
  Aggregation agg;
  agg.metric_names = std::move(metric_names);

  // Stable order for summation: category, question, then the values themselves.
  std::vector<const AggregateRow*> order;
  for (const auto& r : rows) order.push_back(&r);
  std::sort(order.begin(), order.end(), [](const AggregateRow* a, const AggregateRow* b) {
    if (a->category != b->category) return a->category < b->category;
    if (a->question != b->question) return a->question < b->question;
    for (std::size_t m = 0; m < a->values.size(); ++m) {
      const double x = a->values[m], y = b->values[m];
      if (std::isnan(x) != std::isnan(y)) return std::isnan(y);
      if (!std::isnan(x) && x != y) return x < y;
    }
    return false;
  });

  std::map<std::pair<wf::Category, std::string>, detail::Accumulator> groups;
  std::map<wf::Category, detail::Accumulator> cats;
  for (const auto* r : order) {
    groups.try_emplace({r->category, r->question}, k).first->second.add(r->values);
    cats.try_emplace(r->category, k).first->second.add(r->values);
  }
  for (const auto& [key, acc] : groups) {
    agg.groups.push_back({key.first, key.second, acc.count, acc.summaries()});
  }
  detail::Accumulator overall(k);
  for (const auto& [cat, acc] : cats) {
    auto summary = GroupSummary{cat, "", acc.count, acc.summaries()};
    overall.count += acc.count;
    for (std::size_t m = 0; m < k; ++m) {
      if (summary.metrics[m].valid == 0) continue;
      overall.sums[m] += summary.metrics[m].mean;
      ++overall.valid[m];
    }
    agg.categories.push_back(std::move(summary));
  }
  agg.overall.count = overall.count;
  agg.overall.metrics.resize(k);
  for (std::size_t m = 0; m < k; ++m) {
    std::size_t samples_valid = 0;
    for (const auto& c : agg.categories) samples_valid += c.metrics[m].valid;
    agg.overall.metrics[m].valid = samples_valid;
    if (overall.valid[m] > 0) agg.overall.metrics[m].mean = overall.sums[m] / static_cast<double>(overall.valid[m]);
  }
  return agg;
}

inline std::vector<AggregateRow> rule_rows(const std::vector<EvalSample>& samples,
                                           const std::vector<metrics::MetricScores>& scores) {
  if (samples.size() != scores.size()) throw std::invalid_argument("samples and scores differ in length");
  std::vector<AggregateRow> rows;
  rows.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    rows.push_back({samples[i].category, samples[i].question, metric_values(scores[i])});
  }
  return rows;
}

}  // namespace vsqa::harness
