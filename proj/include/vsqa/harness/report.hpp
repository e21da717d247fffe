#pragma once

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vsqa/harness/evaluation.hpp"
#include "vsqa/harness/referee.hpp"
#include "vsqa/waveforms/png.hpp"
#include "vsqa/waveforms/raster.hpp"

namespace vsqa::harness {

inline constexpr int kReportFormatVersion = 1;
inline constexpr const char* kSamplesFile = "samples.jsonl";
inline constexpr const char* kReportFile = "report.json";
inline constexpr const char* kSummaryFile = "summary.csv";
inline constexpr const char* kRefereeFile = "referee.jsonl";

// ---------------------------------------------------------------------------
// Stable text output: sorted keys, six decimals, NaN as null.
// ---------------------------------------------------------------------------

/// Six decimals. printf rounds the exact binary value, which settles ties to even.
inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s.erase(0, 1);
  return s;
}

/// JSON number or null for undefined values.
inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

namespace detail {

inline void write_fixed(std::string& out, const nlohmann::json& j, int depth, bool pretty) {
  const auto newline = [&](int d) {
    if (!pretty) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(2 * d), ' ');
  };
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : j.items()) {  // std::map order: sorted keys
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += nlohmann::json(key).dump();
        out += pretty ? ": " : ":";
        write_fixed(out, value, depth + 1, pretty);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case nlohmann::json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out.push_back(',');
        newline(depth + 1);
        write_fixed(out, j[i], depth + 1, pretty);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? fixed6(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detail

inline std::string dump_fixed(const nlohmann::json& j, bool pretty = true) {
  std::string out;
  detail::write_fixed(out, j, 0, pretty);
  return out;
}

// ---------------------------------------------------------------------------
// Report assembly
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& referee_metric_names() {
  static const std::vector<std::string> names{"similarity", "parameter"};
  return names;
}

struct EvalReport {
  std::string model_name = "model";
  std::vector<EvalSample> samples;
  std::vector<metrics::MetricScores> scores;
  std::vector<RefereeResult> referee;  // empty or all-skipped: referee section marked skipped
  std::size_t missing_predictions = 0;
  std::size_t unused_predictions = 0;
  Aggregation rule;
  Aggregation referee_summary;

  bool referee_ran() const {
    return std::any_of(referee.begin(), referee.end(),
                       [](const RefereeResult& r) { return r.status != RefereeStatus::Skipped; });
  }
};

/// Aggregates rule-based scores and, when present, referee scores (macro-averaged the same way).
inline EvalReport make_report(std::string model_name, const LoadedSamples& loaded,
                              std::vector<metrics::MetricScores> scores, std::vector<RefereeResult> referee = {}) {
  if (scores.size() != loaded.samples.size()) throw std::invalid_argument("one score row per sample is required");
  if (!referee.empty() && referee.size() != loaded.samples.size()) {
    throw std::invalid_argument("one referee result per sample is required");
  }
  EvalReport r;
  r.model_name = std::move(model_name);
  r.samples = loaded.samples;
  r.scores = std::move(scores);
  r.referee = std::move(referee);
  r.missing_predictions = loaded.missing_predictions;
  r.unused_predictions = loaded.unused_predictions;
  r.rule = group_and_average(rule_rows(r.samples, r.scores), rule_metric_names());
  if (r.referee_ran()) {
    std::vector<AggregateRow> rows;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& x = r.referee[i];
      rows.push_back({r.samples[i].category, r.samples[i].question,
                      {x.similarity.value_or(metrics::kUndefined), x.parameter.value_or(metrics::kUndefined)}});
    }
    r.referee_summary = group_and_average(rows, referee_metric_names());
  }
  return r;
}

inline nlohmann::json summary_to_json(const GroupSummary& g, const std::vector<std::string>& names) {
  nlohmann::json metrics = nlohmann::json::object();
  for (std::size_t m = 0; m < names.size(); ++m) {
    metrics[names[m]] = {{"mean", number_or_null(g.metrics[m].mean)}, {"valid", g.metrics[m].valid}};
  }
  return {{"count", g.count}, {"metrics", metrics}};
}

inline nlohmann::json aggregation_to_json(const Aggregation& a) {
  nlohmann::json j;
  j["metrics"] = a.metric_names;
  j["overall"] = summary_to_json(a.overall, a.metric_names);
  j["categories"] = nlohmann::json::array();
  for (const auto& c : a.categories) {
    auto e = summary_to_json(c, a.metric_names);
    e["category"] = std::string(wf::code(c.category));
    e["label"] = std::string(wf::info(c.category).label);
    j["categories"].push_back(e);
  }
  j["groups"] = nlohmann::json::array();
  for (const auto& g : a.groups) {
    auto e = summary_to_json(g, a.metric_names);
    e["category"] = std::string(wf::code(g.category));
    e["question"] = g.question;
    j["groups"].push_back(e);
  }
  return j;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  nlohmann::json j;
  j["format_version"] = kReportFormatVersion;
  j["model"] = r.model_name;
  j["samples"] = r.samples.size();
  j["warnings"] = {{"missing_predictions", r.missing_predictions}, {"unused_predictions", r.unused_predictions}};
  j["rule_based"] = aggregation_to_json(r.rule);
  if (r.referee_ran()) {
    std::size_t ok = 0, errors = 0, skipped = 0;
    for (const auto& x : r.referee) {
      (x.status == RefereeStatus::Ok ? ok : x.status == RefereeStatus::Error ? errors : skipped)++;
    }
    j["referee"] = aggregation_to_json(r.referee_summary);
    j["referee"]["status"] = "ran";
    j["referee"]["counts"] = {{"ok", ok}, {"error", errors}, {"skipped", skipped}};
  } else {
    j["referee"] = {{"status", "skipped"}};
  }
  return j;
}

inline nlohmann::json sample_row_json(const EvalSample& s, const metrics::MetricScores& scores) {
  nlohmann::json j{{"sample_id", s.sample_id}, {"record_id", s.record_id},        {"turn", s.turn},
                   {"category", std::string(wf::code(s.category))}, {"question", s.question}, {"gold", s.gold},
                   {"prediction", s.prediction}};
  const auto values = metric_values(scores);
  nlohmann::json m = nlohmann::json::object();
  for (std::size_t k = 0; k < values.size(); ++k) m[rule_metric_names()[k]] = number_or_null(values[k]);
  j["scores"] = m;
  return j;
}

// ---------------------------------------------------------------------------
// CSV summary
// ---------------------------------------------------------------------------

struct CsvColumn {
  const char* header;
  const char* metric;
};

// Rule-based table columns, then the two referee scores.
inline constexpr CsvColumn kCsvColumns[] = {
    {"Word Recall %", "word_recall"}, {"Mean Relative Error", "mean_relative_error"},
    {"Numerical Score", "numerical_score"}, {"CIDEr", "cider"},
    {"BLEU-1", "bleu1"}, {"BLEU-2", "bleu2"}, {"BLEU-3", "bleu3"}, {"BLEU-4", "bleu4"},
    {"ROUGE-1", "rouge1"}, {"ROUGE-2", "rouge2"}, {"ROUGE-L", "rouge_l"},
};

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

inline std::string csv_header() {
  std::string h = "model,scope,samples";
  for (const auto& c : kCsvColumns) h += std::string(",") + c.header;
  return h + ",Numerical Score Valid,Referee Similarity,Referee Parameter\n";
}

inline std::string csv_value(const MetricSummary& m) { return m.valid > 0 ? fixed6(m.mean) : ""; }

inline std::size_t metric_index(const Aggregation& a, std::string_view name) {
  for (std::size_t i = 0; i < a.metric_names.size(); ++i) {
    if (a.metric_names[i] == name) return i;
  }
  throw std::out_of_range("no metric named " + std::string(name));
}

inline std::string csv_row(const EvalReport& r, const GroupSummary& g, const GroupSummary* referee,
                           const std::string& scope) {
  std::string row = csv_field(r.model_name) + "," + scope + "," + std::to_string(g.count);
  for (const auto& c : kCsvColumns) row += "," + csv_value(g.metrics[metric_index(r.rule, c.metric)]);
  row += "," + std::to_string(g.metrics[metric_index(r.rule, "numerical_score")].valid);
  for (std::size_t m = 0; m < 2; ++m) row += "," + (referee ? csv_value(referee->metrics[m]) : std::string());
  return row + "\n";
}

/// Overall row first, then one row per category.
inline std::string csv_rows(const EvalReport& r) {
  const bool ref = r.referee_ran();
  std::string out = csv_row(r, r.rule.overall, ref ? &r.referee_summary.overall : nullptr, "overall");
  for (const auto& c : r.rule.categories) {
    const GroupSummary* rc = nullptr;
    if (ref) {
      for (const auto& x : r.referee_summary.categories) {
        if (x.category == c.category) rc = &x;
      }
    }
    out += csv_row(r, c, rc, std::string(wf::code(c.category)));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Bar charts
// ---------------------------------------------------------------------------

struct Bar {
  std::string label;
  double value;  // NaN: drawn as an empty slot
};

/// Vertical bars scaled to the largest value (or to `ceiling` when given).
inline std::vector<std::uint8_t> render_bar_chart(const std::string& title, const std::vector<Bar>& bars,
                                                  double ceiling = 0.0, int width = 480, int height = 300) {
  namespace rs = waveforms::raster;
  waveforms::RgbImage img(width, height, rs::kWhite);
  const int left = 50, right = width - 10, top = 24, bottom = height - 30;
  double top_value = ceiling;
  for (const auto& b : bars) {
    if (std::isfinite(b.value)) top_value = std::max(top_value, b.value);
  }
  if (!(top_value > 0.0)) top_value = 1.0;

  rs::draw_text(img, (width - rs::text_width(title)) / 2, 6, title, rs::kBlack);
  rs::draw_line(img, left - 1, top, left - 1, bottom, rs::kBlack);
  rs::draw_line(img, left - 1, bottom, right, bottom, rs::kBlack);
  for (int tick = 0; tick <= 4; ++tick) {
    const int y = bottom - (bottom - top) * tick / 4;
    if (tick > 0) rs::draw_line(img, left, y, right, y, rs::kGrey);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", top_value * tick / 4.0);
    rs::draw_text(img, left - 4 - rs::text_width(buf), y - rs::kGlyphHeight / 2, buf, rs::kBlack);
  }
  if (!bars.empty()) {
    const int slot = (right - left) / static_cast<int>(bars.size());
    const int gap = std::max(2, slot / 5);
    for (std::size_t i = 0; i < bars.size(); ++i) {
      const int x0 = left + slot * static_cast<int>(i) + gap / 2;
      const int x1 = x0 + slot - gap;
      if (std::isfinite(bars[i].value) && bars[i].value > 0.0) {
        const int h = static_cast<int>(std::lround((bottom - top) * std::min(1.0, bars[i].value / top_value)));
        rs::fill_rect(img, x0, bottom - h, x1, bottom - 1, rs::kBlue);
      }
      rs::draw_text(img, (x0 + x1 - rs::text_width(bars[i].label)) / 2, bottom + 6, bars[i].label, rs::kBlack);
    }
  }
  return waveforms::encode_png(img);
}

inline const std::vector<std::pair<std::string, std::string>>& plotted_metrics() {
  static const std::vector<std::pair<std::string, std::string>> m{
      {"word_recall", "WORD RECALL"}, {"numerical_score", "NUMERICAL SCORE"}, {"cider", "CIDER"},
      {"bleu4", "BLEU-4"},            {"rouge_l", "ROUGE-L"}};
  return m;
}

inline std::vector<Bar> category_bars(const Aggregation& a, std::size_t metric) {
  std::vector<Bar> bars;
  for (const auto& c : a.categories) bars.push_back({std::string(wf::code(c.category)), c.metrics[metric].mean});
  return bars;
}

namespace detail {

inline void write_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace detail

struct EmitOptions {
  bool plots = true;
};

/// samples.jsonl, report.json, summary.csv, referee.jsonl (if the referee ran) and plots/*.png.
inline void emit_report(const EvalReport& r, const std::filesystem::path& out_dir, const EmitOptions& opt = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());

  std::string samples;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    samples += dump_fixed(sample_row_json(r.samples[i], r.scores[i]), false) + "\n";
  }
  detail::write_text(out_dir / kSamplesFile, samples);
  detail::write_text(out_dir / kReportFile, dump_fixed(report_to_json(r)) + "\n");
  detail::write_text(out_dir / kSummaryFile, csv_header() + csv_rows(r));

  const bool ref = r.referee_ran();
  if (ref) {
    std::string lines;
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      auto j = referee_to_json(r.referee[i]);
      j["sample_id"] = r.samples[i].sample_id;
      lines += dump_fixed(j, false) + "\n";
    }
    detail::write_text(out_dir / kRefereeFile, lines);
  }

  if (opt.plots) {
    const auto plots = out_dir / "plots";
    std::filesystem::create_directories(plots);
    for (const auto& [metric, title] : plotted_metrics()) {
      detail::write_bytes(plots / (metric + ".png"),
                          render_bar_chart(title + " BY CATEGORY", category_bars(r.rule, metric_index(r.rule, metric))));
    }
    if (ref) {
      detail::write_bytes(plots / "referee_similarity.png",
                          render_bar_chart("REFEREE SIMILARITY BY CATEGORY", category_bars(r.referee_summary, 0),
                                           kMaxRefereeScore));
      detail::write_bytes(plots / "referee_parameter.png",
                          render_bar_chart("REFEREE PARAMETER BY CATEGORY", category_bars(r.referee_summary, 1),
                                           kMaxRefereeScore));
    }
  }
}

/// Cross-model summary: one overall row per model, plus comparison bar charts.
inline void emit_comparison(const std::vector<EvalReport>& reports, const std::filesystem::path& out_dir,
                            const EmitOptions& opt = {}) {
  std::filesystem::create_directories(out_dir);
  std::string csv = csv_header();
  for (const auto& r : reports) {
    csv += csv_row(r, r.rule.overall, r.referee_ran() ? &r.referee_summary.overall : nullptr, "overall");
  }
  detail::write_text(out_dir / kSummaryFile, csv);
  if (!opt.plots || reports.empty()) return;
  const auto plots = out_dir / "plots";
  std::filesystem::create_directories(plots);
  for (const auto& [metric, title] : plotted_metrics()) {
    std::vector<Bar> bars;
    for (const auto& r : reports) bars.push_back({r.model_name, r.rule.overall.metrics[metric_index(r.rule, metric)].mean});
    detail::write_bytes(plots / ("compare_" + metric + ".png"), render_bar_chart(title + " BY MODEL", bars));
  }
}

}  // namespace vsqa::harness
