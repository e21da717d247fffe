#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "vsqa/harness/pipeline.hpp"

namespace h = vsqa::harness;
namespace m = vsqa::metrics;
namespace s = vsqa::sqa;
namespace wf = vsqa::waveforms;

namespace {

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

s::SqaRecord record(const wf::SignalSpec& spec, const std::string& id) {
  const auto w = wf::synthesize(spec, wf::SamplingConfig::synthetic_default());
  auto r = s::build_sqa(spec, w, wf::compute_spectrum(w));
  r.record_id = id;
  r.image_path = "images/" + id + ".png";
  return r;
}

// Three records over two categories: two SH, one AM.
std::filesystem::path write_fixture_dataset(const std::filesystem::path& dir) {
  s::SplitResult split;
  split.eval = {record(wf::SimpleHarmonic{0.29, 50.0, 2.0}, "SH_0000"),
                record(wf::SimpleHarmonic{0.5, 20.0, 1.0}, "SH_0001"),
                record(wf::AmplitudeModulated{0.5, 100.0, 10.0}, "AM_0000")};
  split.manifest.eval[wf::Category::SH] = 2;
  split.manifest.eval[wf::Category::AM] = 1;
  s::write_dataset(split, dir);
  return dir / s::kEvalFile;
}

// Alternates exact copies with lightly edited answers so every metric varies.
std::vector<std::string> prediction_lines(const std::filesystem::path& dataset, bool skip_last = false) {
  std::vector<std::string> lines;
  const auto gold = h::load_gold(dataset);
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (skip_last && i + 1 == gold.size()) break;
    std::string pred = gold[i].gold;
    if (i % 3 == 1) pred = "I think " + pred + " roughly";
    if (i % 3 == 2) {
      for (auto& c : pred) {
        if (c == '5') c = '6';
      }
    }
    lines.push_back(nlohmann::json{{"id", gold[i].record_id}, {"turn", gold[i].turn}, {"prediction", pred}}.dump());
  }
  return lines;
}

void write_lines(const std::filesystem::path& p, const std::vector<std::string>& lines) {
  std::ofstream out(p);
  for (const auto& l : lines) out << l << '\n';
}

h::EvaluateRequest request(const std::filesystem::path& dataset, const std::filesystem::path& preds,
                           const std::filesystem::path& out) {
  h::EvaluateRequest r;
  r.dataset = dataset;
  r.predictions = preds;
  r.out_dir = out;
  return r;
}

h::AggregateRow row(wf::Category c, const std::string& q, std::vector<double> v) { return {c, q, std::move(v)}; }

std::string chat_body(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

h::RefereeConfig live_config() {
  h::RefereeConfig cfg;
  cfg.endpoint = "http://127.0.0.1:9/v1/chat/completions";
  cfg.model = "judge";
  cfg.prompt_template = h::read_text_file(h::default_prompt_path());
  cfg.retry_backoff_ms = 0;
  return cfg;
}

}  // namespace

TEST(Config, DefaultsAndValidation) {
  const auto cfg = h::config_from_json(nlohmann::json::object());
  EXPECT_FALSE(cfg.referee.enabled());
  EXPECT_EQ(cfg.metric.lambda, 1.0);
  EXPECT_EQ(cfg.reward.beta_exact, 0.1);
  EXPECT_NE(cfg.referee.prompt_template.find("{gold}"), std::string::npos);
  EXPECT_LT(cfg.referee.prompt_template.find("{gold}"), cfg.referee.prompt_template.find("{prediction}"));

  const auto custom = h::config_from_json(
      {{"metric", {{"lambda", 2.0}}}, {"referee", {{"endpoint", "http://x/v1"}, {"model", "m"}}}, {"workers", 3}});
  EXPECT_EQ(custom.metric.lambda, 2.0);
  EXPECT_TRUE(custom.referee.enabled());
  EXPECT_EQ(custom.workers, 3u);

  EXPECT_THROW(h::config_from_json({{"metric", {{"lamda", 2.0}}}}), h::ConfigError);
  EXPECT_THROW(h::config_from_json({{"metric", {{"epsilon", 0.0}}}}), h::ConfigError);
  EXPECT_THROW(h::config_from_json({{"referee", {{"timeout_s", 0}}}}), h::ConfigError);
  EXPECT_THROW(h::config_from_json({{"referee", {{"endpoint", "http://x"}, {"model", "m"}, {"prompt_template", "no slots"}}}}),
               h::ConfigError);
  EXPECT_THROW(h::config_from_json({{"sampling", {{"sample_rate_hz", -1}}}}), h::ConfigError);
}

TEST(LoadPredictions, CompleteMissingShuffledDuplicate) {
  const auto dir = fresh_dir("vsqa_harness_load");
  const auto dataset = write_fixture_dataset(dir);
  const auto lines = prediction_lines(dataset);

  write_lines(dir / "full.jsonl", lines);
  const auto full = h::load_predictions(dataset, dir / "full.jsonl");
  EXPECT_EQ(full.missing_predictions, 0u);
  EXPECT_EQ(full.unused_predictions, 0u);
  EXPECT_EQ(full.samples.size(), lines.size());
  EXPECT_EQ(full.samples.front().sample_id, "SH_0000#0");
  EXPECT_EQ(full.samples.front().question, s::kTypeQuestion);

  write_lines(dir / "partial.jsonl", prediction_lines(dataset, true));
  const auto partial = h::load_predictions(dataset, dir / "partial.jsonl");
  EXPECT_EQ(partial.missing_predictions, 1u);
  EXPECT_EQ(partial.samples.size(), full.samples.size());
  EXPECT_EQ(partial.samples.back().prediction, "");

  auto shuffled = lines;
  std::mt19937 rng(5);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  write_lines(dir / "shuffled.jsonl", shuffled);
  EXPECT_EQ(h::load_predictions(dataset, dir / "shuffled.jsonl").samples, full.samples);

  auto dup = lines;
  dup.push_back(lines.front());
  write_lines(dir / "dup.jsonl", dup);
  EXPECT_THROW(h::load_predictions(dataset, dir / "dup.jsonl"), h::InputError);

  write_lines(dir / "bad.jsonl", {"{not json"});
  EXPECT_THROW(h::load_predictions(dataset, dir / "bad.jsonl"), h::InputError);

  write_lines(dir / "extra.jsonl", {R"({"id":"XX_9","turn":0,"prediction":"x"})"});
  const auto extra = h::load_predictions(dataset, dir / "extra.jsonl");
  EXPECT_EQ(extra.unused_predictions, 1u);
  EXPECT_EQ(extra.missing_predictions, full.samples.size());
}

TEST(RuleBased, IdentityEmptyAndPointwise) {
  EXPECT_TRUE(h::calculate_rule_based({}).empty());

  h::EvalSample same;
  same.gold = same.prediction = "The amplitude of this signal is 0.29.";
  h::EvalSample words;
  words.gold = words.prediction = "It represents a single sine wave.";
  const auto id = h::calculate_rule_based({same, words});
  EXPECT_EQ(id[0].word_recall, 100.0);
  EXPECT_NEAR(id[0].bleu[0], 1.0, 1e-12);
  EXPECT_NEAR(id[0].rouge_l, 1.0, 1e-12);
  EXPECT_EQ(id[0].numerical_score, 1.0);
  EXPECT_TRUE(std::isnan(id[1].numerical_score));

  // 24 samples: corpus run equals pointwise calls plus a corpus-wide CIDEr.
  std::vector<h::EvalSample> samples;
  const char* golds[] = {"The base frequency of this signal is 50 Hz.", "This is a simple harmonic signal.",
                         "The period of this signal is 0.02 seconds.", "The peak frequency of this signal is 50.14."};
  const char* preds[] = {"The base frequency is 48 Hz.", "This is a harmonic signal.", "The period is 0.2 seconds.",
                         "Peak at 50 Hz.", "", "signal"};
  for (int i = 0; i < 24; ++i) {
    h::EvalSample x;
    x.gold = golds[i % 4];
    x.prediction = preds[i % 6];
    samples.push_back(x);
  }
  const auto batch = h::calculate_rule_based(samples, {}, 4);
  std::vector<m::TextPair> corpus;
  for (const auto& x : samples) corpus.push_back({x.gold, x.prediction});
  const auto cider = m::cider(corpus);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto expected = m::score_pair(samples[i].gold, samples[i].prediction);
    expected.cider = cider[i];
    const auto a = h::metric_values(batch[i]);
    const auto b = h::metric_values(expected);
    for (std::size_t k = 0; k < a.size(); ++k) {
      if (std::isnan(b[k])) {
        EXPECT_TRUE(std::isnan(a[k]));
      } else {
        EXPECT_EQ(a[k], b[k]) << i << " " << h::rule_metric_names()[k];
      }
    }
  }
  EXPECT_THROW(h::calculate_rule_based(samples, m::MetricConfig{0.0}), std::invalid_argument);
}

TEST(GroupAndAverage, MacroOverCategories) {
  const std::vector<std::string> names{"word_recall"};
  const auto one = h::group_and_average({row(wf::Category::SH, "q", {40.0}), row(wf::Category::SH, "q", {60.0})}, names);
  EXPECT_EQ(one.groups.size(), 1u);
  EXPECT_EQ(one.overall.metrics[0].mean, 50.0);
  EXPECT_EQ(one.overall.metrics[0].mean, one.groups[0].metrics[0].mean);

  // 3 samples at 100 and 1 at 50: macro gives 75, a pooled mean would give 87.5.
  const auto agg = h::group_and_average({row(wf::Category::SH, "q1", {100.0}), row(wf::Category::SH, "q2", {100.0}),
                                         row(wf::Category::SH, "q1", {100.0}), row(wf::Category::AM, "q1", {50.0})},
                                        names);
  EXPECT_EQ(agg.overall.metrics[0].mean, 75.0);
  EXPECT_EQ(agg.overall.metrics[0].valid, 4u);
  EXPECT_EQ(agg.overall.count, 4u);
  EXPECT_EQ(agg.categories.size(), 2u);
  EXPECT_EQ(agg.groups.size(), 3u);

  const auto nan = h::group_and_average(
      {row(wf::Category::SH, "q", {m::kUndefined}), row(wf::Category::AM, "q", {m::kUndefined})}, names);
  EXPECT_TRUE(std::isnan(nan.overall.metrics[0].mean));
  EXPECT_EQ(nan.overall.metrics[0].valid, 0u);

  const auto partial = h::group_and_average(
      {row(wf::Category::SH, "q", {m::kUndefined}), row(wf::Category::SH, "q", {0.4}), row(wf::Category::AM, "q", {0.8})},
      names);
  EXPECT_NEAR(partial.overall.metrics[0].mean, 0.6, 1e-15);
  EXPECT_EQ(partial.categories[1].metrics[0].valid, 1u);  // SH follows AM in category order

  EXPECT_TRUE(h::group_and_average({}, names).categories.empty());
  EXPECT_THROW(h::group_and_average({row(wf::Category::SH, "q", {1.0, 2.0})}, names), std::invalid_argument);
}

TEST(GroupAndAverage, IndependentOfRowOrder) {
  std::vector<h::AggregateRow> rows;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    rows.push_back(row(static_cast<wf::Category>(i % 5), "q" + std::to_string(i % 3), {u(rng), u(rng)}));
  }
  const auto a = h::group_and_average(rows, {"x", "y"});
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto b = h::group_and_average(rows, {"x", "y"});
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(a.overall.metrics[k].mean, b.overall.metrics[k].mean);
}

TEST(Referee, ParseResponse) {
  const auto ok = h::parse_referee_response("7 6\nThe prediction matches the ground truth closely.");
  EXPECT_EQ(ok.status, h::RefereeStatus::Ok);
  EXPECT_EQ(*ok.similarity, 7.0);
  EXPECT_EQ(*ok.parameter, 6.0);

  const auto lead = h::parse_referee_response("\n  \n 8.5\t9 \nrest");
  EXPECT_EQ(lead.status, h::RefereeStatus::Ok);
  EXPECT_EQ(*lead.similarity, 8.5);

  for (const char* bad : {"score: 7/10\n...", "7\n", "7 6 5", "0 6", "7 11", "", "seven six"}) {
    const auto r = h::parse_referee_response(bad);
    EXPECT_EQ(r.status, h::RefereeStatus::Error) << bad;
    EXPECT_FALSE(r.similarity.has_value());
    EXPECT_FALSE(r.error.empty());
  }
}

TEST(Referee, PromptOrderAndLiteralSlots) {
  h::EvalSample x;
  x.question = "Q?";
  x.gold = "gold {prediction}";
  x.prediction = "pred";
  const auto p = h::render_prompt("{question}|{gold}|{prediction}|{other}", x);
  EXPECT_EQ(p, "Q?|gold {prediction}|pred|{other}");
  const auto full = h::render_prompt(live_config().prompt_template, x);
  EXPECT_LT(full.find("gold {prediction}"), full.find("pred\n"));

  const auto req = h::referee_request(live_config(), "hello");
  EXPECT_EQ(req.at("temperature"), 0.0);
  EXPECT_EQ(req.at("messages")[0].at("content"), "hello");
}

TEST(Referee, SkippedErrorsAndRetries) {
  std::vector<h::EvalSample> samples(4);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    samples[i].gold = "g" + std::to_string(i);
    samples[i].prediction = "p" + std::to_string(i);
  }
  std::atomic<int> calls{0};
  const h::RefereeTransport never = [&](const nlohmann::json&) -> std::string {
    ++calls;
    return "";
  };
  for (const auto& r : h::score_with_referee(samples, h::RefereeConfig{}, never)) {
    EXPECT_EQ(r.status, h::RefereeStatus::Skipped);
  }
  EXPECT_EQ(calls, 0);

  // p1 gets prose, p2 breaks the connection on every try, the rest score.
  std::atomic<int> p3_attempts{0};
  const h::RefereeTransport mixed = [&](const nlohmann::json& req) -> std::string {
    const auto prompt = req.at("messages")[0].at("content").get<std::string>();
    if (prompt.find("p1") != std::string::npos) return chat_body("score: 7/10");
    if (prompt.find("p2") != std::string::npos) throw std::runtime_error("connection reset");
    if (prompt.find("p3") != std::string::npos && p3_attempts++ == 0) throw std::runtime_error("timeout");
    return chat_body("7 6\nclose match");
  };
  const auto res = h::score_with_referee(samples, live_config(), mixed);
  EXPECT_EQ(res[0].status, h::RefereeStatus::Ok);
  EXPECT_EQ(res[1].status, h::RefereeStatus::Error);
  EXPECT_EQ(res[2].status, h::RefereeStatus::Error);
  EXPECT_NE(res[2].error.find("connection reset"), std::string::npos);
  EXPECT_EQ(res[3].status, h::RefereeStatus::Ok);
  EXPECT_EQ(p3_attempts, 2);

  const auto garbage = h::score_with_referee(samples, live_config(), [](const nlohmann::json&) { return std::string("<html>"); });
  for (const auto& r : garbage) EXPECT_EQ(r.status, h::RefereeStatus::Error);
}

TEST(Referee, JsonRoundTrip) {
  const auto ok = h::parse_referee_response("7 6\nwhy");
  const auto back = h::referee_from_json(h::referee_to_json(ok));
  EXPECT_EQ(back.status, h::RefereeStatus::Ok);
  EXPECT_EQ(*back.similarity, 7.0);
  EXPECT_THROW(h::referee_from_json({{"status", "ok"}}), std::invalid_argument);
}

TEST(Report, FixedFormatting) {
  EXPECT_EQ(h::fixed6(0.0078125), "0.007812");  // exact tie, even neighbour
  EXPECT_EQ(h::fixed6(0.0234375), "0.023438");
  EXPECT_EQ(h::fixed6(-0.0000001), "0.000000");
  EXPECT_EQ(h::dump_fixed({{"b", 1.0 / 3.0}, {"a", m::kUndefined}, {"c", 2}}, false), R"({"a":null,"b":0.333333,"c":2})");
}

TEST(Report, DeterministicCsvMatchesAggregation) {
  const auto dir = fresh_dir("vsqa_harness_report");
  const auto dataset = write_fixture_dataset(dir);
  write_lines(dir / "pred.jsonl", prediction_lines(dataset));

  auto cfg = h::config_from_json(nlohmann::json::object());
  cfg.workers = 1;
  const auto r1 = h::run_evaluation(request(dataset, dir / "pred.jsonl", dir / "a"), cfg);
  cfg.workers = 5;
  h::run_evaluation(request(dataset, dir / "pred.jsonl", dir / "b"), cfg);
  for (const char* f : {h::kSamplesFile, h::kReportFile, h::kSummaryFile}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "plots" / "word_recall.png"));
  EXPECT_FALSE(std::filesystem::exists(dir / "a" / h::kRefereeFile));

  const auto report = nlohmann::json::parse(slurp(dir / "a" / h::kReportFile));
  EXPECT_EQ(report.at("referee").at("status"), "skipped");

  // The CSV overall row carries the aggregation to six decimals.
  std::istringstream csv(slurp(dir / "a" / h::kSummaryFile));
  std::string header, overall;
  std::getline(csv, header);
  std::getline(csv, overall);
  std::vector<std::string> cells;
  std::stringstream ss(overall);
  for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
  EXPECT_EQ(cells[1], "overall");
  std::size_t col = 3;
  for (const auto& c : h::kCsvColumns) {
    const auto& summary = r1.rule.overall.metrics[h::metric_index(r1.rule, c.metric)];
    EXPECT_EQ(cells[col++], h::fixed6(summary.mean)) << c.header;
  }

  // Macro identity straight from the report JSON.
  const auto& rb = report.at("rule_based");
  for (const auto& name : h::rule_metric_names()) {
    double sum = 0.0;
    int n = 0;
    for (const auto& c : rb.at("categories")) {
      const auto& v = c.at("metrics").at(name).at("mean");
      if (v.is_null()) continue;
      sum += v.get<double>();
      ++n;
    }
    if (n == 0) continue;
    EXPECT_NEAR(rb.at("overall").at("metrics").at(name).at("mean").get<double>(), sum / n, 1e-6) << name;
  }
}

TEST(Report, RefereeMergeLeavesRuleNumbersAlone) {
  const auto dir = fresh_dir("vsqa_harness_referee_merge");
  const auto dataset = write_fixture_dataset(dir);
  write_lines(dir / "pred.jsonl", prediction_lines(dataset));
  const auto cfg = h::config_from_json(nlohmann::json::object());

  h::run_evaluation(request(dataset, dir / "pred.jsonl", dir / "plain"), cfg);
  std::atomic<int> n{0};
  const auto results = h::run_referee(dataset, dir / "pred.jsonl", dir / "judge", live_config(),
                                      [&](const nlohmann::json&) {
                                        return chat_body(n++ % 4 == 0 ? "oops" : "8 7\nfine");
                                      });
  EXPECT_EQ(results.size(), h::load_gold(dataset).size());

  auto req = request(dataset, dir / "pred.jsonl", dir / "merged");
  req.referee_file = dir / "judge" / h::kRefereeFile;
  const auto merged = h::run_evaluation(req, cfg);
  EXPECT_TRUE(merged.referee_ran());
  EXPECT_EQ(slurp(dir / "plain" / h::kSamplesFile), slurp(dir / "merged" / h::kSamplesFile));

  const auto plain = nlohmann::json::parse(slurp(dir / "plain" / h::kReportFile));
  const auto with = nlohmann::json::parse(slurp(dir / "merged" / h::kReportFile));
  EXPECT_EQ(plain.at("rule_based"), with.at("rule_based"));
  EXPECT_EQ(with.at("referee").at("status"), "ran");
  EXPECT_GT(with.at("referee").at("counts").at("error").get<int>(), 0);
  EXPECT_EQ(with.at("referee").at("overall").at("metrics").at("similarity").at("mean"), 8.0);
}
