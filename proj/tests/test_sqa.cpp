#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>

#include "vsqa/sqa/generate.hpp"

namespace s = vsqa::sqa;
namespace wf = vsqa::waveforms;

namespace {

s::SqaRecord build(const wf::SignalSpec& spec) {
  const auto w = wf::synthesize(spec, wf::SamplingConfig::synthetic_default());
  return s::build_sqa(spec, w, wf::compute_spectrum(w));
}

const s::QaPair* find_question(const s::SqaRecord& r, std::string_view needle) {
  for (const auto& p : r.qa) {
    if (p.question.find(needle) != std::string::npos) return &p;
  }
  return nullptr;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

// Sine at the given frequency, sampled at the recording rate.
void write_tone(const std::filesystem::path& raw, std::size_t n, double hz, wf::HealthCondition label,
                std::optional<double> fault_hz) {
  wf::RecordingHeader h;
  h.sample_rate_hz = 8192.0;
  h.label = label;
  h.shaft_frequency_hz = 10.0;
  h.fault_frequency_hz = fault_hz;
  std::vector<float> samples(n);
  for (std::size_t i = 0; i < n; ++i) {
    samples[i] = static_cast<float>(std::sin(2.0 * std::numbers::pi * hz * static_cast<double>(i) / h.sample_rate_hz));
  }
  wf::write_recording(raw, samples, h);
}

}  // namespace

TEST(FormatQuantity, Examples) {
  EXPECT_EQ(s::format_quantity(0.29, s::Unit::Volts), "0.29");
  EXPECT_EQ(s::format_quantity(50.0, s::Unit::Hertz), "50");
  EXPECT_EQ(s::format_quantity(50.14, s::Unit::Hertz), "50.14");
  EXPECT_EQ(s::format_quantity(0.0, s::Unit::Seconds), "0.00");
  EXPECT_EQ(s::format_quantity(1.0 / 50.0, s::Unit::Seconds), "0.02");
  EXPECT_EQ(s::format_quantity(-0.001, s::Unit::None), "0.00");
  EXPECT_THROW(s::format_quantity(std::numeric_limits<double>::quiet_NaN(), s::Unit::None), std::invalid_argument);
  EXPECT_THROW(s::format_quantity(std::numeric_limits<double>::infinity(), s::Unit::Hertz), std::invalid_argument);
  EXPECT_EQ(s::format_list({0.1, 0.25}, s::Unit::Seconds), "[0.10, 0.25]");
}

TEST(BuildSqa, SimpleHarmonicExample) {
  const auto r = build(wf::SimpleHarmonic{0.29, 50.0, 2.0});
  std::set<std::string> answers;
  for (const auto& p : r.qa) answers.insert(p.answer);
  EXPECT_TRUE(answers.count("The amplitude of this signal is 0.29."));
  EXPECT_TRUE(answers.count("The period of this signal is 0.02 seconds."));
  EXPECT_TRUE(answers.count("The base frequency of this signal is 50 Hz."));
  EXPECT_TRUE(answers.count("The phase of this signal is 2.00 radians."));
  EXPECT_TRUE(answers.count("This is a simple harmonic signal."));
  EXPECT_EQ(find_question(r, "shock interval"), nullptr);
  EXPECT_EQ(r.ground_truth.at("family"), "SH");
}

TEST(BuildSqa, PeriodicImpulseHasShockInterval) {
  const auto r = build(wf::SinglePeriodic{0.5, 4.0, 0.12, 40.0, 0.0});
  const auto* p = find_question(r, "shock interval");
  ASSERT_NE(p, nullptr);
  EXPECT_EQ(p->answer, "The shock interval of this signal is [0.12] seconds.");
  const auto mp = build(wf::MultiplePeriodic{4.0, 0.1, 40.0, {{0.5, 0.0}, {0.3, 1.0}}});
  EXPECT_NE(find_question(mp, "shock interval"), nullptr);
}

TEST(BuildSqa, PeakAnswerMatchesRecomputedSpectrum) {
  for (auto c : wf::kSyntheticCategories) {
    wf::ParamRanges ranges;
    ranges.seed = 7 + static_cast<std::uint64_t>(c);
    const auto spec = wf::sample_random_spec(c, ranges);
    const auto w = wf::synthesize(spec, wf::SamplingConfig::synthetic_default());
    const auto r = s::build_sqa(spec, w, wf::compute_spectrum(w));
    const auto* p = find_question(r, "peak frequency");
    ASSERT_NE(p, nullptr) << wf::code(c);
    const double peak = wf::peak_frequency(wf::compute_spectrum(w));
    char expected[32];
    std::snprintf(expected, sizeof expected, "%.2f", peak);
    EXPECT_NE(p->answer.find(std::string("is ") + expected), std::string::npos) << p->answer;
    EXPECT_DOUBLE_EQ(r.ground_truth.at("peak_frequency_hz").get<double>(), peak);
  }
}

TEST(BuildSqa, ShapeAndTypeAnswerForEveryFamily) {
  for (auto c : wf::kSyntheticCategories) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      wf::ParamRanges ranges;
      ranges.seed = seed;
      const auto r = build(wf::sample_random_spec(c, ranges));
      ASSERT_GE(r.qa.size(), s::kMinPairs);
      ASSERT_LE(r.qa.size(), s::kMaxPairs);
      EXPECT_EQ(r.qa.front().question, s::kTypeQuestion);
      EXPECT_EQ(r.qa.front().kind, s::QaKind::SignalType);
      EXPECT_EQ(r.qa.back().kind, s::QaKind::Conclusion);
      EXPECT_EQ(r.category, c);
      std::string label(wf::info(c).label);
      std::string answer = r.qa.front().answer;
      for (auto& ch : label) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      for (auto& ch : answer) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
      EXPECT_NE(answer.find(label), std::string::npos) << r.qa.front().answer;
      for (const auto& p : r.qa) {
        EXPECT_FALSE(p.question.empty());
        EXPECT_FALSE(p.answer.empty());
      }
    }
  }
}

TEST(BuildSqa, ArticleAndAcronymCase) {
  EXPECT_EQ(build(wf::AmplitudeModulated{0.5, 100.0, 10.0}).qa.front().answer,
            "This is an amplitude modulated signal.");
  EXPECT_EQ(build(wf::AmFmCoupled{0.5, 10.0, 100.0, 5.0}).qa.front().answer, "This is an FM-AM coupled signal.");
}

TEST(BuildSqa, MismatchThrows) {
  const wf::SignalSpec sh = wf::SimpleHarmonic{1.0, 50.0, 0.0};
  const wf::SignalSpec am = wf::AmplitudeModulated{0.5, 100.0, 10.0};
  const auto w = wf::synthesize(am, wf::SamplingConfig::synthetic_default());
  EXPECT_THROW(s::build_sqa(sh, w, wf::compute_spectrum(w)), s::TemplateMismatch);

  const auto w_sh = wf::synthesize(sh, wf::SamplingConfig::synthetic_default());
  const auto short_w = wf::synthesize(sh, wf::SamplingConfig(1000.0, 0.5));
  EXPECT_THROW(s::build_sqa(sh, w_sh, wf::compute_spectrum(short_w)), s::TemplateMismatch);
}

TEST(BuildSqa, ThuTemplates) {
  const auto dir = fresh_dir("vsqa_thu_build");
  std::filesystem::create_directories(dir);
  write_tone(dir / "outer.f32", 4096, 96.0, wf::HealthCondition::OuterRaceFault, 96.0);
  write_tone(dir / "normal.f32", 4096, 10.0, wf::HealthCondition::Normal, std::nullopt);

  const auto seg = wf::load_real_segment(dir / "outer.f32", 0, 4096);
  const auto r = s::build_sqa(seg, wf::compute_spectrum(seg.waveform));
  EXPECT_EQ(r.category, wf::Category::THU);
  EXPECT_EQ(r.qa.front().answer, "This is a THU signal representing a bearing.");
  EXPECT_EQ(r.qa.size(), 7u);
  EXPECT_EQ(find_question(r, "fundamental frequency")->answer,
            "The signal was recorded at a fundamental frequency of 10Hz.");
  EXPECT_EQ(find_question(r, "correlate")->answer,
            "The identified characteristic frequency is indicative of an outer fault in the bearing.");
  EXPECT_EQ(find_question(r, "What is the characteristic fault frequency")->answer,
            "The characteristic fault frequency of this signal is 96 Hz.");
  EXPECT_EQ(r.ground_truth.at("label"), "outer_race_fault");
  EXPECT_DOUBLE_EQ(r.ground_truth.at("peak_frequency_hz").get<double>(), 96.0);

  const auto normal = wf::load_real_segment(dir / "normal.f32", 0, 4096);
  const auto rn = s::build_sqa(normal, wf::compute_spectrum(normal.waveform));
  EXPECT_EQ(rn.qa.size(), 6u);
  EXPECT_NE(rn.qa.back().answer.find("normal condition"), std::string::npos);

  auto mislabeled = seg;
  mislabeled.waveform.spec_id = "SH";
  EXPECT_THROW(s::build_sqa(mislabeled, wf::compute_spectrum(seg.waveform)), s::TemplateMismatch);
}

TEST(SplitDataset, CountsDisjointDeterministic) {
  std::vector<s::SqaRecord> records;
  for (auto c : wf::kAllCategories) {
    for (int i = 0; i < 22; ++i) {
      s::SqaRecord r;
      r.category = c;
      r.record_id = std::string(wf::code(c)) + "_" + std::to_string(i);
      records.push_back(r);
    }
  }
  const auto a = s::split_dataset(records, {20, 2}, 11);
  EXPECT_EQ(a.train.size(), 240u);
  EXPECT_EQ(a.eval.size(), 24u);
  EXPECT_EQ(a.manifest.total_train(), 240u);
  EXPECT_EQ(a.manifest.eval.at(wf::Category::THU), 2u);
  std::set<std::string> ids;
  for (const auto& r : a.train) ids.insert(r.record_id);
  for (const auto& r : a.eval) EXPECT_TRUE(ids.insert(r.record_id).second);

  const auto b = s::split_dataset(records, {20, 2}, 11);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.eval, b.eval);
  const auto other = s::split_dataset(records, {20, 2}, 12);
  EXPECT_NE(a.train, other.train);

  const auto none = s::split_dataset(records, {0, 0}, 1);
  EXPECT_TRUE(none.train.empty());
  EXPECT_TRUE(none.eval.empty());
  EXPECT_EQ(none.manifest.train.size(), 12u);

  EXPECT_THROW(s::split_dataset(records, {20, 3}, 1), std::invalid_argument);
}

TEST(WriteDataset, RoundTripAndErrors) {
  const auto dir = fresh_dir("vsqa_dataset_roundtrip");
  std::vector<s::SqaRecord> records;
  for (auto c : wf::kSyntheticCategories) {
    wf::ParamRanges ranges;
    ranges.seed = 3;
    auto r = build(wf::sample_random_spec(c, ranges));
    r.record_id = std::string(wf::code(c)) + "_0000";
    r.image_path = "images/" + r.record_id + ".png";
    records.push_back(r);
  }
  const auto split = s::split_dataset(records, {0, 1}, 5);
  s::write_dataset(split, dir);
  const auto back = s::read_dataset(dir);
  EXPECT_EQ(back.eval, split.eval);
  EXPECT_TRUE(back.train.empty());
  EXPECT_EQ(back.manifest.to_json(), split.manifest.to_json());

  const auto empty_dir = fresh_dir("vsqa_dataset_empty");
  s::write_dataset(s::SplitResult{}, empty_dir);
  EXPECT_EQ(std::filesystem::file_size(empty_dir / s::kTrainFile), 0u);
  EXPECT_EQ(s::read_dataset(empty_dir).manifest.total_eval(), 0u);

  auto dup = split;
  dup.train.push_back(dup.eval.front());
  EXPECT_THROW(s::write_dataset(dup, fresh_dir("vsqa_dataset_dup")), std::invalid_argument);

  const auto blocker = fresh_dir("vsqa_dataset_blocker");
  std::ofstream(blocker) << "file, not a directory";
  EXPECT_THROW(s::write_dataset(split, blocker / "sub"), std::runtime_error);
}

TEST(WriteDataset, FirstTurnCarriesImage) {
  auto r = build(wf::SimpleHarmonic{1.0, 50.0, 0.0});
  r.record_id = "SH_0000";
  r.image_path = "images/x.png";
  const auto j = s::record_to_json(r);
  const auto& turns = j.at("conversation");
  EXPECT_EQ(turns.size(), 2 * r.qa.size());
  EXPECT_EQ(turns[0].at("images")[0], "images/x.png");
  EXPECT_EQ(turns[0].at("content"), s::kTypeQuestion);
  EXPECT_FALSE(turns[2].contains("images"));
  EXPECT_EQ(turns[1].at("role"), "assistant");
}

TEST(Generate, TwelveCategoriesWithImagesAndThu) {
  const auto dir = fresh_dir("vsqa_generate_small");
  const auto thu = dir / "thu";
  std::filesystem::create_directories(thu);
  write_tone(thu / "a.f32", 3 * 1024, 96.0, wf::HealthCondition::InnerRaceFault, 96.0);
  write_tone(thu / "b.f32", 3 * 1024, 48.0, wf::HealthCondition::Normal, std::nullopt);

  s::GenerateOptions opt;
  opt.per_family = 3;
  opt.eval_per_family = 2;
  opt.seed = 9;
  opt.out_dir = dir / "out";
  opt.thu_dir = thu;
  opt.thu_segment_samples = 1024;
  opt.workers = 3;
  const auto res = s::generate_dataset(opt);
  EXPECT_EQ(res.data.train.size(), 36u);
  EXPECT_EQ(res.data.eval.size(), 24u);

  const auto back = s::read_dataset(opt.out_dir);
  std::set<wf::Category> cats;
  for (const auto& r : back.eval) {
    cats.insert(r.category);
    EXPECT_TRUE(std::filesystem::exists(opt.out_dir / r.image_path)) << r.image_path;
  }
  EXPECT_EQ(cats.size(), 12u);

  opt.out_dir = dir / "again";
  opt.workers = 1;
  const auto again = s::generate_dataset(opt);
  EXPECT_EQ(again.data.train, res.data.train);
  EXPECT_EQ(again.data.eval, res.data.eval);

  opt.thu_segment_samples = 4096;
  EXPECT_THROW(s::generate_dataset(opt), wf::RecordingError);
  opt.thu_dir.reset();
  opt.families = {wf::Category::THU};
  EXPECT_THROW(s::generate_dataset(opt), std::invalid_argument);
}
