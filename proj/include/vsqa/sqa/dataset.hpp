#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsqa/sqa/build.hpp"
#include "vsqa/waveforms/random_spec.hpp"
#include "vsqa/waveforms/spectrum.hpp"

#ifndef VSQA_VERSION
#define VSQA_VERSION "0.0.0"
#endif

namespace vsqa::sqa {

inline constexpr int kFormatVersion = 1;

struct SplitCounts {
  std::size_t train = 0;
  std::size_t eval = 0;
};

/// Per-category record counts for each split plus the settings that produced them.
struct DatasetManifest {
  std::map<wf::Category, std::size_t> train;
  std::map<wf::Category, std::size_t> eval;
  std::uint64_t seed = 0;
  std::string toolkit_version = VSQA_VERSION;
  int format_version = kFormatVersion;

  DatasetManifest() {
    for (auto c : wf::kAllCategories) {
      train[c] = 0;
      eval[c] = 0;
    }
  }

  std::size_t total_train() const {
    std::size_t n = 0;
    for (const auto& [c, k] : train) n += k;
    return n;
  }
  std::size_t total_eval() const {
    std::size_t n = 0;
    for (const auto& [c, k] : eval) n += k;
    return n;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["format_version"] = format_version;
    j["toolkit_version"] = toolkit_version;
    j["seed"] = seed;
    j["spectrum_scaling"] = wf::kSpectrumScaling;
    for (const auto* split : {"train", "eval"}) {
      const auto& counts = std::string(split) == "train" ? train : eval;
      nlohmann::ordered_json by_cat = nlohmann::ordered_json::object();
      for (auto c : wf::kAllCategories) by_cat[std::string(wf::code(c))] = counts.at(c);
      j["splits"][split] = by_cat;
    }
    j["totals"] = {{"train", total_train()}, {"eval", total_eval()}};
    return j;
  }

  static DatasetManifest from_json(const nlohmann::json& j) {
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != kFormatVersion) {
      throw std::runtime_error("unsupported dataset format version " + std::to_string(m.format_version));
    }
    m.toolkit_version = j.at("toolkit_version").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    for (const auto* split : {"train", "eval"}) {
      auto& counts = std::string(split) == "train" ? m.train : m.eval;
      for (const auto& [code, n] : j.at("splits").at(split).items()) {
        const auto c = wf::category_from_code(code);
        if (!c) throw std::runtime_error("unknown category in manifest: " + code);
        counts[*c] = n.get<std::size_t>();
      }
    }
    return m;
  }
};

struct SplitResult {
  std::vector<SqaRecord> train;
  std::vector<SqaRecord> eval;
  DatasetManifest manifest;
};

/// Per category: seeded shuffle, first `train` records to train, next `eval` to eval.
/// Categories with no records contribute nothing; a category with too few records is an error.
inline SplitResult split_dataset(const std::vector<SqaRecord>& records, SplitCounts counts, std::uint64_t seed) {
  SplitResult out;
  out.manifest.seed = seed;
  for (auto c : wf::kAllCategories) {
    std::vector<const SqaRecord*> pool;
    for (const auto& r : records) {
      if (r.category == c) pool.push_back(&r);
    }
    if (pool.empty()) continue;
    if (pool.size() < counts.train + counts.eval) {
      throw std::invalid_argument("category " + std::string(wf::code(c)) + " has " + std::to_string(pool.size()) +
                                  " records, needs " + std::to_string(counts.train + counts.eval));
    }
    wf::SpecRng rng(seed ^ (0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(c) + 1)));
    for (std::size_t i = pool.size() - 1; i > 0; --i) {
      const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)));
      std::swap(pool[i], pool[j]);
    }
    for (std::size_t i = 0; i < counts.train; ++i) out.train.push_back(*pool[i]);
    for (std::size_t i = 0; i < counts.eval; ++i) out.eval.push_back(*pool[counts.train + i]);
    out.manifest.train[c] = counts.train;
    out.manifest.eval[c] = counts.eval;
  }
  return out;
}

/// One JSONL line: id, image, category, ground truth and a role-tagged conversation.
/// The first user turn carries the image reference.
inline nlohmann::ordered_json record_to_json(const SqaRecord& r) {
  nlohmann::ordered_json j;
  j["id"] = r.record_id;
  j["image"] = r.image_path;
  j["category"] = std::string(wf::info(r.category).label);
  j["category_code"] = std::string(wf::code(r.category));
  j["ground_truth"] = r.ground_truth;
  auto turns = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.qa.size(); ++i) {
    nlohmann::ordered_json user;
    user["role"] = "user";
    user["content"] = r.qa[i].question;
    user["kind"] = std::string(kind_name(r.qa[i].kind));
    if (i == 0) user["images"] = nlohmann::ordered_json::array({r.image_path});
    turns.push_back(user);
    turns.push_back({{"role", "assistant"}, {"content", r.qa[i].answer}});
  }
  j["conversation"] = turns;
  return j;
}

inline SqaRecord record_from_json(const nlohmann::json& j) {
  SqaRecord r;
  r.record_id = j.at("id").get<std::string>();
  r.image_path = j.at("image").get<std::string>();
  const auto c = wf::category_from_code(j.at("category_code").get<std::string>());
  if (!c) throw std::runtime_error("unknown category code in record " + r.record_id);
  r.category = *c;
  r.ground_truth = j.at("ground_truth");
  const auto& turns = j.at("conversation");
  if (turns.size() % 2 != 0) throw std::runtime_error("unpaired conversation turn in record " + r.record_id);
  for (std::size_t i = 0; i < turns.size(); i += 2) {
    if (turns[i].at("role") != "user" || turns[i + 1].at("role") != "assistant") {
      throw std::runtime_error("conversation roles out of order in record " + r.record_id);
    }
    r.qa.push_back({turns[i].at("content").get<std::string>(), turns[i + 1].at("content").get<std::string>(),
                    kind_from_name(turns[i].at("kind").get<std::string>())});
  }
  return r;
}

inline constexpr const char* kTrainFile = "train.jsonl";
inline constexpr const char* kEvalFile = "eval.jsonl";
inline constexpr const char* kManifestFile = "manifest.json";

namespace detail {

inline void write_jsonl(const std::filesystem::path& path, const std::vector<SqaRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& r : records) out << record_to_json(r).dump() << '\n';
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace detail

/// Writes train.jsonl, eval.jsonl and manifest.json under out_dir. Returns the manifest path.
inline std::filesystem::path write_dataset(const SplitResult& data, const std::filesystem::path& out_dir) {
  std::set<std::string> ids;
  for (const auto* split : {&data.train, &data.eval}) {
    for (const auto& r : *split) {
      if (!ids.insert(r.record_id).second) throw std::invalid_argument("duplicate record id: " + r.record_id);
      if (r.qa.size() < kMinPairs || r.qa.size() > kMaxPairs || r.qa.front().kind != QaKind::SignalType) {
        throw std::invalid_argument("record " + r.record_id + " violates the QA group shape");
      }
    }
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create " + out_dir.string() + ": " + ec.message());
  detail::write_jsonl(out_dir / kTrainFile, data.train);
  detail::write_jsonl(out_dir / kEvalFile, data.eval);
  const auto manifest = out_dir / kManifestFile;
  std::ofstream out(manifest, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + manifest.string());
  out << data.manifest.to_json().dump(2) << '\n';
  return manifest;
}

inline std::vector<SqaRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<SqaRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline SplitResult read_dataset(const std::filesystem::path& dir) {
  SplitResult data;
  data.train = read_records(dir / kTrainFile);
  data.eval = read_records(dir / kEvalFile);
  std::ifstream in(dir / kManifestFile);
  if (!in) throw std::runtime_error("missing manifest in " + dir.string());
  data.manifest = DatasetManifest::from_json(nlohmann::json::parse(in));
  return data;
}

}  // namespace vsqa::sqa
