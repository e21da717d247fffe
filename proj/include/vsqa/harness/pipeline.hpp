#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "vsqa/harness/config.hpp"
#include "vsqa/harness/evaluation.hpp"
#include "vsqa/harness/referee.hpp"
#include "vsqa/harness/report.hpp"

namespace vsqa::harness {

struct EvaluateRequest {
  std::filesystem::path dataset;      // eval.jsonl or a dataset directory
  std::filesystem::path predictions;  // prediction JSONL
  std::filesystem::path out_dir;
  std::string model_name = "model";
  std::optional<std::filesystem::path> referee_file;  // referee.jsonl to merge in
  bool plots = true;
};

/// Referee lines keyed by sample_id; samples without a line are Skipped.
inline std::vector<RefereeResult> read_referee_file(const std::filesystem::path& path,
                                                    const std::vector<EvalSample>& samples) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open referee results " + path.string());
  std::map<std::string, RefereeResult> by_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      const auto id = j.at("sample_id").get<std::string>();
      if (!by_id.emplace(id, referee_from_json(j)).second) {
        throw InputError(path.string() + ":" + std::to_string(line_no) + ": duplicate sample " + id);
      }
    } catch (const nlohmann::json::exception& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::invalid_argument& e) {
      throw InputError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  std::vector<RefereeResult> out(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (const auto it = by_id.find(samples[i].sample_id); it != by_id.end()) out[i] = it->second;
  }
  return out;
}

/// Load, score, aggregate and write. The rule-based files depend only on the inputs and
/// the metric config, never on the worker count.
inline EvalReport run_evaluation(const EvaluateRequest& req, const ToolkitConfig& cfg) {
  const auto loaded = load_predictions(req.dataset, req.predictions);
  auto scores = calculate_rule_based(loaded.samples, cfg.metric, cfg.workers);
  std::vector<RefereeResult> referee;
  if (req.referee_file) referee = read_referee_file(*req.referee_file, loaded.samples);
  auto report = make_report(req.model_name, loaded, std::move(scores), std::move(referee));
  emit_report(report, req.out_dir, {req.plots});
  return report;
}

/// Runs the referee over every gold turn and writes referee.jsonl into out_dir.
inline std::vector<RefereeResult> run_referee(const std::filesystem::path& dataset,
                                              const std::filesystem::path& predictions,
                                              const std::filesystem::path& out_dir, const RefereeConfig& cfg,
                                              const RefereeTransport& transport) {
  const auto loaded = load_predictions(dataset, predictions);
  auto results = score_with_referee(loaded.samples, cfg, transport);
  std::filesystem::create_directories(out_dir);
  std::string lines;
  for (std::size_t i = 0; i < results.size(); ++i) {
    auto j = referee_to_json(results[i]);
    j["sample_id"] = loaded.samples[i].sample_id;
    lines += dump_fixed(j, false) + "\n";
  }
  detail::write_text(out_dir / kRefereeFile, lines);
  return results;
}

}  // namespace vsqa::harness
