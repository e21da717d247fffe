// vsqa: dataset generation, evaluation, referee scoring and reward scoring.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "vsqa/harness/config.hpp"
#include "vsqa/harness/pipeline.hpp"
#include "vsqa/harness/referee_http.hpp"
#include "vsqa/reward/reward.hpp"
#include "vsqa/sqa/generate.hpp"

namespace fs = std::filesystem;
namespace h = vsqa::harness;
namespace wf = vsqa::waveforms;

namespace {

h::ToolkitConfig load_config(const std::string& path) {
  return path.empty() ? h::config_from_json(nlohmann::json::object()) : h::load_config(path);
}

std::vector<wf::Category> parse_families(const std::string& list) {
  std::vector<wf::Category> out;
  std::stringstream ss(list);
  for (std::string code; std::getline(ss, code, ',');) {
    if (code.empty()) continue;
    for (auto& c : code) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (code == "ALL") {
      out.assign(wf::kAllCategories.begin(), wf::kAllCategories.end());
      continue;
    }
    const auto cat = wf::category_from_code(code);
    if (!cat) throw CLI::ValidationError("--families", "unknown family code '" + code + "'");
    out.push_back(*cat);
  }
  return out;
}

// Each line is either a JSON string or an object carrying `field`.
std::vector<std::string> read_text_lines(const fs::path& path, const char* field) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::vector<std::string> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      out.push_back(j.is_string() ? j.get<std::string>() : j.at(field).get<std::string>());
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

std::pair<std::string, std::string> split_named(const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("expected NAME=PATH, got '" + arg + "'");
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

int run_generate(const std::string& config_path, const std::string& families, std::size_t per_family,
                 std::size_t eval_per_family, std::uint64_t seed, const std::string& out,
                 const std::string& thu_dir, std::size_t thu_segment, std::size_t workers, bool no_images) {
  const auto cfg = load_config(config_path);
  vsqa::sqa::GenerateOptions opt;
  opt.families = parse_families(families);
  opt.per_family = per_family;
  opt.eval_per_family = eval_per_family;
  opt.seed = seed;
  opt.out_dir = out;
  if (!thu_dir.empty()) opt.thu_dir = fs::path(thu_dir);
  opt.thu_segment_samples = thu_segment;
  opt.ranges.seed = seed;
  opt.sampling = cfg.sampling();
  opt.plot.width = cfg.plot.width;
  opt.plot.height = cfg.plot.height;
  opt.render_images = !no_images;
  opt.workers = workers ? workers : cfg.workers;
  const auto res = vsqa::sqa::generate_dataset(opt);
  std::printf("wrote %zu train and %zu eval records to %s\n", res.data.train.size(), res.data.eval.size(),
              out.c_str());
  return 0;
}

int run_evaluate(const std::string& config_path, const std::string& dataset, const std::string& predictions,
                 const std::string& out, const std::string& model, const std::string& referee_file,
                 std::size_t workers, bool no_plots) {
  auto cfg = load_config(config_path);
  if (workers) cfg.workers = workers;
  h::EvaluateRequest req;
  req.dataset = dataset;
  req.predictions = predictions;
  req.out_dir = out;
  req.model_name = model;
  if (!referee_file.empty()) req.referee_file = fs::path(referee_file);
  req.plots = !no_plots;
  const auto report = h::run_evaluation(req, cfg);
  if (report.missing_predictions) {
    std::fprintf(stderr, "warning: %zu gold turns had no prediction and were scored as empty\n",
                 report.missing_predictions);
  }
  if (report.unused_predictions) {
    std::fprintf(stderr, "warning: %zu predictions matched no gold turn\n", report.unused_predictions);
  }
  const auto& o = report.rule.overall;
  std::printf("%zu samples, overall word recall %s, numerical score %s (%zu valid), CIDEr %s\n",
              report.samples.size(), h::fixed6(o.metrics[0].mean).c_str(), h::fixed6(o.metrics[2].mean).c_str(),
              o.metrics[2].valid, h::fixed6(o.metrics[3].mean).c_str());
  return 0;
}

int run_referee(const std::string& config_path, const std::string& dataset, const std::string& predictions,
                const std::string& out) {
  const auto cfg = load_config(config_path);
  if (!cfg.referee.enabled()) std::fprintf(stderr, "referee not configured: every sample is marked skipped\n");
  const auto transport = cfg.referee.enabled() ? h::http_transport(cfg.referee) : h::RefereeTransport{};
  const auto results = h::run_referee(dataset, predictions, out, cfg.referee, transport);
  std::size_t ok = 0, err = 0, skipped = 0;
  for (const auto& r : results) {
    (r.status == h::RefereeStatus::Ok ? ok : r.status == h::RefereeStatus::Error ? err : skipped)++;
  }
  std::printf("referee: %zu ok, %zu error, %zu skipped\n", ok, err, skipped);
  return 0;
}

int run_reward(const std::string& config_path, const std::string& completions_path, const std::string& gold_path,
               const std::string& vocab_path, std::optional<double> beta, const std::string& out) {
  auto cfg = load_config(config_path).reward;
  if (beta) cfg.beta_exact = *beta;
  cfg.validate();
  const auto vocab = vocab_path.empty() ? vsqa::reward::SynonymVocabulary::builtin()
                                        : vsqa::reward::SynonymVocabulary::load(vocab_path);
  const auto completions = read_text_lines(completions_path, "completion");
  const auto golds = read_text_lines(gold_path, "label");
  if (completions.size() != golds.size()) {
    throw std::invalid_argument("completions (" + std::to_string(completions.size()) + ") and gold labels (" +
                                std::to_string(golds.size()) + ") differ in length");
  }
  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::trunc);
    if (!file) throw std::runtime_error("cannot write " + out);
  }
  std::ostream& os = out.empty() ? std::cout : file;
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < completions.size(); ++i) {
    const auto d = vsqa::reward::score_completion(completions[i], golds[i], vocab, cfg);
    nlohmann::json j{{"index", i}, {"reward", d.reward}, {"label", d.label}, {"answer", d.answer}};
    if (d.match) {
      j["match"] = {{"synonym", d.match->synonym}, {"score", d.match->score}, {"weight", d.match->weight}};
    } else {
      j["match"] = nullptr;
    }
    os << h::dump_fixed(j, false) << '\n';
    sum += d.reward;
    sq += d.reward * d.reward;
  }
  const double n = static_cast<double>(completions.size());
  const double mean = n > 0 ? sum / n : 0.0;
  const double stddev = n > 0 ? std::sqrt(std::max(0.0, sq / n - mean * mean)) : 0.0;
  std::fprintf(out.empty() ? stderr : stdout, "rewards: n=%zu mean=%s std=%s\n", completions.size(),
               h::fixed6(mean).c_str(), h::fixed6(stddev).c_str());
  return 0;
}

int run_report(const std::string& config_path, const std::string& dataset, const std::vector<std::string>& runs,
               const std::vector<std::string>& referees, const std::string& out, bool no_plots) {
  const auto cfg = load_config(config_path);
  std::map<std::string, std::string> referee_by_name;
  for (const auto& r : referees) {
    const auto [name, path] = split_named(r);
    referee_by_name[name] = path;
  }
  std::vector<h::EvalReport> reports;
  for (const auto& run : runs) {
    const auto [name, path] = split_named(run);
    h::EvaluateRequest req;
    req.dataset = dataset;
    req.predictions = path;
    req.out_dir = fs::path(out) / name;
    req.model_name = name;
    if (const auto it = referee_by_name.find(name); it != referee_by_name.end()) {
      req.referee_file = fs::path(it->second);
      referee_by_name.erase(it);
    }
    req.plots = !no_plots;
    reports.push_back(h::run_evaluation(req, cfg));
  }
  if (!referee_by_name.empty()) {
    throw std::invalid_argument("referee results given for unknown run '" + referee_by_name.begin()->first + "'");
  }
  h::emit_comparison(reports, out, {!no_plots});
  std::printf("report for %zu runs written to %s\n", reports.size(), out.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Vibration signal QA toolkit"};
  app.set_version_flag("--version", VSQA_VERSION);
  app.require_subcommand(1);
  std::string config;
  app.add_option("-c,--config", config, "Global JSON config")->check(CLI::ExistingFile);

  auto* gen = app.add_subcommand("generate", "Synthesize signals, render images and write the QA dataset");
  std::string families, gen_out, thu_dir;
  std::size_t per_family = 200, eval_per_family = 20, thu_segment = 4096, gen_workers = 0;
  std::uint64_t seed = 0;
  bool no_images = false;
  gen->add_option("--families", families, "Comma-separated family codes (AM,FM,...,THU) or ALL");
  gen->add_option("--per-family", per_family, "Train records per family")->capture_default_str();
  gen->add_option("--eval-per-family", eval_per_family, "Eval records per family")->capture_default_str();
  gen->add_option("--seed", seed, "Random seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen->add_option("--thu-dir", thu_dir, "Directory of .f32 bearing recordings with JSON sidecars")
      ->check(CLI::ExistingDirectory);
  gen->add_option("--thu-segment", thu_segment, "Samples per THU segment")->capture_default_str();
  gen->add_option("--workers", gen_workers, "Worker threads (0: config or hardware)");
  gen->add_flag("--no-images", no_images, "Skip PNG rendering");

  auto* eval = app.add_subcommand("evaluate", "Rule-based metrics and grouped report");
  std::string eval_dataset, eval_preds, eval_out, model = "model", referee_file;
  std::size_t eval_workers = 0;
  bool no_plots = false;
  eval->add_option("--dataset", eval_dataset, "eval.jsonl or dataset directory")->required()->check(CLI::ExistingPath);
  eval->add_option("--predictions", eval_preds, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Report directory")->required();
  eval->add_option("--model-name", model, "Name used in the summary table")->capture_default_str();
  eval->add_option("--referee-results", referee_file, "referee.jsonl to merge")->check(CLI::ExistingFile);
  eval->add_option("--workers", eval_workers, "Worker threads (0: config or hardware)");
  eval->add_flag("--no-plots", no_plots, "Skip bar charts");

  auto* ref = app.add_subcommand("referee", "Score predictions with an external referee model");
  std::string ref_dataset, ref_preds, ref_out;
  ref->add_option("--dataset", ref_dataset, "eval.jsonl or dataset directory")->required()->check(CLI::ExistingPath);
  ref->add_option("--predictions", ref_preds, "Prediction JSONL")->required()->check(CLI::ExistingFile);
  ref->add_option("--out", ref_out, "Output directory for referee.jsonl")->required();

  auto* rew = app.add_subcommand("reward", "Type-identification reward for policy optimization");
  std::string completions, gold, vocab, rew_out;
  std::optional<double> beta;
  rew->add_option("--completions", completions, "JSONL of completions")->required()->check(CLI::ExistingFile);
  rew->add_option("--gold", gold, "JSONL of gold labels")->required()->check(CLI::ExistingFile);
  rew->add_option("--vocab", vocab, "Synonym vocabulary JSON (default: built-in)")->check(CLI::ExistingFile);
  rew->add_option("--beta-exact", beta, "Bonus for an exact match");
  rew->add_option("--out", rew_out, "Scores JSONL (default: stdout)");

  auto* rep = app.add_subcommand("report", "Evaluate several runs and write a comparison table");
  std::string rep_dataset, rep_out;
  std::vector<std::string> runs, referees;
  bool rep_no_plots = false;
  rep->add_option("--dataset", rep_dataset, "eval.jsonl or dataset directory")->required()->check(CLI::ExistingPath);
  rep->add_option("--run", runs, "NAME=predictions.jsonl, repeatable")->required();
  rep->add_option("--referee", referees, "NAME=referee.jsonl, repeatable");
  rep->add_option("--out", rep_out, "Output directory")->required();
  rep->add_flag("--no-plots", rep_no_plots, "Skip bar charts");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) {
      return run_generate(config, families, per_family, eval_per_family, seed, gen_out, thu_dir, thu_segment,
                          gen_workers, no_images);
    }
    if (*eval) return run_evaluate(config, eval_dataset, eval_preds, eval_out, model, referee_file, eval_workers, no_plots);
    if (*ref) return run_referee(config, ref_dataset, ref_preds, ref_out);
    if (*rew) return run_reward(config, completions, gold, vocab, beta, rew_out);
    if (*rep) return run_report(config, rep_dataset, runs, referees, rep_out, rep_no_plots);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
