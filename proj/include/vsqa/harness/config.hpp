#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vsqa/metrics/numbers.hpp"
#include "vsqa/reward/reward.hpp"
#include "vsqa/waveforms/plot.hpp"
#include "vsqa/waveforms/synthesize.hpp"

#ifndef VSQA_DATA_DIR
#define VSQA_DATA_DIR "data"
#endif

namespace vsqa::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Default referee prompt, shipped as a data file.
inline std::filesystem::path default_prompt_path() {
  return std::filesystem::path(VSQA_DATA_DIR) / "referee_prompt.txt";
}

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// An empty endpoint or model disables the referee; every sample is then marked skipped.
struct RefereeConfig {
  std::string endpoint;  // full URL of a chat-completions route
  std::string model;
  std::string api_key_env = "VSQA_REFEREE_API_KEY";
  std::string prompt_template;  // {question}, {gold} and {prediction} slots
  double temperature = 0.0;
  double timeout_s = 60.0;
  std::size_t max_concurrency = 4;
  int max_retries = 2;
  int retry_backoff_ms = 500;

  bool enabled() const { return !endpoint.empty() && !model.empty(); }

  void validate() const {
    if (!(timeout_s > 0.0)) throw ConfigError("referee.timeout_s must be > 0");
    if (max_concurrency == 0) throw ConfigError("referee.max_concurrency must be >= 1");
    if (max_retries < 0 || retry_backoff_ms < 0) throw ConfigError("referee retry settings must be >= 0");
    if (enabled()) {
      if (prompt_template.find("{gold}") == std::string::npos ||
          prompt_template.find("{prediction}") == std::string::npos) {
        throw ConfigError("referee prompt template needs {gold} and {prediction} slots");
      }
    }
  }
};

struct ToolkitConfig {
  double sample_rate_hz = 1000.0;
  double duration_s = 1.0;
  metrics::MetricConfig metric;
  reward::RewardConfig reward;
  RefereeConfig referee;
  waveforms::PlotStyle plot;
  std::size_t workers = 0;  // 0: hardware concurrency

  waveforms::SamplingConfig sampling() const { return {sample_rate_hz, duration_s}; }

  void validate() const {
    (void)sampling();
    metric.validate();
    reward.validate();
    referee.validate();
    if (plot.width < 64 || plot.height < 64) throw ConfigError("plot dimensions must be at least 64 pixels");
  }
};

namespace detail {

inline void check_keys(const nlohmann::json& block, const std::string& name, std::set<std::string> allowed) {
  if (!block.is_object()) throw ConfigError("config block '" + name + "' must be an object");
  for (const auto& [key, value] : block.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + name + "." + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& block, const char* key, T& into) {
  if (block.contains(key)) into = block.at(key).get<T>();
}

}  // namespace detail

/// Parses the global config. Every block and key is optional; unknown keys are rejected.
/// Relative prompt_template_file paths resolve against base_dir.
inline ToolkitConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
  ToolkitConfig c;
  c.referee.prompt_template = read_text_file(default_prompt_path());
  try {
    detail::check_keys(j, "config", {"sampling", "metric", "reward", "referee", "plot", "workers"});
    detail::read(j, "workers", c.workers);
    if (j.contains("sampling")) {
      const auto& s = j["sampling"];
      detail::check_keys(s, "sampling", {"sample_rate_hz", "duration_s"});
      detail::read(s, "sample_rate_hz", c.sample_rate_hz);
      detail::read(s, "duration_s", c.duration_s);
    }
    if (j.contains("metric")) {
      const auto& m = j["metric"];
      detail::check_keys(m, "metric", {"lambda", "epsilon", "bleu_max_n", "stopword_list", "cider_weights"});
      detail::read(m, "lambda", c.metric.lambda);
      detail::read(m, "epsilon", c.metric.epsilon);
      detail::read(m, "bleu_max_n", c.metric.bleu_max_n);
      detail::read(m, "stopword_list", c.metric.stopword_list);
      detail::read(m, "cider_weights", c.metric.cider_weights);
    }
    if (j.contains("reward")) {
      const auto& r = j["reward"];
      detail::check_keys(r, "reward", {"beta_exact", "clamp_lo", "clamp_hi"});
      detail::read(r, "beta_exact", c.reward.beta_exact);
      detail::read(r, "clamp_lo", c.reward.clamp_lo);
      detail::read(r, "clamp_hi", c.reward.clamp_hi);
    }
    if (j.contains("referee")) {
      const auto& r = j["referee"];
      detail::check_keys(r, "referee",
                         {"endpoint", "model", "api_key_env", "prompt_template", "prompt_template_file", "temperature",
                          "timeout_s", "max_concurrency", "max_retries", "retry_backoff_ms"});
      detail::read(r, "endpoint", c.referee.endpoint);
      detail::read(r, "model", c.referee.model);
      detail::read(r, "api_key_env", c.referee.api_key_env);
      detail::read(r, "temperature", c.referee.temperature);
      detail::read(r, "timeout_s", c.referee.timeout_s);
      detail::read(r, "max_concurrency", c.referee.max_concurrency);
      detail::read(r, "max_retries", c.referee.max_retries);
      detail::read(r, "retry_backoff_ms", c.referee.retry_backoff_ms);
      if (r.contains("prompt_template") && r.contains("prompt_template_file")) {
        throw ConfigError("give either referee.prompt_template or referee.prompt_template_file, not both");
      }
      detail::read(r, "prompt_template", c.referee.prompt_template);
      if (r.contains("prompt_template_file")) {
        std::filesystem::path p = r["prompt_template_file"].get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        c.referee.prompt_template = read_text_file(p);
      }
    }
    if (j.contains("plot")) {
      const auto& p = j["plot"];
      detail::check_keys(p, "plot", {"width", "height"});
      detail::read(p, "width", c.plot.width);
      detail::read(p, "height", c.plot.height);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  }
  try {
    c.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

inline ToolkitConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

}  // namespace vsqa::harness
