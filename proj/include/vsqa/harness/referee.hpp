#pragma once

#include <nlohmann/json.hpp>

#include <cctype>
#include <charconv>
#include <chrono>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "vsqa/common/parallel.hpp"
#include "vsqa/harness/config.hpp"
#include "vsqa/harness/evaluation.hpp"

namespace vsqa::harness {

enum class RefereeStatus { Ok, Error, Skipped };

inline std::string_view status_name(RefereeStatus s) {
  switch (s) {
    case RefereeStatus::Ok: return "ok";
    case RefereeStatus::Error: return "error";
    case RefereeStatus::Skipped: return "skipped";
  }
  return "error";
}

/// Scores are set exactly when status is Ok.
struct RefereeResult {
  RefereeStatus status = RefereeStatus::Skipped;
  std::optional<double> similarity;
  std::optional<double> parameter;
  std::string explanation;  // raw response text
  std::string error;

  static RefereeResult failed(std::string why, std::string raw = {}) {
    RefereeResult r;
    r.status = RefereeStatus::Error;
    r.error = std::move(why);
    r.explanation = std::move(raw);
    return r;
  }
};

inline constexpr double kMinRefereeScore = 1.0;
inline constexpr double kMaxRefereeScore = 10.0;

/// Fills {question}, {gold} and {prediction} in one pass, so slot-like text inside the
/// inserted values stays literal.
inline std::string render_prompt(std::string_view tmpl, const EvalSample& s) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i);
      if (close != std::string_view::npos) {
        const auto name = tmpl.substr(i + 1, close - i - 1);
        const std::string* value = name == "question" ? &s.question
                                   : name == "gold"   ? &s.gold
                                   : name == "prediction" ? &s.prediction
                                                          : nullptr;
        if (value) {
          out += *value;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

/// The first non-empty line must hold exactly two numbers in [1, 10]; the rest is the explanation.
inline RefereeResult parse_referee_response(std::string_view text) {
  std::size_t pos = 0;
  std::string_view first;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.front()))) line.remove_prefix(1);
    while (!line.empty() && std::isspace(static_cast<unsigned char>(line.back()))) line.remove_suffix(1);
    pos = end + 1;
    if (!line.empty()) {
      first = line;
      break;
    }
  }
  if (first.empty()) return RefereeResult::failed("empty referee response", std::string(text));

  std::vector<double> scores;
  std::size_t i = 0;
  while (i < first.size()) {
    while (i < first.size() && std::isspace(static_cast<unsigned char>(first[i]))) ++i;
    if (i == first.size()) break;
    std::size_t j = i;
    while (j < first.size() && !std::isspace(static_cast<unsigned char>(first[j]))) ++j;
    const auto token = first.substr(i, j - i);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) {
      return RefereeResult::failed("first line is not two numbers: '" + std::string(first) + "'", std::string(text));
    }
    scores.push_back(v);
    i = j;
  }
  if (scores.size() != 2) {
    return RefereeResult::failed("expected 2 scores on the first line, got " + std::to_string(scores.size()),
                                 std::string(text));
  }
  for (double v : scores) {
    if (!(v >= kMinRefereeScore && v <= kMaxRefereeScore)) {
      return RefereeResult::failed("score out of range [1, 10]: '" + std::string(first) + "'", std::string(text));
    }
  }
  RefereeResult r;
  r.status = RefereeStatus::Ok;
  r.similarity = scores[0];
  r.parameter = scores[1];
  r.explanation = std::string(text);
  return r;
}

/// Chat-completions request body for one prompt.
inline nlohmann::json referee_request(const RefereeConfig& cfg, const std::string& prompt) {
  return {{"model", cfg.model},
          {"temperature", cfg.temperature},
          {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})}};
}

/// Pulls choices[0].message.content out of a chat-completions response body.
inline std::string response_text(const std::string& body) {
  const auto j = nlohmann::json::parse(body);
  return j.at("choices").at(0).at("message").at("content").get<std::string>();
}

/// Sends a request body, returns the response body. Throws on transport failure.
using RefereeTransport = std::function<std::string(const nlohmann::json& request)>;

/// One result per sample. Nothing escapes: transport, protocol and parse failures are
/// recorded on the sample they belong to. Transport failures are retried.
inline std::vector<RefereeResult> score_with_referee(const std::vector<EvalSample>& samples, const RefereeConfig& cfg,
                                                     const RefereeTransport& transport) {
  std::vector<RefereeResult> out(samples.size());
  if (!cfg.enabled()) return out;  // default-constructed results are Skipped
  try {
    cfg.validate();
    if (!transport) throw std::invalid_argument("no referee transport");
  } catch (const std::exception& e) {
    for (auto& r : out) r = RefereeResult::failed(e.what());
    return out;
  }
  parallel_for(samples.size(), cfg.max_concurrency, [&](std::size_t i) {
    const auto request = referee_request(cfg, render_prompt(cfg.prompt_template, samples[i]));
    std::string last_error;
    for (int attempt = 0; attempt <= cfg.max_retries; ++attempt) {
      if (attempt > 0 && cfg.retry_backoff_ms > 0) {
        std::this_thread::sleep_for(std::chrono::milliseconds(cfg.retry_backoff_ms * attempt));
      }
      std::string body;
      try {
        body = transport(request);
      } catch (const std::exception& e) {
        last_error = e.what();
        continue;
      }
      try {
        out[i] = parse_referee_response(response_text(body));
      } catch (const std::exception& e) {
        out[i] = RefereeResult::failed(std::string("malformed referee response: ") + e.what(), body);
      }
      return;
    }
    out[i] = RefereeResult::failed("referee request failed after " + std::to_string(cfg.max_retries + 1) +
                                   " attempts: " + last_error);
  });
  return out;
}

inline nlohmann::json referee_to_json(const RefereeResult& r) {
  nlohmann::json j{{"status", std::string(status_name(r.status))}};
  j["similarity"] = r.similarity ? nlohmann::json(*r.similarity) : nlohmann::json(nullptr);
  j["parameter"] = r.parameter ? nlohmann::json(*r.parameter) : nlohmann::json(nullptr);
  if (!r.explanation.empty()) j["explanation"] = r.explanation;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

inline RefereeResult referee_from_json(const nlohmann::json& j) {
  RefereeResult r;
  const auto status = j.at("status").get<std::string>();
  r.status = status == "ok" ? RefereeStatus::Ok : status == "error" ? RefereeStatus::Error : RefereeStatus::Skipped;
  if (status != "ok" && status != "error" && status != "skipped") {
    throw std::invalid_argument("unknown referee status: " + status);
  }
  if (j.contains("similarity") && !j["similarity"].is_null()) r.similarity = j["similarity"].get<double>();
  if (j.contains("parameter") && !j["parameter"].is_null()) r.parameter = j["parameter"].get<double>();
  r.explanation = j.value("explanation", "");
  r.error = j.value("error", "");
  if ((r.status == RefereeStatus::Ok) != (r.similarity.has_value() && r.parameter.has_value())) {
    throw std::invalid_argument("referee scores must be present exactly when status is ok");
  }
  return r;
}

}  // namespace vsqa::harness
