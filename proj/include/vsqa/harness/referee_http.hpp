#pragma once

#include <httplib.h>

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "vsqa/harness/referee.hpp"

namespace vsqa::harness {

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline ParsedUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("referee endpoint needs a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

/// JSON POST to the configured endpoint with a bearer key read from the named
/// environment variable. The key never leaves this function.
inline RefereeTransport http_transport(const RefereeConfig& cfg) {
  const auto url = split_url(cfg.endpoint);
  const auto seconds = static_cast<time_t>(std::floor(cfg.timeout_s));
  const auto micros = static_cast<time_t>((cfg.timeout_s - std::floor(cfg.timeout_s)) * 1e6);
  const std::string key_env = cfg.api_key_env;
  return [url, seconds, micros, key_env](const nlohmann::json& request) {
    httplib::Client client(url.origin);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);
    httplib::Headers headers;
    if (const char* key = key_env.empty() ? nullptr : std::getenv(key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
    const auto res = client.Post(url.path, headers, request.dump(), "application/json");
    if (!res) throw std::runtime_error("referee request failed: " + httplib::to_string(res.error()));
    if (res->status != 200) {
      throw std::runtime_error("referee returned HTTP " + std::to_string(res->status));
    }
    return res->body;
  };
}

}  // namespace vsqa::harness
