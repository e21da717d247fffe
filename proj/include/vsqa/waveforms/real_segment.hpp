#pragma once

#include <nlohmann/json.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsqa/waveforms/synthesize.hpp"

namespace vsqa::waveforms {

enum class HealthCondition { Normal, InnerRaceFault, BallFault, OuterRaceFault };

struct HealthInfo {
  HealthCondition condition;
  std::string_view key;          // sidecar label value
  std::string_view description;  // used in answers
};

inline constexpr std::array<HealthInfo, 4> kHealthInfo{{
    {HealthCondition::Normal, "normal", "normal condition"},
    {HealthCondition::InnerRaceFault, "inner_race_fault", "inner fault"},
    {HealthCondition::BallFault, "ball_fault", "roller fault"},
    {HealthCondition::OuterRaceFault, "outer_race_fault", "outer fault"},
}};

inline const HealthInfo& info(HealthCondition c) { return kHealthInfo[static_cast<std::size_t>(c)]; }

inline std::optional<HealthCondition> health_from_key(std::string_view key) {
  for (const auto& h : kHealthInfo) {
    if (h.key == key) return h.condition;
  }
  return std::nullopt;
}

/// Sidecar header of a raw recording: `<file>.json` next to `<file>`.
struct RecordingHeader {
  double sample_rate_hz = 49600.0;
  HealthCondition label = HealthCondition::Normal;
  int channel = 0;
  std::optional<double> shaft_frequency_hz;  // operator-supplied
  std::optional<double> fault_frequency_hz;  // operator-supplied
};

struct RealSegment {
  Waveform waveform;
  RecordingHeader header;
  std::string source;
  std::size_t offset = 0;
};

class RecordingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  auto p = raw;
  p += ".json";
  return p;
}

inline RecordingHeader read_header(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw RecordingError("missing recording header: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError("malformed recording header " + path.string() + ": " + e.what());
  }
  RecordingHeader h;
  try {
    h.sample_rate_hz = j.at("sample_rate_hz").get<double>();
    const auto label = health_from_key(j.at("label").get<std::string>());
    if (!label) throw RecordingError("unknown health label in " + path.string());
    h.label = *label;
    h.channel = j.value("channel", 0);
    if (j.contains("shaft_frequency_hz")) h.shaft_frequency_hz = j["shaft_frequency_hz"].get<double>();
    if (j.contains("fault_frequency_hz")) h.fault_frequency_hz = j["fault_frequency_hz"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw RecordingError("malformed recording header " + path.string() + ": " + e.what());
  }
  if (!std::isfinite(h.sample_rate_hz) || h.sample_rate_hz <= 0.0) {
    throw RecordingError("sample_rate_hz must be > 0 in " + path.string());
  }
  return h;
}

inline nlohmann::json header_to_json(const RecordingHeader& h) {
  nlohmann::json j{{"sample_rate_hz", h.sample_rate_hz},
                   {"label", std::string(info(h.label).key)},
                   {"channel", h.channel}};
  if (h.shaft_frequency_hz) j["shaft_frequency_hz"] = *h.shaft_frequency_hz;
  if (h.fault_frequency_hz) j["fault_frequency_hz"] = *h.fault_frequency_hz;
  return j;
}

/// Number of float32 samples stored in a raw recording.
inline std::size_t recording_length(const std::filesystem::path& raw) {
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(raw, ec);
  if (ec) throw RecordingError("cannot stat recording " + raw.string());
  if (bytes % 4 != 0) throw RecordingError("truncated recording (size not a multiple of 4): " + raw.string());
  return static_cast<std::size_t>(bytes / 4);
}

/// Reads `length` little-endian float32 samples starting at sample `offset`.
inline RealSegment load_real_segment(const std::filesystem::path& raw, std::size_t offset, std::size_t length,
                                     std::optional<std::filesystem::path> header_path = std::nullopt) {
  if (length == 0) throw std::invalid_argument("segment length must be > 0");
  const RecordingHeader header = read_header(header_path.value_or(sidecar_path(raw)));
  const std::size_t total = recording_length(raw);
  if (offset > total || length > total - offset) {
    throw RecordingError("segment [" + std::to_string(offset) + ", " + std::to_string(offset + length) +
                         ") exceeds recording of " + std::to_string(total) + " samples");
  }
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw RecordingError("cannot open recording " + raw.string());
  in.seekg(static_cast<std::streamoff>(offset * 4));
  std::vector<std::uint8_t> bytes(length * 4);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size())) throw RecordingError("short read on " + raw.string());

  std::vector<double> samples(length);
  for (std::size_t i = 0; i < length; ++i) {
    std::uint32_t bitsv = std::uint32_t{bytes[4 * i]} | (std::uint32_t{bytes[4 * i + 1]} << 8) |
                          (std::uint32_t{bytes[4 * i + 2]} << 16) | (std::uint32_t{bytes[4 * i + 3]} << 24);
    const float v = std::bit_cast<float>(bitsv);
    if (!std::isfinite(v)) throw RecordingError("malformed sample (non-finite) in " + raw.string());
    samples[i] = static_cast<double>(v);
  }
  RealSegment seg{
      Waveform{std::move(samples), SamplingConfig::from_count(header.sample_rate_hz, length), "THU"},
      header, raw.filename().string(), offset};
  return seg;
}

/// Writes a raw little-endian float32 recording plus its JSON sidecar.
inline void write_recording(const std::filesystem::path& raw, const std::vector<float>& samples,
                            const RecordingHeader& header) {
  std::ofstream out(raw, std::ios::binary | std::ios::trunc);
  if (!out) throw RecordingError("cannot write recording " + raw.string());
  for (float v : samples) {
    const auto b = std::bit_cast<std::uint32_t>(v);
    const char le[4] = {static_cast<char>(b & 0xff), static_cast<char>((b >> 8) & 0xff),
                        static_cast<char>((b >> 16) & 0xff), static_cast<char>((b >> 24) & 0xff)};
    out.write(le, 4);
  }
  std::ofstream side(sidecar_path(raw), std::ios::trunc);
  side << header_to_json(header).dump(2) << '\n';
}

}  // namespace vsqa::waveforms
