#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsqa/common/parallel.hpp"
#include "vsqa/sqa/build.hpp"
#include "vsqa/sqa/dataset.hpp"
#include "vsqa/waveforms/plot.hpp"
#include "vsqa/waveforms/random_spec.hpp"
#include "vsqa/waveforms/real_segment.hpp"

namespace vsqa::sqa {

struct GenerateOptions {
  std::vector<wf::Category> families;  // empty: the 11 synthetic families, plus THU when thu_dir is set
  std::size_t per_family = 200;
  std::size_t eval_per_family = 20;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  std::optional<std::filesystem::path> thu_dir;  // directory of *.f32 recordings with JSON sidecars
  std::size_t thu_segment_samples = 4096;
  wf::ParamRanges ranges;
  wf::SamplingConfig sampling = wf::SamplingConfig::synthetic_default();
  wf::PlotStyle plot;
  bool render_images = true;
  std::size_t workers = 0;
};

struct GenerateResult {
  SplitResult data;
  std::filesystem::path manifest_path;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Each record draws from its own stream, so the output does not depend on scheduling.
inline std::uint64_t record_seed(std::uint64_t seed, wf::Category c, std::size_t index) {
  return splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(c) + 1)) + index);
}

inline std::string record_id(wf::Category c, std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s_%04zu", std::string(wf::code(c)).c_str(), index);
  return buf;
}

inline std::string image_path(wf::Category c, const std::string& id) {
  return "images/" + std::string(wf::info(c).file_stem) + "/" + id + ".png";
}

struct Job {
  wf::Category category;
  std::size_t index;
};

struct ThuSource {
  std::filesystem::path raw;
  std::size_t length;
};

inline std::vector<ThuSource> list_recordings(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw wf::RecordingError("not a directory: " + dir.string());
  std::vector<ThuSource> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".f32") {
      out.push_back({entry.path(), wf::recording_length(entry.path())});
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.raw < b.raw; });
  if (out.empty()) throw wf::RecordingError("no .f32 recordings in " + dir.string());
  return out;
}

inline void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace detail

/// Synthesizes (or cuts) per_family + eval_per_family signals for every requested category,
/// renders their images, builds QA groups, splits them and writes the dataset.
inline GenerateResult generate_dataset(const GenerateOptions& opt) {
  if (opt.out_dir.empty()) throw std::invalid_argument("output directory is required");
  std::vector<wf::Category> families = opt.families;
  if (families.empty()) {
    families.assign(wf::kSyntheticCategories.begin(), wf::kSyntheticCategories.end());
    if (opt.thu_dir) families.push_back(wf::Category::THU);
  }
  std::sort(families.begin(), families.end());
  families.erase(std::unique(families.begin(), families.end()), families.end());

  const std::size_t per_category = opt.per_family + opt.eval_per_family;
  std::vector<detail::ThuSource> recordings;
  if (std::find(families.begin(), families.end(), wf::Category::THU) != families.end()) {
    if (!opt.thu_dir) throw std::invalid_argument("THU records need a directory of recordings");
    if (opt.thu_segment_samples < 2) throw std::invalid_argument("THU segment length must be at least 2");
    recordings = detail::list_recordings(*opt.thu_dir);
    // Segments are cut round-robin across files without overlap.
    for (std::size_t f = 0; f < recordings.size(); ++f) {
      const std::size_t needed = (per_category + recordings.size() - 1 - f) / recordings.size();
      if (needed * opt.thu_segment_samples > recordings[f].length) {
        throw wf::RecordingError(recordings[f].raw.string() + " is too short for " + std::to_string(needed) +
                                 " segments of " + std::to_string(opt.thu_segment_samples) + " samples");
      }
    }
  }

  std::vector<detail::Job> jobs;
  for (auto c : families) {
    for (std::size_t i = 0; i < per_category; ++i) jobs.push_back({c, i});
  }
  std::vector<SqaRecord> records(jobs.size());
  parallel_for(jobs.size(), opt.workers, [&](std::size_t k) {
    const auto [category, index] = jobs[k];
    const std::string id = detail::record_id(category, index);
    SqaRecord r;
    wf::Waveform waveform{{}, opt.sampling, ""};
    if (category == wf::Category::THU) {
      const auto& src = recordings[index % recordings.size()];
      const auto seg = wf::load_real_segment(src.raw, (index / recordings.size()) * opt.thu_segment_samples,
                                             opt.thu_segment_samples);
      r = build_sqa(seg, wf::compute_spectrum(seg.waveform));
      waveform = seg.waveform;
    } else {
      wf::SpecRng rng(detail::record_seed(opt.seed, category, index));
      const auto spec = wf::sample_random_spec(category, opt.ranges, rng);
      waveform = wf::synthesize(spec, opt.sampling);
      r = build_sqa(spec, waveform, wf::compute_spectrum(waveform));
    }
    r.record_id = id;
    r.image_path = detail::image_path(category, id);
    if (opt.render_images) detail::write_file(opt.out_dir / r.image_path, wf::render_plot(waveform, opt.plot));
    records[k] = std::move(r);
  });

  GenerateResult result;
  result.data = split_dataset(records, {opt.per_family, opt.eval_per_family}, opt.seed);
  result.manifest_path = write_dataset(result.data, opt.out_dir);
  return result;
}

}  // namespace vsqa::sqa
