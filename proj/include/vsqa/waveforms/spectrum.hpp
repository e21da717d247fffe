#pragma once

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "vsqa/waveforms/synthesize.hpp"

namespace vsqa::waveforms {

/// Single-sided amplitude spectrum. A sinusoid of amplitude A that falls on a bin
/// reads A; DC and (for even N) Nyquist bins use |X_k| / N, the others 2|X_k| / N.
struct Spectrum {
  std::vector<double> bin_freqs;
  std::vector<double> magnitudes;
  double resolution_hz = 0.0;
};

inline constexpr const char* kSpectrumScaling =
    "single-sided amplitude: 2|X_k|/N for 0<k<N/2, |X_k|/N at DC and Nyquist";

class NoPeak : public std::runtime_error {
 public:
  NoPeak() : std::runtime_error("spectrum has no peak (all magnitudes zero)") {}
};

namespace detail {

// FFTW planning is not thread-safe; execution on a private plan is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

inline Spectrum compute_spectrum(const Waveform& w) {
  const std::size_t n = w.samples.size();
  if (n < 2) throw std::invalid_argument("spectrum needs at least 2 samples");
  for (double v : w.samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("waveform contains non-finite samples");
  }
  const std::size_t bins = n / 2 + 1;
  std::vector<double> input(w.samples);
  std::vector<std::complex<double>> output(bins);

  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    plan = fftw_plan_dft_r2c_1d(static_cast<int>(n), input.data(),
                                reinterpret_cast<fftw_complex*>(output.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }

  Spectrum s;
  s.resolution_hz = w.sampling.sample_rate_hz() / static_cast<double>(n);
  s.bin_freqs.resize(bins);
  s.magnitudes.resize(bins);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < bins; ++k) {
    s.bin_freqs[k] = static_cast<double>(k) * s.resolution_hz;
    const bool edge = (k == 0) || (n % 2 == 0 && k == n / 2);
    s.magnitudes[k] = std::abs(output[k]) * scale * (edge ? 1.0 : 2.0);
  }
  return s;
}

/// Frequency of the strongest bin; the lowest frequency wins ties.
inline double peak_frequency(const Spectrum& s, bool exclude_dc = true) {
  if (s.magnitudes.empty() || s.magnitudes.size() != s.bin_freqs.size()) {
    throw std::invalid_argument("empty or inconsistent spectrum");
  }
  std::size_t best = 0;
  double best_mag = 0.0;
  bool found = false;
  for (std::size_t k = exclude_dc ? 1 : 0; k < s.magnitudes.size(); ++k) {
    if (s.magnitudes[k] > best_mag) {
      best_mag = s.magnitudes[k];
      best = k;
      found = true;
    }
  }
  if (!found) throw NoPeak();
  return s.bin_freqs[best];
}

}  // namespace vsqa::waveforms
