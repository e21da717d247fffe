#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsqa/waveforms/signal_spec.hpp"

namespace vsqa::waveforms {

class SamplingConfig {
 public:
  SamplingConfig(double sample_rate_hz, double duration_s)
      : sample_rate_hz_(sample_rate_hz), duration_s_(duration_s) {
    if (!std::isfinite(sample_rate_hz) || sample_rate_hz <= 0.0) {
      throw std::invalid_argument("sample_rate_hz must be finite and > 0");
    }
    if (!std::isfinite(duration_s) || duration_s <= 0.0) {
      throw std::invalid_argument("duration_s must be finite and > 0");
    }
    num_samples_ = static_cast<std::size_t>(std::llround(sample_rate_hz * duration_s));
    if (num_samples_ < 2) throw std::invalid_argument("sampling yields fewer than 2 samples");
  }

  /// 1 kHz for 1 s: 1 Hz bins.
  static SamplingConfig synthetic_default() { return {1000.0, 1.0}; }

  static SamplingConfig from_count(double sample_rate_hz, std::size_t samples) {
    return {sample_rate_hz, static_cast<double>(samples) / sample_rate_hz};
  }

  double sample_rate_hz() const { return sample_rate_hz_; }
  double duration_s() const { return duration_s_; }
  std::size_t num_samples() const { return num_samples_; }
  double nyquist_hz() const { return sample_rate_hz_ / 2.0; }
  double time_at(std::size_t n) const { return static_cast<double>(n) / sample_rate_hz_; }

  bool operator==(const SamplingConfig&) const = default;

 private:
  double sample_rate_hz_;
  double duration_s_;
  std::size_t num_samples_;
};

struct Waveform {
  std::vector<double> samples;
  SamplingConfig sampling;
  std::string spec_id;
};

class NyquistViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline double am_value(double m, double fc, double fm, double t) {
  return (1.0 + m * std::cos(kTwoPi * fm * t)) * std::cos(kTwoPi * fc * t);
}

inline double fm_value(double df, double fc, double fm, double t) {
  return std::cos(kTwoPi * fc * t + (df / fm) * std::sin(kTwoPi * fm * t));
}

inline double multiple_value(const MultipleHarmonic& s, double t) {
  double y = 0.0;
  for (std::size_t k = 0; k < s.harmonics.size(); ++k) {
    const auto& h = s.harmonics[k];
    y += h.amplitude * std::sin(kTwoPi * static_cast<double>(k + 1) * s.base_hz * t + h.phase);
  }
  return y;
}

inline double random_value(const RandomHarmonic& s, double t) {
  double y = 0.0;
  for (const auto& c : s.components) y += c.amplitude * std::sin(kTwoPi * c.frequency_hz * t + c.phase);
  return y;
}

// Decaying oscillation switched on at `start`; zero before it.
inline double gated_decay(double amplitude, double decay, double freq, double phase, double start,
                          double t) {
  if (t < start) return 0.0;
  const double tau = t - start;
  return amplitude * std::exp(-decay * tau) * std::sin(kTwoPi * freq * tau + phase);
}

inline double value_at(const SignalSpec& spec, double t) {
  return std::visit(
      overloaded{
          [t](const AmplitudeModulated& s) {
            return am_value(s.modulation_index, s.carrier_hz, s.modulation_hz, t);
          },
          [t](const FrequencyModulated& s) {
            return fm_value(s.deviation_hz, s.carrier_hz, s.modulation_hz, t);
          },
          [t](const AmFmCoupled& s) {
            return am_value(s.modulation_index, s.carrier_hz, s.modulation_hz, t) +
                   fm_value(s.deviation_hz, s.carrier_hz, s.modulation_hz, t);
          },
          [t](const SimpleHarmonic& s) {
            return s.amplitude * std::sin(kTwoPi * s.base_hz * t + s.phase);
          },
          [t](const MultipleHarmonic& s) { return multiple_value(s, t); },
          [t](const RandomHarmonic& s) { return random_value(s, t); },
          [t](const CombinedHarmonic& s) {
            return multiple_value(s.multiple, t) + random_value(s.random, t);
          },
          [t](const SingleTransient& s) {
            return gated_decay(s.amplitude, s.decay, s.base_hz, s.phase, s.onset_s, t);
          },
          [t](const MultipleTransient& s) {
            double y = 0.0;
            for (const auto& c : s.components) {
              y += gated_decay(c.amplitude, c.decay, c.base_hz, c.phase, c.onset_s, t);
            }
            return y;
          },
          [t](const SinglePeriodic& s) {
            return gated_decay(s.amplitude, s.decay, s.base_hz, s.phase, s.interval_s, t);
          },
          [t](const MultiplePeriodic& s) {
            double y = 0.0;
            for (std::size_t i = 0; i < s.impulses.size(); ++i) {
              const double start = static_cast<double>(i + 1) * s.interval_s;
              y += gated_decay(s.impulses[i].amplitude, s.decay, s.base_hz, s.impulses[i].phase, start, t);
            }
            return y;
          },
      },
      spec);
}

}  // namespace detail

/// Samples the family formula at t = n / sample_rate. Transient and periodic-impulse
/// families are causal: each decaying term is zero before its own start time.
inline Waveform synthesize(const SignalSpec& spec, const SamplingConfig& sampling,
                           const ValidationOptions& options = {}) {
  validate(spec, options);
  const double top = max_frequency_content(spec);
  if (!(sampling.sample_rate_hz() > 2.0 * top)) {
    throw NyquistViolation("sample rate " + std::to_string(sampling.sample_rate_hz()) +
                           " Hz does not exceed twice the highest content " + std::to_string(top) + " Hz");
  }
  Waveform w{std::vector<double>(sampling.num_samples()), sampling, std::string(code(category_of(spec)))};
  for (std::size_t n = 0; n < w.samples.size(); ++n) {
    w.samples[n] = detail::value_at(spec, sampling.time_at(n));
  }
  return w;
}

}  // namespace vsqa::waveforms
