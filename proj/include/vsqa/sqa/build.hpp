#pragma once

#include <nlohmann/json.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsqa/sqa/format.hpp"
#include "vsqa/waveforms/real_segment.hpp"
#include "vsqa/waveforms/spec_json.hpp"
#include "vsqa/waveforms/spectrum.hpp"
#include "vsqa/waveforms/synthesize.hpp"

namespace vsqa::sqa {

namespace wf = vsqa::waveforms;

enum class QaKind { SignalType, Parameter, Spectral, Diagnostic, Conclusion };

inline constexpr std::string_view kind_name(QaKind k) {
  switch (k) {
    case QaKind::SignalType: return "signal_type";
    case QaKind::Parameter: return "parameter";
    case QaKind::Spectral: return "spectral";
    case QaKind::Diagnostic: return "diagnostic";
    case QaKind::Conclusion: return "conclusion";
  }
  return "parameter";
}

inline QaKind kind_from_name(std::string_view name) {
  for (auto k : {QaKind::SignalType, QaKind::Parameter, QaKind::Spectral, QaKind::Diagnostic, QaKind::Conclusion}) {
    if (kind_name(k) == name) return k;
  }
  throw std::invalid_argument("unknown QA kind: " + std::string(name));
}

struct QaPair {
  std::string question;
  std::string answer;
  QaKind kind = QaKind::Parameter;

  bool operator==(const QaPair&) const = default;
};

struct SqaRecord {
  std::string record_id;
  std::string image_path;  // relative to the dataset root
  wf::Category category = wf::Category::SH;
  nlohmann::json ground_truth;
  std::vector<QaPair> qa;

  bool operator==(const SqaRecord&) const = default;
};

inline constexpr std::size_t kMinPairs = 5;
inline constexpr std::size_t kMaxPairs = 9;
inline constexpr const char* kTypeQuestion = "What is the type of this signal?";
inline constexpr const char* kConclusionQuestion = "What is your conclusion?";

class TemplateMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

/// "Amplitude Modulated Signal" -> "amplitude modulated signal"; all-caps words such as FM-AM and THU keep their case.
inline std::string label_in_sentence(std::string_view label) {
  std::string out;
  std::size_t i = 0;
  while (i < label.size()) {
    std::size_t j = label.find(' ', i);
    if (j == std::string_view::npos) j = label.size();
    const auto word = label.substr(i, j - i);
    bool acronym = word.size() > 1;
    for (char c : word) acronym = acronym && !std::islower(static_cast<unsigned char>(c));
    for (char c : word) out.push_back(acronym ? c : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (j < label.size()) out.push_back(' ');
    i = j + 1;
  }
  return out;
}

inline std::string with_article(const std::string& phrase) {
  if (phrase.empty()) return phrase;
  const char first = phrase.front();
  const bool vowel_sound = std::string_view("aeiou").find(first) != std::string_view::npos ||
                           phrase.rfind("FM", 0) == 0;
  return (vowel_sound ? "an " : "a ") + phrase;
}

inline std::string hz(double v) { return format_quantity(v, Unit::Hertz) + " Hz"; }
inline std::string sec(double v) { return format_quantity(v, Unit::Seconds) + " seconds"; }

class Builder {
 public:
  void add(std::string q, std::string a, QaKind k) { pairs_.push_back({std::move(q), std::move(a), k}); }

  void type(wf::Category c) {
    add(kTypeQuestion, "This is " + with_article(label_in_sentence(wf::info(c).label)) + ".", QaKind::SignalType);
  }
  void amplitude(double a) {
    add("What is the amplitude of this signal?",
        "The amplitude of this signal is " + format_quantity(a, Unit::Volts) + ".", QaKind::Parameter);
  }
  void phase(double p) {
    add("What is the phase of this signal?",
        "The phase of this signal is " + format_quantity(p, Unit::Radians) + " radians.", QaKind::Parameter);
  }
  void base_frequency(double f, bool long_form = true) {
    add("What is the base frequency of this signal?",
        (long_form ? "The base frequency of this signal is " : "The base frequency is ") + hz(f) + ".",
        QaKind::Parameter);
  }
  void period(double f) {
    add("What is the period of this signal?", "The period of this signal is " + sec(1.0 / f) + ".", QaKind::Parameter);
  }
  void peak(double f, bool near_base = false) {
    add("What is the peak frequency of this signal?",
        "The peak frequency of this signal is " + format_quantity(f, Unit::None) +
            (near_base ? ", which is close to its base frequency." : "."),
        QaKind::Spectral);
  }
  void carrier(double f) {
    add("What is the carrier frequency of this signal?", "The carrier frequency of this signal is " + hz(f) + ".",
        QaKind::Parameter);
  }
  void modulation_frequency(double f) {
    add("What is the modulation frequency of this signal?",
        "The modulation frequency of this signal is " + hz(f) + ".", QaKind::Parameter);
  }
  void modulation_index(double m) {
    add("What is the modulation index of this signal?",
        "The modulation index of this signal is " + format_quantity(m, Unit::None) + ".", QaKind::Parameter);
  }
  void deviation(double f) {
    add("What is the frequency deviation of this signal?", "The frequency deviation of this signal is " + hz(f) + ".",
        QaKind::Parameter);
  }
  void decay(double d) {
    add("What is the decay coefficient of this signal?",
        "The decay coefficient of this signal is " + format_quantity(d, Unit::None) + ".", QaKind::Parameter);
  }
  void shock_interval(double t) {
    add("What is the shock interval of this signal?",
        "The shock interval of this signal is [" + format_quantity(t, Unit::Seconds) + "] seconds.",
        QaKind::Parameter);
  }
  void conclusion(std::string text) { add(kConclusionQuestion, std::move(text), QaKind::Conclusion); }

  std::vector<QaPair> take() {
    if (pairs_.size() < kMinPairs || pairs_.size() > kMaxPairs) {
      throw std::logic_error("template produced " + std::to_string(pairs_.size()) + " QA pairs");
    }
    return std::move(pairs_);
  }

 private:
  std::vector<QaPair> pairs_;
};

inline void check_spectrum(const wf::Waveform& w, const wf::Spectrum& s) {
  if (s.magnitudes.size() != w.samples.size() / 2 + 1 ||
      std::abs(s.resolution_hz - w.sampling.sample_rate_hz() / static_cast<double>(w.samples.size())) > 1e-9) {
    throw TemplateMismatch("spectrum does not belong to this waveform");
  }
}

}  // namespace detail

/// QA group for a synthetic signal. Parameters come from the signal description; the peak frequency from the spectrum.
inline SqaRecord build_sqa(const wf::SignalSpec& spec, const wf::Waveform& waveform, const wf::Spectrum& spectrum) {
  const wf::Category category = wf::category_of(spec);
  if (waveform.spec_id != wf::code(category)) {
    throw TemplateMismatch("waveform '" + waveform.spec_id + "' was not synthesized from a " +
                           std::string(wf::code(category)) + " spec");
  }
  detail::check_spectrum(waveform, spectrum);
  const double peak = wf::peak_frequency(spectrum);

  detail::Builder b;
  b.type(category);
  std::visit(
      wf::detail::overloaded{
          [&](const wf::AmplitudeModulated& s) {
            b.carrier(s.carrier_hz);
            b.modulation_frequency(s.modulation_hz);
            b.modulation_index(s.modulation_index);
            b.peak(peak);
            b.conclusion("The amplitude of this signal varies periodically with the modulating signal.");
          },
          [&](const wf::FrequencyModulated& s) {
            b.carrier(s.carrier_hz);
            b.modulation_frequency(s.modulation_hz);
            b.deviation(s.deviation_hz);
            b.peak(peak);
            b.conclusion("The instantaneous frequency of this signal varies periodically around the carrier frequency.");
          },
          [&](const wf::AmFmCoupled& s) {
            b.carrier(s.carrier_hz);
            b.modulation_frequency(s.modulation_hz);
            b.modulation_index(s.modulation_index);
            b.deviation(s.deviation_hz);
            b.peak(peak);
            b.conclusion("Both the amplitude and the frequency of this signal vary periodically around a shared carrier.");
          },
          [&](const wf::SimpleHarmonic& s) {
            b.amplitude(s.amplitude);
            b.phase(s.phase);
            b.base_frequency(s.base_hz);
            b.period(s.base_hz);
            b.peak(peak, true);
            b.conclusion("It represents a single sine wave with a constant amplitude.");
          },
          [&](const wf::MultipleHarmonic& s) {
            b.base_frequency(s.base_hz);
            b.add("How many harmonic components does this signal contain?",
                  "This signal contains " + std::to_string(s.harmonics.size()) + " harmonic components.",
                  QaKind::Parameter);
            b.period(s.base_hz);
            b.peak(peak);
            b.conclusion("It is a periodic signal composed of several harmonics of the base frequency.");
          },
          [&](const wf::RandomHarmonic& s) {
            std::vector<double> freqs;
            for (const auto& c : s.components) freqs.push_back(c.frequency_hz);
            b.add("How many sine components does this signal contain?",
                  "This signal contains " + std::to_string(s.components.size()) + " sine components.",
                  QaKind::Parameter);
            b.add("What are the frequencies of the components of this signal?",
                  "The component frequencies of this signal are " + format_list(freqs, Unit::Hertz) + " Hz.",
                  QaKind::Parameter);
            b.peak(peak);
            b.conclusion("It is a superposition of sine waves with random frequencies, so it has no fixed period.");
          },
          [&](const wf::CombinedHarmonic& s) {
            b.base_frequency(s.multiple.base_hz);
            b.add("How many harmonic components does this signal contain?",
                  "This signal contains " + std::to_string(s.multiple.harmonics.size()) + " harmonic components.",
                  QaKind::Parameter);
            b.add("How many random components does this signal contain?",
                  "This signal contains " + std::to_string(s.random.components.size()) + " random components.",
                  QaKind::Parameter);
            b.peak(peak);
            b.conclusion("It combines a periodic harmonic series with sine components of random frequency.");
          },
          [&](const wf::SingleTransient& s) {
            b.amplitude(s.amplitude);
            b.base_frequency(s.base_hz, false);
            b.period(s.base_hz);
            b.decay(s.decay);
            b.add("When does the impulse of this signal occur?",
                  "The impulse of this signal occurs at " + detail::sec(s.onset_s) + ".", QaKind::Parameter);
            b.peak(peak);
            b.conclusion("This signal has a single transient impulse that decays over time.");
          },
          [&](const wf::MultipleTransient& s) {
            std::vector<double> onsets;
            for (const auto& c : s.components) onsets.push_back(c.onset_s);
            b.add("How many impulses does this signal contain?",
                  "This signal contains " + std::to_string(s.components.size()) + " transient impulses.",
                  QaKind::Parameter);
            b.add("When do the impulses of this signal occur?",
                  "The impulses of this signal occur at " + format_list(onsets, Unit::Seconds) + " seconds.",
                  QaKind::Parameter);
            b.peak(peak);
            b.conclusion("This signal contains several transient impulses, each decaying over time.");
          },
          [&](const wf::SinglePeriodic& s) {
            b.amplitude(s.amplitude);
            b.base_frequency(s.base_hz, false);
            b.period(s.base_hz);
            b.peak(peak);
            b.shock_interval(s.interval_s);
            b.conclusion("This signal has impulse characteristics and decays over time.");
          },
          [&](const wf::MultiplePeriodic& s) {
            b.base_frequency(s.base_hz, false);
            b.period(s.base_hz);
            b.add("How many impulses does this signal contain?",
                  "This signal contains " + std::to_string(s.impulses.size()) + " periodic impulses.",
                  QaKind::Parameter);
            b.peak(peak);
            b.shock_interval(s.interval_s);
            b.conclusion("This signal is a superposition of periodic impulses that each decay over time.");
          },
      },
      spec);

  SqaRecord r;
  r.category = category;
  r.ground_truth = wf::spec_to_json(spec);
  r.ground_truth["peak_frequency_hz"] = peak;
  r.ground_truth["sample_rate_hz"] = waveform.sampling.sample_rate_hz();
  r.ground_truth["num_samples"] = waveform.samples.size();
  r.qa = b.take();
  return r;
}

/// QA group for a real bearing segment, driven by its health label and frequency metadata.
inline SqaRecord build_sqa(const wf::RealSegment& segment, const wf::Spectrum& spectrum) {
  if (segment.waveform.spec_id != wf::code(wf::Category::THU)) {
    throw TemplateMismatch("segment waveform is not tagged as a real recording");
  }
  detail::check_spectrum(segment.waveform, spectrum);
  const auto& h = segment.header;
  const std::string condition(wf::info(h.label).description);
  const bool healthy = h.label == wf::HealthCondition::Normal;

  detail::Builder b;
  b.add(kTypeQuestion, "This is a THU signal representing a bearing.", QaKind::SignalType);
  if (h.shaft_frequency_hz) {
    b.add("What is the fundamental frequency at which this signal was acquired?",
          "The signal was recorded at a fundamental frequency of " + format_quantity(*h.shaft_frequency_hz, Unit::Hertz) +
              "Hz.",
          QaKind::Parameter);
  }
  if (h.fault_frequency_hz) {
    b.add("What is the characteristic fault frequency of this signal?",
          "The characteristic fault frequency of this signal is " + detail::hz(*h.fault_frequency_hz) + ".",
          QaKind::Diagnostic);
  }
  b.add("Which characteristic fault frequency was identified in this signal?",
        healthy ? "No characteristic fault frequency was detected, which is consistent with normal condition."
                : "The detected characteristic frequency aligns with the typical fault frequencies associated with " +
                      condition + ".",
        QaKind::Diagnostic);
  b.add("How does the identified characteristic frequency correlate with the diagnosed fault?",
        healthy ? "The absence of a characteristic fault frequency indicates the bearing is in normal condition."
                : "The identified characteristic frequency is indicative of " + detail::with_article(condition) +
                      " in the bearing.",
        QaKind::Diagnostic);
  b.add("How does the condition of the bearing influence the signal characteristics?",
        "The condition of the bearing influences the signal, allowing for the identification of specific faults like "
        "inner, outer, or roller faults.",
        QaKind::Diagnostic);
  b.conclusion(healthy ? "The absence of a characteristic frequency indicates normal condition."
                       : "The presence of a characteristic frequency indicates " + detail::with_article(condition) + ".");

  SqaRecord r;
  r.category = wf::Category::THU;
  r.ground_truth = wf::header_to_json(h);
  r.ground_truth["family"] = "THU";
  r.ground_truth["source"] = segment.source;
  r.ground_truth["offset"] = segment.offset;
  r.ground_truth["num_samples"] = segment.waveform.samples.size();
  r.ground_truth["peak_frequency_hz"] = wf::peak_frequency(spectrum);
  r.qa = b.take();
  return r;
}

}  // namespace vsqa::sqa
