#pragma once

#include <nlohmann/json.hpp>

#include "vsqa/waveforms/signal_spec.hpp"

namespace vsqa::waveforms {

using json = nlohmann::json;

namespace detail {

inline json terms_to_json(const std::vector<HarmonicTerm>& terms) {
  json out = json::array();
  for (const auto& t : terms) out.push_back({{"amplitude", t.amplitude}, {"phase", t.phase}});
  return out;
}

inline std::vector<HarmonicTerm> terms_from_json(const json& j) {
  std::vector<HarmonicTerm> out;
  for (const auto& t : j) out.push_back({t.at("amplitude").get<double>(), t.at("phase").get<double>()});
  return out;
}

inline json components_to_json(const RandomHarmonic& r) {
  json out = json::array();
  for (const auto& c : r.components) {
    out.push_back({{"amplitude", c.amplitude}, {"frequency_hz", c.frequency_hz}, {"phase", c.phase}});
  }
  return out;
}

inline RandomHarmonic components_from_json(const json& j) {
  RandomHarmonic r;
  for (const auto& c : j) {
    r.components.push_back({c.at("amplitude").get<double>(), c.at("frequency_hz").get<double>(),
                            c.at("phase").get<double>()});
  }
  return r;
}

inline json transient_to_json(const SingleTransient& s) {
  return {{"amplitude", s.amplitude}, {"decay", s.decay}, {"base_hz", s.base_hz},
          {"phase", s.phase}, {"onset_s", s.onset_s}};
}

inline SingleTransient transient_from_json(const json& j) {
  return {j.at("amplitude").get<double>(), j.at("decay").get<double>(), j.at("base_hz").get<double>(),
          j.at("phase").get<double>(), j.value("onset_s", 0.0)};
}

}  // namespace detail

/// {"family": "<code>", ...parameters}
inline json spec_to_json(const SignalSpec& spec) {
  using namespace detail;
  json body = std::visit(
      overloaded{
          [](const AmplitudeModulated& s) -> json {
            return {{"modulation_index", s.modulation_index}, {"carrier_hz", s.carrier_hz},
                    {"modulation_hz", s.modulation_hz}};
          },
          [](const FrequencyModulated& s) -> json {
            return {{"deviation_hz", s.deviation_hz}, {"carrier_hz", s.carrier_hz},
                    {"modulation_hz", s.modulation_hz}};
          },
          [](const AmFmCoupled& s) -> json {
            return {{"modulation_index", s.modulation_index}, {"deviation_hz", s.deviation_hz},
                    {"carrier_hz", s.carrier_hz}, {"modulation_hz", s.modulation_hz}};
          },
          [](const SimpleHarmonic& s) -> json {
            return {{"amplitude", s.amplitude}, {"base_hz", s.base_hz}, {"phase", s.phase}};
          },
          [](const MultipleHarmonic& s) -> json {
            return {{"base_hz", s.base_hz}, {"harmonics", terms_to_json(s.harmonics)}};
          },
          [](const RandomHarmonic& s) -> json { return {{"components", components_to_json(s)}}; },
          [](const CombinedHarmonic& s) -> json {
            return {{"base_hz", s.multiple.base_hz},
                    {"harmonics", terms_to_json(s.multiple.harmonics)},
                    {"components", components_to_json(s.random)}};
          },
          [](const SingleTransient& s) -> json { return transient_to_json(s); },
          [](const MultipleTransient& s) -> json {
            json arr = json::array();
            for (const auto& c : s.components) arr.push_back(transient_to_json(c));
            return {{"components", arr}};
          },
          [](const SinglePeriodic& s) -> json {
            return {{"amplitude", s.amplitude}, {"decay", s.decay}, {"interval_s", s.interval_s},
                    {"base_hz", s.base_hz}, {"phase", s.phase}};
          },
          [](const MultiplePeriodic& s) -> json {
            return {{"decay", s.decay}, {"interval_s", s.interval_s}, {"base_hz", s.base_hz},
                    {"impulses", terms_to_json(s.impulses)}};
          },
      },
      spec);
  body["family"] = std::string(code(category_of(spec)));
  return body;
}

inline SignalSpec spec_from_json(const json& j) {
  using namespace detail;
  const auto family = category_from_code(j.at("family").get<std::string>());
  if (!family || *family == Category::THU) throw InvalidSpec("unknown synthetic family in spec JSON");
  switch (*family) {
    case Category::AM:
      return AmplitudeModulated{j.at("modulation_index").get<double>(), j.at("carrier_hz").get<double>(),
                                j.at("modulation_hz").get<double>()};
    case Category::FM:
      return FrequencyModulated{j.at("deviation_hz").get<double>(), j.at("carrier_hz").get<double>(),
                                j.at("modulation_hz").get<double>()};
    case Category::AMFM:
      return AmFmCoupled{j.at("modulation_index").get<double>(), j.at("deviation_hz").get<double>(),
                         j.at("carrier_hz").get<double>(), j.at("modulation_hz").get<double>()};
    case Category::SH:
      return SimpleHarmonic{j.at("amplitude").get<double>(), j.at("base_hz").get<double>(),
                            j.at("phase").get<double>()};
    case Category::MH:
      return MultipleHarmonic{j.at("base_hz").get<double>(), terms_from_json(j.at("harmonics"))};
    case Category::RH:
      return components_from_json(j.at("components"));
    case Category::CH:
      return CombinedHarmonic{
          MultipleHarmonic{j.at("base_hz").get<double>(), terms_from_json(j.at("harmonics"))},
          components_from_json(j.at("components"))};
    case Category::ST:
      return transient_from_json(j);
    case Category::MT: {
      MultipleTransient mt;
      for (const auto& c : j.at("components")) mt.components.push_back(transient_from_json(c));
      return mt;
    }
    case Category::SP:
      return SinglePeriodic{j.at("amplitude").get<double>(), j.at("decay").get<double>(),
                            j.at("interval_s").get<double>(), j.at("base_hz").get<double>(),
                            j.at("phase").get<double>()};
    case Category::MP:
      return MultiplePeriodic{j.at("decay").get<double>(), j.at("interval_s").get<double>(),
                              j.at("base_hz").get<double>(), terms_from_json(j.at("impulses"))};
    case Category::THU:
      break;
  }
  throw InvalidSpec("unreachable family");
}

}  // namespace vsqa::waveforms
