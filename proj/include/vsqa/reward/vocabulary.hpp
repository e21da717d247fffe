#pragma once

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vsqa/reward/text_norm.hpp"

namespace vsqa::reward {

struct Synonym {
  std::string text;
  double weight = 1.0;
};

class VocabularyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Label -> weighted acceptable answers. Keys are stored normalized; each list keeps its
/// table order (duplicates included) because ties resolve to the earlier entry.
class SynonymVocabulary {
 public:
  SynonymVocabulary() = default;

  void add_label(std::string_view label, std::vector<Synonym> synonyms) {
    if (synonyms.empty()) throw VocabularyError("synonym list for '" + std::string(label) + "' is empty");
    for (const auto& s : synonyms) {
      if (!(s.weight > 0.0 && s.weight <= 1.0)) {
        throw VocabularyError("weight of '" + s.text + "' must be in (0, 1]");
      }
    }
    const std::string key = normalize_label(label);
    if (entries_.contains(key)) throw VocabularyError("duplicate label '" + std::string(label) + "'");
    order_.emplace_back(label);
    entries_.emplace(key, std::move(synonyms));
  }

  /// nullptr when the label is not in the vocabulary.
  const std::vector<Synonym>* find(std::string_view label) const {
    const auto it = entries_.find(normalize_label(label));
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string>& labels() const { return order_; }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& label : order_) {
      auto list = nlohmann::ordered_json::array();
      for (const auto& s : *find(label)) list.push_back({{"synonym", s.text}, {"weight", s.weight}});
      j[label] = list;
    }
    return j;
  }

  template <class Json>
  static SynonymVocabulary from_json(const Json& j) {
    if (!j.is_object()) throw VocabularyError("vocabulary must be a JSON object");
    SynonymVocabulary v;
    try {
      for (const auto& [label, list] : j.items()) {
        std::vector<Synonym> synonyms;
        for (const auto& e : list) synonyms.push_back({e.at("synonym").template get<std::string>(), e.at("weight").template get<double>()});
        v.add_label(label, std::move(synonyms));
      }
    } catch (const nlohmann::json::exception& e) {
      throw VocabularyError(std::string("malformed vocabulary: ") + e.what());
    }
    return v;
  }

  static SynonymVocabulary load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw VocabularyError("cannot open vocabulary " + path.string());
    try {
      // ordered_json keeps the file's label order for round trips.
      return from_json(nlohmann::ordered_json::parse(in));
    } catch (const nlohmann::json::parse_error& e) {
      throw VocabularyError("malformed vocabulary " + path.string() + ": " + e.what());
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw VocabularyError("cannot write vocabulary " + path.string());
    out << to_json().dump(2) << '\n';
  }

  /// The shipped vocabulary: signal-type labels and their weighted synonyms.
  static const SynonymVocabulary& builtin();

 private:
  std::map<std::string, std::vector<Synonym>> entries_;
  std::vector<std::string> order_;
};

namespace detail {

struct BuiltinRow {
  const char* label;
  std::vector<Synonym> synonyms;
};

inline std::vector<BuiltinRow> builtin_rows() {
  // Each row lists the left then right synonym of a table line.
  return {
      {"Simple Harmonic Signal",
       {{"Simple Harmonic Signal", 1.0}, {"Simple Harmonic", 1.0},
        {"Single Harmonic Signal", 1.0}, {"Single Harmonic Signal", 1.0},
        {"Simple Harmonic Wave", 0.9}, {"Single Harmonic Wave", 0.9},
        {"Sinusoidal Signal", 0.8}, {"Sinusoidal Wave", 0.8},
        {"Cosine Wave", 0.5}, {"Cosinusoidal Signal", 0.5}}},
      {"Random Harmonic Signal",
       {{"Random Harmonic Signal", 1.0}, {"Random Harmonic", 1.0},
        {"Random Harmonic Wave", 0.9}, {"Stochastic Harmonic Wave", 0.9},
        {"Stochastic Harmonic Signal", 0.8}, {"Stochastic Harmonic", 0.8},
        {"Random Sinusoidal Signal", 0.5}, {"Stochastic Sinusoidal Signal", 0.4},
        {"Random Sinusoidal Wave", 0.3}, {"Stochastic Sinusoidal Wave", 0.3}}},
      {"Frequency Modulated Signal",
       {{"Frequency Modulated Signal", 1.0}, {"FM Signal", 1.0},
        {"Frequency Modulation Signal", 0.8}, {"Signal with Variable Instantaneous Frequency", 0.8},
        {"Signal with Frequency Variation", 0.8}, {"Signal with Frequency Modulation", 0.8},
        {"Angle-Modulated Signal", 0.7}, {"Angle Modulated Signal", 0.7},
        {"Constant Envelope Signal", 0.4}, {"Constant Amplitude Signal", 0.4}}},
      {"FM-AM Coupled Signal",
       {{"FM-AM Coupled Signal", 1.0}, {"AM-FM Coupled Signal", 1.0},
        {"Coupled FM-AM Signal", 1.0}, {"Coupled AM-FM Signal", 1.0},
        {"Hybrid FM-AM Signal", 0.9}, {"Hybrid AM-FM Signal", 0.9},
        {"Combined FM-AM Signal", 0.8}, {"Combined AM-FM Signal", 0.8},
        {"Signal with Simultaneous Amplitude and Frequency Modulation", 0.7}, {"Complex Modulated Signal", 0.5}}},
      {"Multiple Periodic Impulse Harmonic Signal",
       {{"Multiple Periodic Impulse Harmonic Signal", 1.0}, {"Multiple Periodic Impulse Harmonic", 1.0},
        {"Multiple Periodic Impulse Harmonic Wave", 0.9}, {"Multiple Periodic Impulse Harmonic Wave", 0.9},
        {"Multiple Periodic Impulse Harmonic Oscillation", 0.8}, {"Multiple Periodic Impulse Harmonic Oscillation", 0.8},
        {"Multiple Periodic Impulse Harmonic Response", 0.7}, {"Multiple Periodic Impulse Harmonic Response", 0.7},
        {"Multiple Periodic Impulse Harmonic Signal with Damping", 0.5},
        {"Multiple Periodic Impulse Harmonic Signal with Decay", 0.5}}},
      {"Multiple Transient Impulse Harmonic Signal",
       {{"Multiple Transient Impulse Harmonic Signal", 1.0}, {"Multiple Transient Impulse Harmonic", 1.0},
        {"Multiple Transient Impulse Harmonic Wave", 0.9}, {"Multiple Transient Impulse Harmonic Wave", 0.9},
        {"Multiple Transient Impulse Harmonic Oscillation", 0.8}, {"Multiple Transient Impulse Harmonic Oscillation", 0.8},
        {"Multiple Transient Impulse Harmonic Response", 0.7}, {"Multiple Transient Impulse Harmonic Response", 0.7},
        {"Multiple Transient Impulse Harmonic Signal with Damping", 0.5},
        {"Multiple Transient Impulse Harmonic Signal with Decay", 0.5}}},
      {"Multiple Harmonic Signal",
       {{"Multiple Harmonic Signal", 1.0}, {"Multiple Harmonic", 1.0},
        {"Multi-Harmonic Signal", 1.0}, {"Multi-Harmonic", 1.0},
        {"Multiple Harmonic Wave", 0.9}, {"Multi-Harmonic Wave", 0.9},
        {"Complex Periodic Signal", 0.3}, {"Complex Periodic Wave", 0.3},
        {"Composite Wave", 0.3}, {"Composite Signal", 0.3}}},
      {"Combined Harmonic Signal",
       {{"Combined Harmonic Signal", 1.0}, {"Combined Harmonic", 1.0},
        {"Hybrid Harmonic Signal", 1.0}, {"Hybrid Harmonic", 1.0},
        {"Harmonic Signal with Randomness", 0.7}, {"Harmonic Signal with Stochasticity", 0.7},
        {"Harmonic Signal with Noise", 0.3}, {"Harmonic Signal with Variability", 0.3},
        {"Harmonic Signal with Random Components", 0.3}, {"Harmonic Signal with Randomness", 0.3}}},
      {"Amplitude Modulated Signal",
       {{"Amplitude Modulated Signal", 1.0}, {"AM Signal", 1.0},
        {"Amplitude Modulation Signal", 1.0}, {"Signal with Variable Amplitude", 0.8},
        {"Signal with Amplitude Variation", 0.8}, {"Signal with Amplitude Modulation", 0.8},
        {"Envelope Modulated Signal", 0.6}, {"Envelope Modulation Signal", 0.6},
        {"Constant Frequency Signal", 0.4}, {"Constant Frequency Modulation Signal", 0.4}}},
      {"Single Periodic Impulse Harmonic Signal",
       {{"Single Periodic Impulse Harmonic Signal", 1.0}, {"Single Periodic Impulse Harmonic", 1.0},
        {"Single Periodic Impulse Harmonic Wave", 0.9}, {"Single Periodic Impulse Harmonic Wave", 0.9},
        {"Single Periodic Impulse Harmonic Oscillation", 0.8}, {"Single Periodic Impulse Harmonic Oscillation", 0.8},
        {"Single Periodic Impulse Harmonic Response", 0.7}, {"Single Periodic Impulse Harmonic Response", 0.7},
        {"Single Periodic Impulse Harmonic Signal with Damping", 0.5},
        {"Single Periodic Impulse Harmonic Signal with Decay", 0.5}}},
      {"Single Transient Impulse Harmonic Signal",
       {{"Single Transient Impulse Harmonic Signal", 1.0}, {"Single Transient Impulse Harmonic", 1.0},
        {"Single Transient Impulse Harmonic Wave", 0.9}, {"Single Transient Impulse Harmonic Wave", 0.9},
        {"Single Transient Impulse Harmonic Oscillation", 0.8}, {"Single Transient Impulse Harmonic Oscillation", 0.8},
        {"Single Transient Impulse Harmonic Response", 0.7}, {"Single Transient Impulse Harmonic Response", 0.7},
        {"Single Transient Impulse Harmonic Signal with Damping", 0.5},
        {"Single Transient Impulse Harmonic Signal with Decay", 0.5}}},
      {"THU Signal",
       {{"THU Signal", 1.0}, {"THU bearing signal", 1.0},
        {"THU data", 1.0}, {"THU bearing data", 1.0},
        {"THU health bearing", 1.0}, {"THU inner fault", 1.0},
        {"THU outer fault", 1.0}, {"THU roller fault", 1.0},
        {"THU bearing health", 1.0}, {"THU bearing inner fault", 1.0},
        {"THU bearing outer fault", 1.0}, {"THU bearing roller fault", 1.0}}},
  };
}

}  // namespace detail

inline const SynonymVocabulary& SynonymVocabulary::builtin() {
  static const SynonymVocabulary vocab = [] {
    SynonymVocabulary v;
    for (auto& row : detail::builtin_rows()) v.add_label(row.label, std::move(row.synonyms));
    return v;
  }();
  return vocab;
}

}  // namespace vsqa::reward
