#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace vsqa::metrics {

using TokenSet = std::set<std::string>;

// NLTK English stopword list (179 entries).
inline constexpr std::array<std::string_view, 179> kEnglishStopwords{
    "i",          "me",        "my",       "myself",   "we",        "our",      "ours",     "ourselves",
    "you",        "you're",    "you've",   "you'll",   "you'd",     "your",     "yours",    "yourself",
    "yourselves", "he",        "him",      "his",      "himself",   "she",      "she's",    "her",
    "hers",       "herself",   "it",       "it's",     "its",       "itself",   "they",     "them",
    "their",      "theirs",    "themselves", "what",   "which",     "who",      "whom",     "this",
    "that",       "that'll",   "these",    "those",    "am",        "is",       "are",      "was",
    "were",       "be",        "been",     "being",    "have",      "has",      "had",      "having",
    "do",         "does",      "did",      "doing",    "a",         "an",       "the",      "and",
    "but",        "if",        "or",       "because",  "as",        "until",    "while",    "of",
    "at",         "by",        "for",      "with",     "about",     "against",  "between",  "into",
    "through",    "during",    "before",   "after",    "above",     "below",    "to",       "from",
    "up",         "down",      "in",       "out",      "on",        "off",      "over",     "under",
    "again",      "further",   "then",     "once",     "here",      "there",    "when",     "where",
    "why",        "how",       "all",      "any",      "both",      "each",     "few",      "more",
    "most",       "other",     "some",     "such",     "no",        "nor",      "not",      "only",
    "own",        "same",      "so",       "than",     "too",       "very",     "s",        "t",
    "can",        "will",      "just",     "don",      "don't",     "should",   "should've", "now",
    "d",          "ll",        "m",        "o",        "re",        "ve",       "y",        "ain",
    "aren",       "aren't",    "couldn",   "couldn't", "didn",      "didn't",   "doesn",    "doesn't",
    "hadn",       "hadn't",    "hasn",     "hasn't",   "haven",     "haven't",  "isn",      "isn't",
    "ma",         "mightn",    "mightn't", "mustn",    "mustn't",   "needn",    "needn't",  "shan",
    "shan't",     "shouldn",   "shouldn't", "wasn",    "wasn't",    "weren",    "weren't",  "won",
    "won't",      "wouldn",    "wouldn't"};

inline bool is_stopword(std::string_view token) {
  static const std::unordered_set<std::string_view> set(kEnglishStopwords.begin(), kEnglishStopwords.end());
  return set.contains(token);
}

namespace detail {

inline bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

inline bool is_alpha_token(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; });
}

inline bool is_numeric_token(std::string_view s) {
  std::size_t i = (!s.empty() && s[0] == '-') ? 1 : 0;
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  bool dot = false;
  for (; i < s.size(); ++i) {
    if (s[i] == '.') {
      if (dot || i + 1 >= s.size()) return false;
      dot = true;
    } else if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

/// Suffix-rule lemmatizer for plural nouns and third-person verbs, with an exceptions table.
inline std::string lemmatize(std::string_view token) {
  static const std::unordered_map<std::string_view, std::string_view> exceptions{
      {"analyses", "analysis"}, {"axes", "axis"},         {"indices", "index"},       {"matrices", "matrix"},
      {"vertices", "vertex"},   {"spectra", "spectrum"},  {"phenomena", "phenomenon"}, {"criteria", "criterion"},
      {"series", "series"},     {"species", "species"},   {"bias", "bias"},          {"alias", "alias"},
      {"always", "always"},     {"perhaps", "perhaps"},   {"whereas", "whereas"},    {"sometimes", "sometimes"},
      {"besides", "besides"},   {"children", "child"},    {"feet", "foot"},          {"teeth", "tooth"},
      {"lens", "lens"},         {"gas", "gas"},           {"physics", "physics"},    {"mathematics", "mathematics"},
      {"dynamics", "dynamics"}, {"kinematics", "kinematics"}, {"acoustics", "acoustics"},
  };
  if (const auto it = exceptions.find(token); it != exceptions.end()) return std::string(it->second);
  std::string s(token);
  if (s.size() <= 3 || !detail::is_alpha_token(s)) return s;
  using detail::ends_with;
  if (ends_with(s, "ies") && s.size() > 4) return s.substr(0, s.size() - 3) + "y";
  if (ends_with(s, "sses") || ends_with(s, "ches") || ends_with(s, "shes") || ends_with(s, "xes") ||
      ends_with(s, "zzes")) {
    return s.substr(0, s.size() - 2);
  }
  if (ends_with(s, "ss") || ends_with(s, "us") || ends_with(s, "is")) return s;
  if (ends_with(s, "s")) return s.substr(0, s.size() - 1);
  return s;
}

/// "50.0" -> "50", "0.50" -> "0.5", "-0" -> "0". Non-numeric input is returned unchanged.
inline std::string canonical_number(std::string_view token) {
  if (!detail::is_numeric_token(token)) return std::string(token);
  const bool negative = token[0] == '-';
  std::string_view body = negative ? token.substr(1) : token;
  std::string_view whole = body, frac;
  if (const auto dot = body.find('.'); dot != std::string_view::npos) {
    whole = body.substr(0, dot);
    frac = body.substr(dot + 1);
  }
  while (whole.size() > 1 && whole[0] == '0') whole.remove_prefix(1);
  while (!frac.empty() && frac.back() == '0') frac.remove_suffix(1);
  std::string out(whole);
  if (!frac.empty()) out += "." + std::string(frac);
  if (negative && out != "0") out = "-" + out;
  return out;
}

inline std::string canonical_unit(std::string_view token) {
  static const std::unordered_map<std::string_view, std::string_view> units{
      {"hertz", "hz"}, {"sec", "second"}, {"secs", "second"}, {"rad", "radian"},
      {"rads", "radian"}, {"v", "volt"},   {"s", "second"},   {"khz", "khz"},     {"ms", "millisecond"},
  };
  if (const auto it = units.find(token); it != units.end()) return std::string(it->second);
  return std::string(token);
}

namespace detail {

// "50hz" -> {"50", "hz"} when the tail is a known unit.
inline std::vector<std::string> split_number_unit(const std::string& token) {
  static const std::unordered_set<std::string_view> unit_tails{"hz", "khz", "s", "ms", "v", "mv", "rad", "sec"};
  std::size_t cut = token.size();
  while (cut > 0 && std::isalpha(static_cast<unsigned char>(token[cut - 1]))) --cut;
  if (cut == 0 || cut == token.size()) return {token};
  const std::string head = token.substr(0, cut);
  const std::string tail = token.substr(cut);
  if (!is_numeric_token(head) || !unit_tails.contains(tail)) return {token};
  return {head, tail};
}

}  // namespace detail

/// Lowercase, punctuation to spaces, whitespace split. Keeps '.' between digits
/// and a '-' directly before a digit so signed decimals survive.
inline std::vector<std::string> split_words(std::string_view text, bool keep_numeric_punct = true) {
  std::string clean;
  clean.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto u = static_cast<unsigned char>(text[i]);
    const char c = static_cast<char>(std::tolower(u));
    const bool word = std::isalnum(u) || c == '_' || u >= 0x80;
    if (word || std::isspace(u)) {
      clean.push_back(std::isspace(u) ? ' ' : c);
      continue;
    }
    if (keep_numeric_punct) {
      const bool digit_before = i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1]));
      const bool digit_after = i + 1 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 1]));
      const bool boundary_before = i == 0 || !std::isalnum(static_cast<unsigned char>(text[i - 1]));
      if ((c == '.' && digit_before && digit_after) || (c == '-' && digit_after && boundary_before)) {
        clean.push_back(c);
        continue;
      }
    }
    clean.push_back(' ');
  }
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < clean.size()) {
    while (i < clean.size() && clean[i] == ' ') ++i;
    std::size_t j = i;
    while (j < clean.size() && clean[j] != ' ') ++j;
    if (j > i) tokens.emplace_back(clean.substr(i, j - i));
    i = j;
  }
  return tokens;
}

/// Word tokens for BLEU / ROUGE / CIDEr: lowercase, every punctuation mark becomes a space.
inline std::vector<std::string> surface_tokens(std::string_view text) { return split_words(text, false); }

/// Unique content tokens used by word recall.
inline TokenSet normalize_tokens(std::string_view text) {
  TokenSet out;
  for (const auto& raw : split_words(text)) {
    if (is_stopword(raw)) continue;
    for (const auto& piece : detail::split_number_unit(lemmatize(raw))) {
      const std::string tok = canonical_unit(canonical_number(piece));
      if (!tok.empty() && !is_stopword(tok)) out.insert(tok);
    }
  }
  return out;
}

/// Percentage of reference tokens present in the prediction; 100 for an empty reference.
inline double word_recall(const TokenSet& reference, const TokenSet& predicted) {
  if (reference.empty()) return 100.0;
  std::size_t hit = 0;
  for (const auto& t : reference) hit += predicted.contains(t) ? 1 : 0;
  return 100.0 * static_cast<double>(hit) / static_cast<double>(reference.size());
}

inline double word_recall(std::string_view reference, std::string_view predicted) {
  return word_recall(normalize_tokens(reference), normalize_tokens(predicted));
}

}  // namespace vsqa::metrics
