#include <array>
#include <fstream>
#include <string>

#include "hft/error.hpp"
#include "hft/textprep.hpp"

namespace hft {

namespace {

// Mirrored verbatim in data/stopwords_en.txt.
constexpr std::array<std::string_view, 151> kStopWords = {
    "a",        "about",     "above",   "after",   "again",      "against",  "all",
    "also",     "am",        "an",      "and",     "any",        "are",      "as",
    "at",       "be",        "because", "been",    "before",     "being",    "below",
    "between",  "both",      "but",     "by",      "can",        "could",    "d",
    "did",      "do",        "does",    "doing",   "down",       "during",   "each",
    "even",     "ever",      "every",   "few",     "for",        "from",     "further",
    "get",      "got",       "had",     "has",     "have",       "having",   "he",
    "her",      "here",      "hers",    "herself", "him",        "himself",  "his",
    "how",      "however",   "i",       "if",      "in",         "into",     "is",
    "it",       "its",       "itself",  "just",    "let",        "ll",       "m",
    "may",      "me",        "might",   "more",    "most",       "must",     "my",
    "myself",   "no",        "nor",     "not",     "now",        "o",        "of",
    "off",      "on",        "once",    "only",    "or",         "other",    "our",
    "ours",     "ourselves", "out",     "over",    "own",        "re",       "s",
    "same",     "see",       "shall",   "she",     "should",     "so",       "some",
    "such",     "t",         "than",    "that",    "the",        "their",    "theirs",
    "them",     "themselves", "then",   "there",   "these",      "they",     "this",
    "those",    "through",   "to",      "too",     "under",      "until",    "up",
    "us",       "ve",        "very",    "via",     "was",        "we",       "were",
    "what",     "when",      "where",   "which",   "while",      "who",      "whom",
    "why",      "will",      "with",    "would",   "y",          "yet",      "you",
    "your",     "yours",     "yourself", "yourselves",
};

}  // namespace

std::span<const std::string_view> default_stopword_list() { return kStopWords; }

const StopWords& default_stopwords() {
  static const StopWords words = [] {
    StopWords w;
    for (std::string_view s : kStopWords) w.emplace(s);
    return w;
  }();
  return words;
}

StopWords load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open stop-word list " + path.string());
  StopWords words;
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    words.insert(line);
  }
  return words;
}

}  // namespace hft
