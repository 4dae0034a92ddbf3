#include "hft/synthetic.hpp"

#include <algorithm>
#include <array>
#include <cstdio>

#include "hft/error.hpp"
#include "hft/rng.hpp"

namespace hft {

std::string_view to_string(SyntheticKind kind) noexcept {
  switch (kind) {
    case SyntheticKind::Separable: return "separable";
    case SyntheticKind::Noisy: return "noisy";
    case SyntheticKind::Complementary: return "complementary";
  }
  return "separable";
}

SyntheticKind parse_synthetic_kind(std::string_view text) {
  if (text == "separable") return SyntheticKind::Separable;
  if (text == "noisy") return SyntheticKind::Noisy;
  if (text == "complementary") return SyntheticKind::Complementary;
  throw Error(ErrorCode::InvalidConfig, "unknown synthetic corpus '" + std::string(text) + "'");
}

namespace {

constexpr std::array<std::string_view, 10> kRealKeywords = {
    "confirmed", "official",   "announced",   "reported", "study",
    "researchers", "guidelines", "vaccination", "testing",  "hospital"};
constexpr std::array<std::string_view, 10> kFakeKeywords = {
    "miracle", "hoax",   "secret", "cure",    "conspiracy",
    "rumor",   "banned", "exposed", "shocking", "fake"};

// Neutral words; none is a keyword or a stop word.
constexpr std::array<std::string_view, 40> kFiller = {
    "people",  "city",    "week",     "update",   "numbers", "state",    "cases",   "new",
    "daily",   "district", "total",   "many",     "today",   "workers",  "market",  "school",
    "family",  "travel",  "local",    "region",   "centre",  "morning",  "evening", "friday",
    "monday",  "summer",  "winter",   "street",   "village", "council",  "river",   "bridge",
    "station", "library", "festival", "weather",  "county",  "harbour",  "valley",  "office"};

constexpr std::array<std::string_view, 6> kDomain = {"COVID-19", "covid19", "coronavirus",
                                                     "pandemic", "#IndiaFightsCorona", "lockdown"};

constexpr std::array<std::string_view, 12> kStopFillers = {"the", "a", "of", "in", "and", "to",
                                                           "is", "for", "on", "with", "this", "that"};

// Distractor families for the noisy corpus.
constexpr std::array<std::string_view, 5> kRealDistractors = {"thursday", "ward", "bulletin", "desk",
                                                              "panel"};
constexpr std::array<std::string_view, 5> kFakeDistractors = {"forward", "viral", "share", "uncle",
                                                              "group"};

constexpr std::array<std::string_view, 10> kAlphaFiller = {
    "alpha", "bravo", "delta", "echo", "foxtrot", "golf", "hotel", "india", "kilo", "lima"};

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& words, Rng& rng) {
  return words[rng.uniform_index(N)];
}

// 4-digit keyword from a digit family. Real keywords use the lower half of
// the family's digits, fake keywords the upper half.
std::string digit_keyword(KeywordFamily family, int label, Rng& rng) {
  const char base = family == KeywordFamily::A ? '0' : '5';
  // Real: two lowest digits; fake: two highest. The middle digit never appears.
  const char lo = static_cast<char>(label == kReal ? base : base + 3);
  std::string word;
  for (int i = 0; i < 4; ++i) word.push_back(static_cast<char>(lo + static_cast<char>(rng.uniform_index(2))));
  return word;
}

std::string capitalize(std::string_view w) {
  std::string out(w);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

std::string render(std::vector<std::string> words, Rng& rng) {
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) text.push_back(' ');
    std::string w = words[i];
    if (i == 0 || rng.uniform() < 0.1) w = capitalize(w);
    text += w;
    if (rng.uniform() < 0.08) text.push_back(',');
  }
  const double r = rng.uniform();
  text += r < 0.5 ? "." : r < 0.75 ? "!" : "?";
  if (rng.uniform() < 0.15) text += " https://t.co/x" + std::to_string(rng.uniform_index(100000));
  return text;
}

std::string post(SyntheticKind kind, int label, Rng& rng) {
  std::vector<std::string> words;
  const std::size_t n_filler = 4 + rng.uniform_index(6);
  if (kind == SyntheticKind::Complementary) {
    for (std::size_t i = 0; i < n_filler; ++i) words.emplace_back(pick(kAlphaFiller, rng));
    const KeywordFamily family = rng.uniform() < 0.5 ? KeywordFamily::A : KeywordFamily::B;
    const std::size_t n_kw = 1 + rng.uniform_index(2);
    for (std::size_t i = 0; i < n_kw; ++i) words.push_back(digit_keyword(family, label, rng));
  } else {
    for (std::size_t i = 0; i < n_filler; ++i) words.emplace_back(pick(kFiller, rng));
    for (std::size_t i = 0, n = rng.uniform_index(3); i < n; ++i) words.emplace_back(pick(kStopFillers, rng));
    if (rng.uniform() < 0.6) words.emplace_back(pick(kDomain, rng));
    const std::size_t n_kw = 1 + rng.uniform_index(3);
    for (std::size_t i = 0; i < n_kw; ++i)
      words.emplace_back(label == kReal ? pick(kRealKeywords, rng) : pick(kFakeKeywords, rng));
    if (kind == SyntheticKind::Noisy) {
      const bool own = label == kReal;
      if (rng.uniform() < 0.1) {
        words.emplace_back(own ? pick(kFakeDistractors, rng) : pick(kRealDistractors, rng));
      } else if (rng.uniform() < 0.35) {
        words.emplace_back(own ? pick(kRealDistractors, rng) : pick(kFakeDistractors, rng));
      }
    }
  }
  // Fisher-Yates so keywords land anywhere in the post.
  for (std::size_t i = words.size(); i > 1; --i) std::swap(words[i - 1], words[rng.uniform_index(i)]);
  return render(std::move(words), rng);
}

}  // namespace

SyntheticCorpus make_synthetic(SyntheticKind kind, const SyntheticOptions& options) {
  SyntheticCorpus corpus;
  Rng rng(mix_seed(options.seed, static_cast<std::uint64_t>(kind) + 1));
  const std::string prefix(to_string(kind));
  auto fill = [&](std::vector<NewsExample>& out, std::size_t n, Split split) {
    for (std::size_t i = 0; i < n; ++i) {
      NewsExample ex;
      ex.label = i % 2 == 0 ? kReal : kFake;
      ex.split = split;
      char id[32];
      std::snprintf(id, sizeof id, "-%s-%04zu", std::string(to_string(split)).substr(0, 3).c_str(), i);
      ex.id = prefix + id;
      ex.raw_text = post(kind, ex.label, rng);
      out.push_back(std::move(ex));
    }
  };
  fill(corpus.train, options.train, Split::Train);
  fill(corpus.validation, options.validation, Split::Validation);
  fill(corpus.test, options.test, Split::Test);
  return corpus;
}

bool is_family_keyword(std::string_view word, KeywordFamily family) {
  if (word.size() != 4) return false;
  const char lo = family == KeywordFamily::A ? '0' : '5';
  return std::all_of(word.begin(), word.end(), [lo](char c) { return c >= lo && c <= lo + 4; });
}

int keyword_rule_label(std::string_view cleaned_text) {
  std::size_t real = 0, fake = 0;
  for (const auto& w : split_words(cleaned_text)) {
    if (std::find(kRealKeywords.begin(), kRealKeywords.end(), w) != kRealKeywords.end()) ++real;
    if (std::find(kFakeKeywords.begin(), kFakeKeywords.end(), w) != kFakeKeywords.end()) ++fake;
    for (KeywordFamily f : {KeywordFamily::A, KeywordFamily::B}) {
      if (!is_family_keyword(w, f)) continue;
      const char lo = f == KeywordFamily::A ? '0' : '5';
      const bool is_real = std::all_of(w.begin(), w.end(), [lo](char c) { return c <= lo + 1; });
      ++(is_real ? real : fake);
    }
  }
  if (real == 0 && fake == 0) return kNoLabel;
  return real > fake ? kReal : kFake;
}

std::vector<std::string> family_view(std::span<const NewsExample> examples, KeywordFamily drop,
                                     const StopWords& stopwords) {
  std::vector<std::string> out;
  for (const auto& cleaned : clean_dataset(examples, stopwords)) {
    std::string text;
    for (const auto& w : split_words(cleaned.tokens_text)) {
      if (is_family_keyword(w, drop)) continue;
      if (!text.empty()) text.push_back(' ');
      text += w;
    }
    if (!text.empty()) out.push_back(std::move(text));
  }
  return out;
}

}  // namespace hft
