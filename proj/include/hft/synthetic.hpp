#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hft/textprep.hpp"

namespace hft {

enum class SyntheticKind { Separable, Noisy, Complementary };

std::string_view to_string(SyntheticKind kind) noexcept;
SyntheticKind parse_synthetic_kind(std::string_view text);

struct SyntheticOptions {
  std::size_t train = 200;
  std::size_t validation = 50;
  std::size_t test = 50;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  std::vector<NewsExample> train, validation, test;
};

/// Raw-looking posts (mixed case, punctuation, stop words, occasional links
/// and domain hashtags). Labels alternate so every split is balanced.
///
/// Separable: every post carries 1-3 keywords of its own class and none of
/// the other, so the keyword rule labels it perfectly.
///
/// Noisy: like Separable, plus distractor words. Each class has its own
/// distractor family that co-occurs with the class in about a third of the
/// posts; 10% of posts instead carry a distractor of the opposite class.
///
/// Complementary: keywords come from two families of 4-digit strings,
/// A (digits 0-4) and B (digits 5-9). Half the posts carry only A keywords,
/// half only B. Filler is alphabetic, so a vocabulary built without one
/// family's digits cannot read that family at all.
SyntheticCorpus make_synthetic(SyntheticKind kind, const SyntheticOptions& options = {});

/// The keyword rule: label of the class whose keywords the cleaned text
/// contains (ties → fake, no keyword → nullopt encoded as kNoLabel).
int keyword_rule_label(std::string_view cleaned_text);

enum class KeywordFamily { A, B };

bool is_family_keyword(std::string_view word, KeywordFamily family);

/// Cleaned training text with every keyword of `drop` removed; used to
/// build a vocabulary that cannot represent that family.
std::vector<std::string> family_view(std::span<const NewsExample> examples, KeywordFamily drop,
                                     const StopWords& stopwords);

}  // namespace hft
