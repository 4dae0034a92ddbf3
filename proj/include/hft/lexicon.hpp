#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hft {

/// Symmetric word → synonyms table used by augmentation.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  /// Each pair is entered in both directions; duplicates are dropped.
  explicit SynonymLexicon(std::span<const std::pair<std::string, std::string>> pairs);

  [[nodiscard]] bool contains(std::string_view word) const;
  /// Sorted synonyms; empty when the word is unknown.
  [[nodiscard]] std::span<const std::string> synonyms(std::string_view word) const;
  [[nodiscard]] std::size_t word_count() const noexcept { return table_.size(); }
  [[nodiscard]] std::size_t pair_count() const noexcept { return pair_count_; }

  friend bool operator==(const SynonymLexicon&, const SynonymLexicon&) = default;

 private:
  std::map<std::string, std::vector<std::string>, std::less<>> table_;
  std::size_t pair_count_ = 0;
};

/// The embedded English list (also shipped as data/synonyms_en.tsv).
std::span<const std::pair<std::string, std::string>> default_synonym_pairs();
const SynonymLexicon& default_lexicon();

/// `word<TAB>synonym` per line; blank lines and '#' lines ignored.
/// Throws MalformedRow with the 1-based line for lines without a tab.
SynonymLexicon parse_lexicon(std::istream& in);
SynonymLexicon load_lexicon(const std::filesystem::path& path);

}  // namespace hft
