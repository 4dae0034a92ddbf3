#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hft/tensor.hpp"

namespace hft {

using TokenId = std::int32_t;

/// Subword token table. IDs are contiguous: the three specials, then the base
/// tokens, then domain tokens appended by extend_vocab().
class Vocabulary {
 public:
  static constexpr TokenId kPad = 0;
  static constexpr TokenId kUnk = 1;
  static constexpr TokenId kCls = 2;
  static constexpr std::string_view kPadToken = "[PAD]";
  static constexpr std::string_view kUnkToken = "[UNK]";
  static constexpr std::string_view kClsToken = "[CLS]";
  static constexpr std::string_view kAddedMarker = "#ADDED";

  /// Specials only.
  Vocabulary();

  /// `base` excludes the specials. Throws InvalidConfig on duplicates.
  Vocabulary(std::span<const std::string> base, std::span<const std::string> added = {});

  [[nodiscard]] std::size_t size() const noexcept { return id_to_token_.size(); }
  /// Specials plus base tokens; added tokens start at this ID.
  [[nodiscard]] std::size_t base_size() const noexcept { return base_size_; }
  [[nodiscard]] std::size_t added_count() const noexcept { return size() - base_size_; }
  [[nodiscard]] std::size_t max_token_length() const noexcept { return max_token_length_; }

  [[nodiscard]] std::optional<TokenId> find(std::string_view token) const;
  [[nodiscard]] bool contains(std::string_view token) const { return find(token).has_value(); }
  [[nodiscard]] const std::string& token(TokenId id) const;
  [[nodiscard]] std::span<const std::string> tokens() const noexcept { return id_to_token_; }
  [[nodiscard]] std::span<const std::string> added_tokens() const noexcept {
    return std::span(id_to_token_).subspan(base_size_);
  }
  [[nodiscard]] bool is_added(TokenId id) const noexcept {
    return id >= 0 && static_cast<std::size_t>(id) >= base_size_ &&
           static_cast<std::size_t>(id) < size();
  }

  /// One token per line; line index = ID, except that the `#ADDED` marker
  /// line separating base from added tokens does not take an ID.
  void write(std::ostream& out) const;
  static Vocabulary read(std::istream& in);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.id_to_token_ == b.id_to_token_ && a.base_size_ == b.base_size_;
  }

 private:
  void push(std::string token);

  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
  std::size_t base_size_ = 3;
  std::size_t max_token_length_ = 0;
};

inline constexpr std::size_t kDefaultMaxLen = 128;
inline constexpr std::size_t kMinVocabSize = 64;

struct TokenSequence {
  std::vector<TokenId> ids;      // length max_len
  std::vector<std::uint8_t> mask;  // 1 for real tokens
  std::size_t true_length = 0;
};

/// Builds a vocabulary from cleaned text by repeated pair merging.
///
/// Starts from every character seen. Each round counts adjacent symbol
/// pairs inside words (weighted by word frequency), merges the most frequent
/// pair everywhere, and adds the merged symbol. Ties go to the
/// lexicographically smallest (merged, left) pair. Stops when the vocabulary
/// (specials included) reaches target_size or no pair remains. Characters are
/// always kept even if they alone exceed target_size.
///
/// Throws CorpusEmpty when the corpus has no words, InvalidConfig when
/// target_size < 64.
Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size);

struct ExtendResult {
  Vocabulary vocab;
  std::size_t added = 0;
};

/// The corpus with every whole-word occurrence of `words` removed (lines that
/// become empty are dropped). Base vocabularies are built from this so the
/// domain words are left to extend_vocab().
std::vector<std::string> without_words(std::span<const std::string> corpus,
                                       std::span<const std::string> words);

/// Appends tokens not yet present, in order, at the highest IDs. Existing
/// tokens keep their IDs.
ExtendResult extend_vocab(const Vocabulary& vocab, std::span<const std::string> new_tokens);

/// The six domain tokens shipped as the default extension.
std::span<const std::string> default_domain_tokens();

/// Greedy longest-prefix segmentation of one word. Characters with no match
/// become UNK. With include_added=false only base tokens are considered.
std::vector<TokenId> segment_word(std::string_view word, const Vocabulary& vocab,
                                  bool include_added = true);

/// [CLS] + segmented words, truncated and padded to max_len.
TokenSequence encode(std::string_view text, const Vocabulary& vocab,
                     std::size_t max_len = kDefaultMaxLen);

/// Space-joined surface forms of the real tokens after CLS.
std::string decode(const TokenSequence& seq, const Vocabulary& vocab);

/// Embedding row for an added token: the mean of the base-vocabulary rows of
/// its segmentation, ignoring UNK pieces. If every piece is UNK the row is
/// drawn from N(0, init_std²) with `seed`.
/// Throws TokenNotAdded when token is not one of vocab's added tokens.
std::vector<double> init_added_token_embedding(const Vocabulary& vocab, const Tensor& embedding_table,
                                               std::string_view token, double init_std = 0.02,
                                               std::uint64_t seed = 0);

/// Words that segment into two or more pieces, most frequent first (ties by
/// word). At most k entries.
std::vector<std::pair<std::string, std::size_t>> top_split_tokens(
    std::span<const std::string> corpus, const Vocabulary& vocab, std::size_t k);

}  // namespace hft
