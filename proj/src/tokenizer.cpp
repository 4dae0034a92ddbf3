#include "hft/tokenizer.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <ostream>
#include <set>

#include "hft/error.hpp"
#include "hft/rng.hpp"
#include "hft/textprep.hpp"

namespace hft {

// ---- Vocabulary --------------------------------------------------------

Vocabulary::Vocabulary() {
  push(std::string(kPadToken));
  push(std::string(kUnkToken));
  push(std::string(kClsToken));
  base_size_ = 3;
}

Vocabulary::Vocabulary(std::span<const std::string> base, std::span<const std::string> added)
    : Vocabulary() {
  for (const auto& t : base) push(t);
  base_size_ = size();
  for (const auto& t : added) push(t);
}

void Vocabulary::push(std::string token) {
  if (token.empty()) throw Error(ErrorCode::InvalidConfig, "empty token in vocabulary");
  if (token_to_id_.contains(token)) {
    throw Error(ErrorCode::InvalidConfig, "duplicate token '" + token + "'");
  }
  max_token_length_ = std::max(max_token_length_, token.size());
  token_to_id_.emplace(token, static_cast<TokenId>(id_to_token_.size()));
  id_to_token_.push_back(std::move(token));
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  const auto it = token_to_id_.find(std::string(token));
  if (it == token_to_id_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::token(TokenId id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= size()) {
    throw Error(ErrorCode::IdOutOfRange, "token id " + std::to_string(id));
  }
  return id_to_token_[static_cast<std::size_t>(id)];
}

void Vocabulary::write(std::ostream& out) const {
  for (std::size_t i = 0; i < size(); ++i) {
    if (i == base_size_ && added_count() > 0) out << kAddedMarker << '\n';
    out << id_to_token_[i] << '\n';
  }
}

Vocabulary Vocabulary::read(std::istream& in) {
  std::vector<std::string> base, added;
  bool in_added = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++lineno;
    if (lineno <= 3) {
      static constexpr std::string_view kSpecials[] = {kPadToken, kUnkToken, kClsToken};
      if (line != kSpecials[lineno - 1]) {
        throw Error(ErrorCode::InvalidConfig, "vocabulary line " + std::to_string(lineno) +
                                                  " must be " + std::string(kSpecials[lineno - 1]));
      }
      continue;
    }
    if (line == kAddedMarker) {
      in_added = true;
      continue;
    }
    if (line.empty()) continue;
    (in_added ? added : base).push_back(line);
  }
  if (lineno < 3) throw Error(ErrorCode::InvalidConfig, "vocabulary file too short");
  return Vocabulary(base, added);
}

// ---- construction ------------------------------------------------------

Vocabulary build_vocab(std::span<const std::string> corpus, std::size_t target_size) {
  if (target_size < kMinVocabSize) {
    throw Error(ErrorCode::InvalidConfig,
                "target vocabulary size must be >= " + std::to_string(kMinVocabSize));
  }
  std::map<std::string, std::size_t> word_freq;
  for (const auto& line : corpus)
    for (auto& w : split_words(line)) ++word_freq[std::move(w)];
  if (word_freq.empty()) throw Error(ErrorCode::CorpusEmpty, "no words in corpus");

  struct Word {
    std::vector<std::string> symbols;
    std::size_t freq;
  };
  std::vector<Word> words;
  std::set<std::string> chars;
  for (const auto& [w, f] : word_freq) {
    Word word{{}, f};
    for (char c : w) {
      word.symbols.emplace_back(1, c);
      chars.emplace(1, c);
    }
    words.push_back(std::move(word));
  }

  std::vector<std::string> base(chars.begin(), chars.end());
  std::set<std::string> known(chars.begin(), chars.end());
  const std::size_t specials = 3;

  while (specials + base.size() < target_size) {
    std::map<std::pair<std::string, std::string>, std::size_t> pairs;
    for (const Word& w : words)
      for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) pairs[{w.symbols[i], w.symbols[i + 1]}] += w.freq;
    if (pairs.empty()) break;

    const std::pair<std::string, std::string>* best = nullptr;
    std::size_t best_count = 0;
    std::string best_merged;
    for (const auto& [pair, count] : pairs) {
      std::string merged = pair.first + pair.second;
      if (!best || count > best_count ||
          (count == best_count && std::tie(merged, pair.first) < std::tie(best_merged, best->first))) {
        best = &pair;
        best_count = count;
        best_merged = std::move(merged);
      }
    }

    const auto [left, right] = *best;
    for (Word& w : words) {
      std::vector<std::string> next;
      next.reserve(w.symbols.size());
      for (std::size_t i = 0; i < w.symbols.size(); ++i) {
        if (i + 1 < w.symbols.size() && w.symbols[i] == left && w.symbols[i + 1] == right) {
          next.push_back(best_merged);
          ++i;
        } else {
          next.push_back(std::move(w.symbols[i]));
        }
      }
      w.symbols = std::move(next);
    }
    if (known.insert(best_merged).second) base.push_back(best_merged);
  }
  return Vocabulary(base);
}

std::vector<std::string> without_words(std::span<const std::string> corpus,
                                       std::span<const std::string> words) {
  const std::set<std::string, std::less<>> drop(words.begin(), words.end());
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& line : corpus) {
    std::string kept;
    for (const auto& w : split_words(line)) {
      if (drop.contains(w)) continue;
      if (!kept.empty()) kept.push_back(' ');
      kept += w;
    }
    if (!kept.empty()) out.push_back(std::move(kept));
  }
  return out;
}

ExtendResult extend_vocab(const Vocabulary& vocab, std::span<const std::string> new_tokens) {
  std::vector<std::string> base(vocab.tokens().begin() + 3,
                                vocab.tokens().begin() + static_cast<std::ptrdiff_t>(vocab.base_size()));
  std::vector<std::string> added(vocab.added_tokens().begin(), vocab.added_tokens().end());
  std::size_t count = 0;
  for (const auto& t : new_tokens) {
    if (vocab.contains(t) || std::find(added.begin(), added.end(), t) != added.end()) continue;
    added.push_back(t);
    ++count;
  }
  return {Vocabulary(base, added), count};
}

std::span<const std::string> default_domain_tokens() {
  static const std::vector<std::string> tokens = {"covid-19", "covid19",  "coronavirus",
                                                  "pandemic", "indiafightscorona", "lockdown"};
  return tokens;
}

// ---- encoding ----------------------------------------------------------

std::vector<TokenId> segment_word(std::string_view word, const Vocabulary& vocab,
                                  bool include_added) {
  std::vector<TokenId> ids;
  std::size_t pos = 0;
  while (pos < word.size()) {
    const std::size_t longest = std::min(vocab.max_token_length(), word.size() - pos);
    TokenId match = Vocabulary::kUnk;
    std::size_t match_len = 1;
    for (std::size_t len = longest; len >= 1; --len) {
      const auto id = vocab.find(word.substr(pos, len));
      if (id && id >= 3 && (include_added || !vocab.is_added(*id))) {
        match = *id;
        match_len = len;
        break;
      }
    }
    ids.push_back(match);
    pos += match_len;
  }
  return ids;
}

TokenSequence encode(std::string_view text, const Vocabulary& vocab, std::size_t max_len) {
  if (max_len == 0) throw Error(ErrorCode::InvalidConfig, "max_len must be positive");
  TokenSequence seq;
  seq.ids.assign(max_len, Vocabulary::kPad);
  seq.mask.assign(max_len, 0);
  seq.ids[0] = Vocabulary::kCls;
  std::size_t n = 1;
  for (const auto& word : split_words(text)) {
    if (n == max_len) break;
    for (TokenId id : segment_word(word, vocab)) {
      if (n == max_len) break;
      seq.ids[n++] = id;
    }
  }
  seq.true_length = n;
  std::fill_n(seq.mask.begin(), n, 1);
  return seq;
}

std::string decode(const TokenSequence& seq, const Vocabulary& vocab) {
  std::string out;
  for (std::size_t i = 1; i < seq.true_length; ++i) {
    if (!out.empty()) out.push_back(' ');
    out += vocab.token(seq.ids[i]);
  }
  return out;
}

std::vector<double> init_added_token_embedding(const Vocabulary& vocab, const Tensor& embedding_table,
                                               std::string_view token, double init_std,
                                               std::uint64_t seed) {
  const auto id = vocab.find(token);
  if (!id || !vocab.is_added(*id)) {
    throw Error(ErrorCode::TokenNotAdded, "'" + std::string(token) + "' is not an added token");
  }
  if (embedding_table.rank() != 2 || embedding_table.dim(0) < vocab.base_size()) {
    throw Error(ErrorCode::ShapeMismatch, "embedding table does not cover the base vocabulary");
  }
  const std::size_t hidden = embedding_table.dim(1);
  const auto table = embedding_table.values();
  std::vector<double> row(hidden, 0.0);
  std::size_t pieces = 0;
  for (TokenId piece : segment_word(token, vocab, /*include_added=*/false)) {
    if (piece == Vocabulary::kUnk) continue;
    const double* src = table.data() + static_cast<std::size_t>(piece) * hidden;
    for (std::size_t j = 0; j < hidden; ++j) row[j] += src[j];
    ++pieces;
  }
  if (pieces == 0) {
    Rng rng(seed);
    for (double& v : row) v = rng.normal(0.0, init_std);
    return row;
  }
  for (double& v : row) v /= static_cast<double>(pieces);
  return row;
}

std::vector<std::pair<std::string, std::size_t>> top_split_tokens(
    std::span<const std::string> corpus, const Vocabulary& vocab, std::size_t k) {
  std::map<std::string, std::size_t> counts;
  for (const auto& line : corpus)
    for (auto& w : split_words(line)) ++counts[std::move(w)];
  std::vector<std::pair<std::string, std::size_t>> split;
  for (const auto& [w, c] : counts)
    if (segment_word(w, vocab).size() >= 2) split.emplace_back(w, c);
  std::stable_sort(split.begin(), split.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (split.size() > k) split.resize(k);
  return split;
}

}  // namespace hft
