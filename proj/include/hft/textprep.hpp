#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace hft {

inline constexpr int kFake = 0;
inline constexpr int kReal = 1;
/// Label value for rows read without a label column (prediction inputs).
inline constexpr int kNoLabel = -1;

enum class Split { Train, Validation, Test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);

struct NewsExample {
  std::string id;
  std::string raw_text;
  int label = kFake;
  Split split = Split::Train;
};

struct CleanedExample {
  std::string id;
  std::string tokens_text;
  int label = kFake;
};

using StopWords = std::unordered_set<std::string>;

/// The shipped English stop-word list, in file order.
std::span<const std::string_view> default_stopword_list();
const StopWords& default_stopwords();
/// One word per line; blank lines and lines starting with '#' ignored.
StopWords load_stopwords(const std::filesystem::path& path);

/// Lowercases, removes links (whitespace-delimited runs starting at
/// "http://", "https://" or "www."), maps every byte outside [a-z0-9 -] to a
/// space, then drops stop words, hyphen-only words and link remnants
/// (words containing "http"), joining the rest with single spaces.
///
/// Throws EmptyAfterCleaning when nothing survives.
std::string clean_text(std::string_view raw, const StopWords& stopwords);

/// Cleans every example, dropping (and logging) the ones that clean to empty.
std::vector<CleanedExample> clean_dataset(std::span<const NewsExample> examples,
                                          const StopWords& stopwords,
                                          std::size_t* dropped = nullptr);

std::vector<std::string> split_words(std::string_view text);

enum class DelimitedFormat { Tsv, Csv };

/// .csv → Csv, anything else → Tsv.
DelimitedFormat format_for_path(const std::filesystem::path& path);

struct LoadOptions {
  Split split = Split::Train;
  /// When false a missing `label` column is accepted and labels are kNoLabel.
  bool require_label = true;
};

/// Parses `id<sep>text<sep>label` rows (header required, any column order).
/// Labels: fake/real or 0/1, case-insensitive. Errors carry the 1-based data
/// row: MalformedRow for wrong column counts or empty text, UnknownLabel for
/// anything else in the label column.
std::vector<NewsExample> parse_dataset(std::istream& in, DelimitedFormat format,
                                       const LoadOptions& options = {});
std::vector<NewsExample> load_dataset(const std::filesystem::path& path, DelimitedFormat format,
                                      const LoadOptions& options = {});
std::vector<NewsExample> load_dataset(const std::filesystem::path& path,
                                      const LoadOptions& options = {});

/// Writes the header and one row per example; labels as fake/real.
void write_dataset(std::ostream& out, std::span<const NewsExample> examples,
                   DelimitedFormat format = DelimitedFormat::Tsv);

struct DatasetStats {
  std::size_t total = 0;
  std::map<Split, std::size_t> per_split;
  std::array<std::size_t, 2> per_label{};
  /// Mean number of words after cleaning; examples that clean to empty count 0.
  double mean_tokens = 0.0;
};

DatasetStats dataset_stats(std::span<const NewsExample> examples, const StopWords& stopwords);

}  // namespace hft
