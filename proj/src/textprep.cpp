#include "hft/textprep.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>

#include "hft/error.hpp"
#include "hft/log.hpp"

namespace hft {

std::string_view to_string(Split split) noexcept {
  switch (split) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "validation" || text == "val") return Split::Validation;
  if (text == "test") return Split::Test;
  throw Error(ErrorCode::InvalidConfig, "unknown split '" + std::string(text) + "'");
}

namespace {

bool is_kept_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// Blanks out every whitespace-delimited run that starts at a link prefix.
void strip_links(std::string& text) {
  static constexpr std::string_view kPrefixes[] = {"http://", "https://", "www."};
  for (std::string_view prefix : kPrefixes) {
    std::size_t pos = text.find(prefix);
    while (pos != std::string::npos) {
      std::size_t end = pos;
      while (end < text.size() && !is_space(text[end])) text[end++] = ' ';
      pos = text.find(prefix, end);
    }
  }
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return out;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) words.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return words;
}

std::string clean_text(std::string_view raw, const StopWords& stopwords) {
  std::string text = lower(raw);
  strip_links(text);
  for (char& c : text)
    if (!is_kept_char(c)) c = ' ';

  std::string out;
  for (const std::string& word : split_words(text)) {
    if (stopwords.contains(word)) continue;
    if (word.find_first_not_of('-') == std::string::npos) continue;
    if (word.find("http") != std::string::npos) continue;
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  if (out.empty()) throw Error(ErrorCode::EmptyAfterCleaning, "nothing left after cleaning");
  return out;
}

std::vector<CleanedExample> clean_dataset(std::span<const NewsExample> examples,
                                          const StopWords& stopwords, std::size_t* dropped) {
  std::vector<CleanedExample> out;
  out.reserve(examples.size());
  std::size_t n_dropped = 0;
  for (const NewsExample& ex : examples) {
    try {
      out.push_back({ex.id, clean_text(ex.raw_text, stopwords), ex.label});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
      ++n_dropped;
      log_warning("dropping example '" + ex.id + "': empty after cleaning");
    }
  }
  if (dropped) *dropped = n_dropped;
  return out;
}

DelimitedFormat format_for_path(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".csv" ? DelimitedFormat::Csv : DelimitedFormat::Tsv;
}

namespace {

std::vector<std::string> split_tsv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return fields;
}

// RFC 4180 style: quoted fields may contain commas, doubled quotes and newlines.
// Returns nullopt at end of input.
std::optional<std::vector<std::string>> read_csv_record(std::istream& in) {
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false, any = false;
  char c;
  while (in.get(c)) {
    any = true;
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c == '\n') {
      fields.push_back(std::move(field));
      return fields;
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (!any) return std::nullopt;
  fields.push_back(std::move(field));
  return fields;
}

std::optional<std::vector<std::string>> read_record(std::istream& in, DelimitedFormat format) {
  if (format == DelimitedFormat::Csv) return read_csv_record(in);
  std::string line;
  if (!std::getline(in, line)) return std::nullopt;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return split_tsv(line);
}

bool blank(const std::vector<std::string>& fields) {
  return fields.size() == 1 && trim(fields[0]).empty();
}

std::optional<int> parse_label(std::string_view raw) {
  const std::string s = lower(trim(raw));
  if (s == "fake" || s == "0") return kFake;
  if (s == "real" || s == "1") return kReal;
  return std::nullopt;
}

}  // namespace

std::vector<NewsExample> parse_dataset(std::istream& in, DelimitedFormat format,
                                       const LoadOptions& options) {
  auto header = read_record(in, format);
  while (header && blank(*header)) header = read_record(in, format);
  if (!header) throw Error(ErrorCode::MalformedRow, "missing header row", 0);

  std::optional<std::size_t> id_col, text_col, label_col;
  for (std::size_t i = 0; i < header->size(); ++i) {
    const std::string name = lower(trim((*header)[i]));
    if (name == "id") id_col = i;
    if (name == "text") text_col = i;
    if (name == "label") label_col = i;
  }
  if (!id_col || !text_col || (options.require_label && !label_col)) {
    throw Error(ErrorCode::MalformedRow,
                options.require_label ? "header must name columns id, text, label"
                                      : "header must name columns id, text",
                0);
  }

  std::vector<NewsExample> examples;
  std::size_t row = 0;
  while (auto fields = read_record(in, format)) {
    if (blank(*fields)) continue;
    ++row;
    if (fields->size() != header->size()) {
      throw Error(ErrorCode::MalformedRow,
                  "expected " + std::to_string(header->size()) + " columns, got " +
                      std::to_string(fields->size()) + " (row " + std::to_string(row) + ")",
                  row);
    }
    NewsExample ex;
    ex.id = trim((*fields)[*id_col]);
    ex.raw_text = trim((*fields)[*text_col]);
    ex.split = options.split;
    if (ex.raw_text.empty()) {
      throw Error(ErrorCode::MalformedRow, "empty text (row " + std::to_string(row) + ")", row);
    }
    if (label_col) {
      const auto label = parse_label((*fields)[*label_col]);
      if (!label) {
        throw Error(ErrorCode::UnknownLabel,
                    "label '" + (*fields)[*label_col] + "' (row " + std::to_string(row) + ")",
                    row);
      }
      ex.label = *label;
    } else {
      ex.label = kNoLabel;
    }
    examples.push_back(std::move(ex));
  }
  return examples;
}

std::vector<NewsExample> load_dataset(const std::filesystem::path& path, DelimitedFormat format,
                                      const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open dataset " + path.string());
  return parse_dataset(in, format, options);
}

std::vector<NewsExample> load_dataset(const std::filesystem::path& path,
                                      const LoadOptions& options) {
  return load_dataset(path, format_for_path(path), options);
}

namespace {

std::string csv_quote(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string tsv_field(std::string_view s) {
  std::string out(s);
  std::replace_if(out.begin(), out.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return out;
}

std::string label_name(int label) {
  return label == kReal ? "real" : label == kFake ? "fake" : "";
}

}  // namespace

void write_dataset(std::ostream& out, std::span<const NewsExample> examples,
                   DelimitedFormat format) {
  if (format == DelimitedFormat::Csv) {
    out << "id,text,label\n";
    for (const auto& ex : examples)
      out << csv_quote(ex.id) << ',' << csv_quote(ex.raw_text) << ',' << label_name(ex.label) << '\n';
  } else {
    out << "id\ttext\tlabel\n";
    for (const auto& ex : examples)
      out << tsv_field(ex.id) << '\t' << tsv_field(ex.raw_text) << '\t' << label_name(ex.label) << '\n';
  }
}

DatasetStats dataset_stats(std::span<const NewsExample> examples, const StopWords& stopwords) {
  DatasetStats stats;
  stats.total = examples.size();
  std::size_t token_total = 0;
  for (const NewsExample& ex : examples) {
    ++stats.per_split[ex.split];
    if (ex.label == kFake || ex.label == kReal) ++stats.per_label[static_cast<std::size_t>(ex.label)];
    try {
      token_total += split_words(clean_text(ex.raw_text, stopwords)).size();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyAfterCleaning) throw;
    }
  }
  if (stats.total > 0) stats.mean_tokens = static_cast<double>(token_total) / static_cast<double>(stats.total);
  return stats;
}

}  // namespace hft
