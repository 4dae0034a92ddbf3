#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hft {

enum class ErrorCode {
  // textprep
  EmptyAfterCleaning,
  MalformedRow,
  UnknownLabel,
  FileNotFound,
  // tokenizer
  CorpusEmpty,
  TokenNotAdded,
  // ndtensor
  ShapeMismatch,
  NonPositiveAlpha,
  NotScalarLoss,
  GraphAlreadyConsumed,
  MissingGrad,
  NonFiniteValue,
  BadCheckpoint,
  // encoder
  InvalidConfig,
  IdOutOfRange,
  WidthMismatch,
  // objective
  EmptyBatch,
  // advtrain
  DegenerateGradient,
  // metrics
  LengthMismatch,
  Empty,
  EmptyCounts,
  // pipeline
  TooShort,
  NonFiniteLoss,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by user input (bad data, bad config) rather than
/// by a bug or an environment failure. The CLI maps these to exit code 1.
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// 1-based data row for dataset errors.
  [[nodiscard]] std::optional<std::size_t> row() const noexcept { return row_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> row_;
};

}  // namespace hft
