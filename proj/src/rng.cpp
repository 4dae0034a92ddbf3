#include "hft/rng.hpp"

#include <cmath>
#include <numbers>

#include "hft/error.hpp"

namespace hft {

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::uniform_index(std::size_t n) {
  // Rejection sampling keeps the result unbiased.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t draw = engine_();
  while (draw >= limit) draw = engine_();
  return static_cast<std::size_t>(draw % bound);
}

double Rng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(base) ^ a) ^ b);
}

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyAfterCleaning: return "EmptyAfterCleaning";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::CorpusEmpty: return "CorpusEmpty";
    case ErrorCode::TokenNotAdded: return "TokenNotAdded";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::NonPositiveAlpha: return "NonPositiveAlpha";
    case ErrorCode::NotScalarLoss: return "NotScalarLoss";
    case ErrorCode::GraphAlreadyConsumed: return "GraphAlreadyConsumed";
    case ErrorCode::MissingGrad: return "MissingGrad";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::BadCheckpoint: return "BadCheckpoint";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IdOutOfRange: return "IdOutOfRange";
    case ErrorCode::WidthMismatch: return "WidthMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::DegenerateGradient: return "DegenerateGradient";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::Empty: return "Empty";
    case ErrorCode::EmptyCounts: return "EmptyCounts";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyAfterCleaning:
    case ErrorCode::MalformedRow:
    case ErrorCode::UnknownLabel:
    case ErrorCode::FileNotFound:
    case ErrorCode::CorpusEmpty:
    case ErrorCode::TokenNotAdded:
    case ErrorCode::BadCheckpoint:
    case ErrorCode::InvalidConfig:
    case ErrorCode::IdOutOfRange:
    case ErrorCode::WidthMismatch:
    case ErrorCode::LengthMismatch:
    case ErrorCode::Empty:
    case ErrorCode::EmptyCounts:
    case ErrorCode::TooShort:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), row_(row) {}

}  // namespace hft
