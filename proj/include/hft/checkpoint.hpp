#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hft/tensor.hpp"

namespace hft {

struct NamedTensor {
  std::string name;
  Tensor tensor;
};

/// In-memory form of the `HFT1` container.
///
/// Layout (all integers little-endian):
///   "HFT1" | u32 version | u64 digest | u32 header_len | header bytes |
///   u32 block_count | blocks...
/// where each block is
///   u32 name_len | name | u32 rank | u64 dim × rank | f64 × numel
/// and digest is FNV-1a-64 of the header bytes (a JSON document).
struct Checkpoint {
  std::string header_json;
  std::vector<NamedTensor> blocks;

  /// Tensor by name; throws BadCheckpoint if absent.
  [[nodiscard]] const Tensor& at(std::string_view name) const;
};

inline constexpr char kCheckpointMagic[4] = {'H', 'F', 'T', '1'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::uint64_t config_digest(std::string_view text);

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace hft
