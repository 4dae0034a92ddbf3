#include "hft/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hft/error.hpp"

namespace hft {

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in, std::string_view what) {
  T value{};
  if (!in.read(reinterpret_cast<char*>(&value), sizeof(T))) {
    throw Error(ErrorCode::BadCheckpoint, "truncated while reading " + std::string(what));
  }
  return value;
}

std::string get_string(std::istream& in, std::uint32_t len, std::string_view what) {
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) {
    throw Error(ErrorCode::BadCheckpoint, "truncated while reading " + std::string(what));
  }
  return s;
}

}  // namespace

const Tensor& Checkpoint::at(std::string_view name) const {
  for (const auto& b : blocks)
    if (b.name == name) return b.tensor;
  throw Error(ErrorCode::BadCheckpoint, "missing block '" + std::string(name) + "'");
}

std::uint64_t config_digest(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
  out.write(kCheckpointMagic, 4);
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, config_digest(ckpt.header_json));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.header_json.size()));
  out.write(ckpt.header_json.data(), static_cast<std::streamsize>(ckpt.header_json.size()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(ckpt.blocks.size()));
  for (const auto& block : ckpt.blocks) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(block.name.size()));
    out.write(block.name.data(), static_cast<std::streamsize>(block.name.size()));
    const Shape& shape = block.tensor.shape();
    put<std::uint32_t>(out, static_cast<std::uint32_t>(shape.size()));
    for (std::size_t d : shape) put<std::uint64_t>(out, d);
    const auto values = block.tensor.values();
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  if (!out) throw Error(ErrorCode::BadCheckpoint, "write failed");
}

Checkpoint read_checkpoint(std::istream& in) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::BadCheckpoint, "not an HFT1 checkpoint");
  }
  const auto version = get<std::uint32_t>(in, "version");
  if (version != kCheckpointVersion) {
    throw Error(ErrorCode::BadCheckpoint, "unsupported version " + std::to_string(version));
  }
  const auto digest = get<std::uint64_t>(in, "digest");
  Checkpoint ckpt;
  ckpt.header_json = get_string(in, get<std::uint32_t>(in, "header length"), "header");
  if (config_digest(ckpt.header_json) != digest) {
    throw Error(ErrorCode::BadCheckpoint, "config digest mismatch");
  }
  const auto count = get<std::uint32_t>(in, "block count");
  for (std::uint32_t b = 0; b < count; ++b) {
    NamedTensor block;
    block.name = get_string(in, get<std::uint32_t>(in, "name length"), "name");
    const auto rank = get<std::uint32_t>(in, "rank");
    Shape shape(rank);
    for (auto& d : shape) d = static_cast<std::size_t>(get<std::uint64_t>(in, "dim"));
    std::vector<double> values(shape_numel(shape));
    if (!values.empty() &&
        !in.read(reinterpret_cast<char*>(values.data()),
                 static_cast<std::streamsize>(values.size() * sizeof(double)))) {
      throw Error(ErrorCode::BadCheckpoint, "truncated block '" + block.name + "'");
    }
    block.tensor = Tensor(std::move(shape), std::move(values));
    ckpt.blocks.push_back(std::move(block));
  }
  return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  write_checkpoint(out, ckpt);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open checkpoint " + path.string());
  return read_checkpoint(in);
}

}  // namespace hft
