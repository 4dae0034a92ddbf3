#include "hft/checkpoint.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "hft/error.hpp"

namespace hft {
namespace {

Checkpoint sample() {
  Checkpoint c;
  c.header_json = R"({"kind":"test","n":3})";
  c.blocks.push_back({"scalar", Tensor::scalar(-0.125)});
  c.blocks.push_back({"w", Tensor::matrix(2, 3, {1e-300, -2, 3.5, 4, 5, 6.000000000000001})});
  c.blocks.push_back({"empty_name_ok", Tensor::vector({0.1, 0.2})});
  return c;
}

ErrorCode read_error(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_checkpoint(in);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "read_checkpoint accepted corrupted bytes";
  return ErrorCode::Empty;
}

TEST(Checkpoint, RoundTripIsBitExact) {
  const Checkpoint c = sample();
  std::stringstream buf;
  write_checkpoint(buf, c);
  const Checkpoint back = read_checkpoint(buf);
  EXPECT_EQ(back.header_json, c.header_json);
  ASSERT_EQ(back.blocks.size(), c.blocks.size());
  for (std::size_t i = 0; i < c.blocks.size(); ++i) {
    EXPECT_EQ(back.blocks[i].name, c.blocks[i].name);
    EXPECT_EQ(back.blocks[i].tensor.shape(), c.blocks[i].tensor.shape());
    for (std::size_t j = 0; j < c.blocks[i].tensor.numel(); ++j)
      EXPECT_EQ(back.blocks[i].tensor.at(j), c.blocks[i].tensor.at(j));
  }
  EXPECT_EQ(back.at("w").at(1, 2), 6.000000000000001);
  EXPECT_THROW((void)back.at("missing"), Error);
}

TEST(Checkpoint, StartsWithMagic) {
  std::stringstream buf;
  write_checkpoint(buf, sample());
  EXPECT_EQ(buf.str().substr(0, 4), "HFT1");
}

TEST(Checkpoint, RejectsCorruption) {
  std::stringstream buf;
  write_checkpoint(buf, sample());
  const std::string good = buf.str();

  std::string bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_EQ(read_error(bad_magic), ErrorCode::BadCheckpoint);

  std::string bad_header = good;
  bad_header[4 + 4 + 8 + 4 + 2] ^= 0x01;  // a byte inside the JSON header
  EXPECT_EQ(read_error(bad_header), ErrorCode::BadCheckpoint);

  EXPECT_EQ(read_error(good.substr(0, good.size() - 3)), ErrorCode::BadCheckpoint);
  EXPECT_EQ(read_error(""), ErrorCode::BadCheckpoint);
}

TEST(Checkpoint, DigestIsFnv1a) {
  EXPECT_EQ(config_digest(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(config_digest("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(Checkpoint, MissingFile) {
  try {
    load_checkpoint("/nonexistent/ckpt.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FileNotFound);
  }
}

}  // namespace
}  // namespace hft
