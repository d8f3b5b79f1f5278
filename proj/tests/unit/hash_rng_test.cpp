#include <gtest/gtest.h>

#include "fcb/hash.hpp"
#include "fcb/rng.hpp"
#include "test_support.hpp"

namespace fcb {
namespace {

TEST(Fnv1a64, ReferenceVectors) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
  EXPECT_EQ(fnv1a64("v1"), 0x08cf0b07b5709128ULL);
}

TEST(Fnv1a64, ByteSpanMatchesString) {
  const std::string s = "real/a.mp4";
  const auto* p = reinterpret_cast<const std::byte*>(s.data());
  EXPECT_EQ(fnv1a64(std::span<const std::byte>(p, s.size())), fnv1a64(s));
}

TEST(Splitmix64, ReferenceVector) { EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL); }

TEST(Xoshiro256, ReferenceScramblerFromState) {
  auto g = Xoshiro256::from_state({1, 2, 3, 4});
  EXPECT_EQ(g.next(), 11520ULL);
  EXPECT_EQ(g.next(), 0ULL);
  EXPECT_EQ(g.next(), 1509978240ULL);
  EXPECT_EQ(g.next(), 1215971899390074240ULL);
}

TEST(Xoshiro256, SeededStreamMatchesOracle) {
  // Frozen from tests/oracles/pair_sampler.py.
  const std::uint64_t s = video_stream_seed(0, "v1");
  EXPECT_EQ(s, 0xc069f3b9f06680f7ULL);
  Xoshiro256 g(s);
  EXPECT_EQ(g.next(), 0xbe88a6aa202a6b6aULL);
  EXPECT_EQ(g.next(), 0x103c6eaec6b54898ULL);
  EXPECT_EQ(g.next(), 0xe640dac17ecb7809ULL);
}

TEST(Hex, SixteenLowercaseDigits) {
  EXPECT_EQ(to_hex(0), "0000000000000000");
  EXPECT_EQ(to_hex(0xDEADBEEFULL), "00000000deadbeef");
}

TEST(HashPathContents, DirectoryDependsOnNamesAndBytes) {
  testing::TempDir a, b;
  testing::write_text(a / "1.png", "x");
  testing::write_text(a / "2.png", "y");
  testing::write_text(b / "1.png", "x");
  testing::write_text(b / "2.png", "y");
  EXPECT_EQ(hash_path_contents(a.path()), hash_path_contents(b.path()));
  testing::write_text(b / "2.png", "z");
  EXPECT_NE(hash_path_contents(a.path()), hash_path_contents(b.path()));
  testing::write_text(b / "2.png", "y");
  std::filesystem::rename(b / "2.png", b / "3.png");
  EXPECT_NE(hash_path_contents(a.path()), hash_path_contents(b.path()));
}

TEST(HashPathContents, FileIsFnvOfBytes) {
  testing::TempDir d;
  testing::write_text(d / "f", "foobar");
  EXPECT_EQ(hash_path_contents(d / "f"), fnv1a64("foobar"));
}

}  // namespace
}  // namespace fcb
