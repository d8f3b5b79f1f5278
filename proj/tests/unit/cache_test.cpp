#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "fcb/cache.hpp"
#include "test_support.hpp"

namespace fcb {
namespace {

namespace fs = std::filesystem;

EmbeddingSet sample_set() {
  std::mt19937_64 rng(1);
  auto s = testing::random_set(rng, 7, 64, "real/a.mp4");
  s.model_id = "toy";
  for (auto& e : s.embeddings) e.model_id = "toy";
  s.embeddings[2].vector[5] = 1e-38f;  // denormal-adjacent value survives
  s.skipped_frames = 4;
  s.dropped_frames = 1;
  s.total_frames = 12;
  return s;
}

CacheKey key_for(const EmbeddingSet& s) { return {s.video_id, s.model_id, 0x1234, 0xabcd}; }

TEST(Cache, RoundTripIsBitExact) {
  testing::TempDir d;
  const auto s = sample_set();
  const auto p = cache_store(s, key_for(s), d.path());
  EXPECT_EQ(p, cache_path(key_for(s), d.path()));
  EXPECT_TRUE(fs::exists(p));
  std::string warning;
  const auto back = cache_load(key_for(s), d.path(), &warning);
  ASSERT_TRUE(back);
  EXPECT_EQ(*back, s);
  EXPECT_TRUE(warning.empty());
}

TEST(Cache, EmptySetRoundTrips) {
  testing::TempDir d;
  EmbeddingSet s;
  s.video_id = "x/y";
  s.model_id = "toy";
  s.total_frames = 3;
  s.skipped_frames = 3;
  cache_store(s, key_for(s), d.path());
  EXPECT_EQ(cache_load(key_for(s), d.path()), s);
}

TEST(Cache, KeyChangesMiss) {
  testing::TempDir d;
  const auto s = sample_set();
  cache_store(s, key_for(s), d.path());
  auto k = key_for(s);
  k.param_hash ^= 1;  // e.g. a different max_dim
  EXPECT_FALSE(cache_load(k, d.path()));
  k = key_for(s);
  k.content_hash ^= 1;
  EXPECT_FALSE(cache_load(k, d.path()));
  k = key_for(s);
  k.model_id = "other";
  EXPECT_FALSE(cache_load(k, d.path()));
}

TEST(Cache, TruncatedEntryIsAMissWithWarning) {
  testing::TempDir d;
  const auto s = sample_set();
  const auto p = cache_store(s, key_for(s), d.path());
  const auto full = fs::file_size(p);
  for (auto len : {std::uintmax_t{0}, std::uintmax_t{3}, full / 2, full - 1}) {
    cache_store(s, key_for(s), d.path());
    fs::resize_file(p, len);
    std::string warning;
    EXPECT_FALSE(cache_load(key_for(s), d.path(), &warning)) << len;
    EXPECT_FALSE(warning.empty()) << len;
  }
}

TEST(Cache, CorruptedOrForeignEntriesAreMisses) {
  testing::TempDir d;
  const auto s = sample_set();
  const auto p = cache_store(s, key_for(s), d.path());
  auto bytes = testing::read_text(p);

  auto flip = [&](std::size_t at) {
    auto b = bytes;
    b[at] ^= 0x40;
    testing::write_text(p, b);
    std::string warning;
    const bool miss = !cache_load(key_for(s), d.path(), &warning);
    return miss && !warning.empty();
  };
  EXPECT_TRUE(flip(0));                 // magic
  EXPECT_TRUE(flip(4));                 // version
  EXPECT_TRUE(flip(bytes.size() / 2));  // payload, caught by checksum
  EXPECT_TRUE(flip(bytes.size() - 1));  // checksum itself

  testing::write_text(p, bytes + "x");
  std::string warning;
  EXPECT_FALSE(cache_load(key_for(s), d.path(), &warning));
  EXPECT_FALSE(warning.empty());

  testing::write_text(p, bytes);
  EXPECT_TRUE(cache_load(key_for(s), d.path()));
}

TEST(Cache, VersionMismatchIsAMiss) {
  testing::TempDir d;
  const auto s = sample_set();
  const auto p = cache_store(s, key_for(s), d.path());
  auto bytes = testing::read_text(p);
  const std::uint32_t v = kCacheFormatVersion + 1;
  std::memcpy(bytes.data() + 4, &v, 4);
  testing::write_text(p, bytes);
  std::string warning;
  EXPECT_FALSE(cache_load(key_for(s), d.path(), &warning));
  EXPECT_NE(warning.find("version"), std::string::npos) << warning;
}

TEST(Cache, AbsentEntryIsASilentMiss) {
  testing::TempDir d;
  std::string warning;
  EXPECT_FALSE(cache_load({"a/b", "toy", 1, 2}, d.path(), &warning));
  EXPECT_TRUE(warning.empty());
}

}  // namespace
}  // namespace fcb
