#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "fcb/embed.hpp"

namespace fcb {

inline constexpr std::uint32_t kCacheFormatVersion = 1;

struct CacheKey {
  std::string video_id;
  std::string model_id;
  std::uint64_t content_hash = 0;  // bytes of the video (or frame folder)
  std::uint64_t param_hash = 0;    // everything upstream of the vectors

  friend bool operator==(const CacheKey&, const CacheKey&) = default;
};

// <dir>/<model_id>/<fnv(video_id)>-<content_hash>-<param_hash>.fcbe
std::filesystem::path cache_path(const CacheKey& key, const std::filesystem::path& dir);

// Atomic (temp file + rename). Returns the entry path.
std::filesystem::path cache_store(const EmbeddingSet& set, const CacheKey& key,
                                  const std::filesystem::path& dir);

// nullopt on a miss. Corrupt, truncated or version-mismatched entries are
// misses; a description lands in *warning when given.
std::optional<EmbeddingSet> cache_load(const CacheKey& key, const std::filesystem::path& dir,
                                       std::string* warning = nullptr);

}  // namespace fcb
