// Cache entry layout, all integers little-endian:
//
//   char[4]  magic "FCBE"
//   u32      format version
//   u32 n, n bytes    video_id
//   u64      content hash
//   u32 n, n bytes    model_id
//   u32      dim
//   u64      parameter hash
//   u64      total_frames
//   u64      skipped_frames
//   u64      dropped_frames
//   u64      row count
//   rows:    u64 frame_index, dim x f32 (IEEE-754 binary32)
//   u64      FNV-1a of every preceding byte
#include "fcb/cache.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <system_error>
#include <thread>

#include "fcb/error.hpp"
#include "fcb/hash.hpp"

static_assert(std::endian::native == std::endian::little, "cache writer assumes little-endian");

namespace fcb {

namespace fs = std::filesystem;

fs::path cache_path(const CacheKey& key, const fs::path& dir) {
  return dir / key.model_id /
         (to_hex(fnv1a64(key.video_id)) + "-" + to_hex(key.content_hash) + "-" +
          to_hex(key.param_hash) + ".fcbe");
}

namespace {

class Writer {
 public:
  template <typename T>
  void put(T v) {
    char buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    bytes_.append(buf, sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint32_t>(static_cast<std::uint32_t>(s.size()));
    bytes_ += s;
  }
  std::string finish() {
    put<std::uint64_t>(fnv1a64(bytes_));
    return std::move(bytes_);
  }

 private:
  std::string bytes_;
};

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string get_string() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::string s(bytes_.substr(pos_, n));
    pos_ += n;
    return s;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error("truncated");
  }
  std::size_t pos() const { return pos_; }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

fs::path cache_store(const EmbeddingSet& set, const CacheKey& key, const fs::path& dir) {
  Writer w;
  w.put<char>('F');
  w.put<char>('C');
  w.put<char>('B');
  w.put<char>('E');
  w.put<std::uint32_t>(kCacheFormatVersion);
  w.put_string(key.video_id);
  w.put<std::uint64_t>(key.content_hash);
  w.put_string(key.model_id);
  const std::uint32_t dim =
      set.embeddings.empty() ? 0 : static_cast<std::uint32_t>(set.embeddings.front().vector.size());
  w.put<std::uint32_t>(dim);
  w.put<std::uint64_t>(key.param_hash);
  w.put<std::uint64_t>(set.total_frames);
  w.put<std::uint64_t>(set.skipped_frames);
  w.put<std::uint64_t>(set.dropped_frames);
  w.put<std::uint64_t>(set.embeddings.size());
  for (const auto& e : set.embeddings) {
    if (e.vector.size() != dim) throw Error("cache_store: mixed embedding dimensions");
    w.put<std::uint64_t>(e.frame_index);
    for (float x : e.vector) w.put<float>(x);
  }
  const std::string bytes = w.finish();

  const fs::path target = cache_path(key, dir);
  fs::create_directories(target.parent_path());
  std::ostringstream tmp_name;
  tmp_name << target.filename().string() << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = target.parent_path() / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write cache entry " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write cache entry " + tmp.string());
  }
  fs::rename(tmp, target);
  return target;
}

std::optional<EmbeddingSet> cache_load(const CacheKey& key, const fs::path& dir,
                                       std::string* warning) {
  const fs::path path = cache_path(key, dir);
  std::error_code ec;
  if (!fs::is_regular_file(path, ec)) return std::nullopt;

  auto miss = [&](const std::string& why) -> std::optional<EmbeddingSet> {
    if (warning) *warning = "cache entry " + path.string() + " ignored: " + why;
    return std::nullopt;
  };

  std::string bytes;
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) return miss("unreadable");
    std::stringstream ss;
    ss << in.rdbuf();
    bytes = ss.str();
  }

  try {
    if (bytes.size() < 4 + 4 + 8) return miss("truncated");
    Reader r(bytes);
    if (bytes.compare(0, 4, "FCBE") != 0) return miss("bad magic");
    r.get<std::uint32_t>();
    const auto version = r.get<std::uint32_t>();
    if (version != kCacheFormatVersion) {
      return miss("format version " + std::to_string(version) + ", expected " +
                  std::to_string(kCacheFormatVersion));
    }
    const std::string_view body(bytes.data(), bytes.size() - 8);
    std::uint64_t stored_sum;
    std::memcpy(&stored_sum, bytes.data() + bytes.size() - 8, 8);
    if (fnv1a64(body) != stored_sum) return miss("checksum mismatch");

    Reader b(body);
    b.get<std::uint32_t>();
    b.get<std::uint32_t>();
    EmbeddingSet set;
    set.video_id = b.get_string();
    const auto content_hash = b.get<std::uint64_t>();
    set.model_id = b.get_string();
    const auto dim = b.get<std::uint32_t>();
    const auto param_hash = b.get<std::uint64_t>();
    if (set.video_id != key.video_id || set.model_id != key.model_id ||
        content_hash != key.content_hash || param_hash != key.param_hash) {
      return miss("key mismatch");
    }
    set.total_frames = b.get<std::uint64_t>();
    set.skipped_frames = b.get<std::uint64_t>();
    set.dropped_frames = b.get<std::uint64_t>();
    const auto rows = b.get<std::uint64_t>();
    b.need(rows * (8 + 4 * static_cast<std::uint64_t>(dim)));
    set.embeddings.reserve(rows);
    for (std::uint64_t i = 0; i < rows; ++i) {
      Embedding e;
      e.model_id = set.model_id;
      e.frame_index = b.get<std::uint64_t>();
      e.vector.resize(dim);
      for (auto& x : e.vector) x = b.get<float>();
      set.embeddings.push_back(std::move(e));
    }
    if (b.pos() != body.size()) return miss("trailing bytes");
    return set;
  } catch (const Error& e) {
    return miss(e.what());
  }
}

}  // namespace fcb
