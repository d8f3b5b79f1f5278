#pragma once

// Test-only helpers and brute-force oracles. Nothing here calls into the
// code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "fcb/embed.hpp"
#include "fcb/types.hpp"

namespace fcb::testing {

namespace fs = std::filesystem;

inline fs::path fixtures() { return FCB_FIXTURES; }

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("fcb_test_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

inline void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

inline std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI binary; returns its exit status.
inline int run_cli(const std::string& args, const fs::path& log = {}) {
  std::string cmd = std::string(FCB_CLI) + " " + args;
  cmd += log.empty() ? " 2>/dev/null" : " 2>" + log.string();
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

// Random nonzero float vector with components in [-1, 1].
inline std::vector<float> random_vector(std::mt19937_64& rng, std::size_t dim) {
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<float> v(dim);
  for (;;) {
    double sq = 0;
    for (auto& x : v) {
      x = u(rng);
      sq += double(x) * x;
    }
    if (sq > 1e-6) return v;
  }
}

inline EmbeddingSet random_set(std::mt19937_64& rng, std::size_t n, std::size_t dim,
                               const std::string& video_id = "synthetic") {
  EmbeddingSet s;
  s.video_id = video_id;
  s.model_id = "synthetic";
  std::size_t frame = 0;
  std::uniform_int_distribution<int> gap(1, 3);
  for (std::size_t i = 0; i < n; ++i) {
    frame += static_cast<std::size_t>(gap(rng));
    s.embeddings.push_back({random_vector(rng, dim), "synthetic", frame});
  }
  s.total_frames = frame + 1;
  s.skipped_frames = s.total_frames - n;
  return s;
}

inline EmbeddingSet set_of(std::vector<std::vector<float>> vectors, const std::string& vid = "v") {
  EmbeddingSet s;
  s.video_id = vid;
  s.model_id = "m";
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    s.embeddings.push_back({std::move(vectors[i]), "m", i});
  }
  s.total_frames = s.embeddings.size();
  return s;
}

// --- oracles -----------------------------------------------------------------

// Long-double, normalize-first formulations.
inline long double oracle_distance(const std::vector<float>& a, const std::vector<float>& b,
                                   MetricKind k) {
  long double na = 0, nb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += (long double)a[i] * a[i];
    nb += (long double)b[i] * b[i];
  }
  na = std::sqrt(na);
  nb = std::sqrt(nb);
  long double acc = 0;
  switch (k) {
    case MetricKind::cosine: {
      for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] / na) * (b[i] / nb);
      long double d = 1.0L - acc;
      if (d < 0) d = 0;
      if (d > 2) d = 2;
      return d;
    }
    case MetricKind::euclidean:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = (long double)a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    case MetricKind::euclidean_l2:
      for (std::size_t i = 0; i < a.size(); ++i) {
        const long double d = a[i] / na - b[i] / nb;
        acc += d * d;
      }
      return std::sqrt(acc);
  }
  return -1;
}

struct OracleStats {
  double mean = 0;
  double std = 0;
  std::size_t n = 0;
};

inline OracleStats oracle_stats(const std::vector<long double>& d) {
  OracleStats s;
  s.n = d.size();
  long double sum = 0;
  for (auto x : d) sum += x;
  const long double mean = sum / d.size();
  long double ss = 0;
  for (auto x : d) ss += (x - mean) * (x - mean);
  s.mean = double(mean);
  s.std = double(std::sqrt(ss / d.size()));
  return s;
}

inline OracleStats oracle_mode1(const EmbeddingSet& s, std::size_t ref_frame, MetricKind k) {
  const std::vector<float>* ref = nullptr;
  for (const auto& e : s.embeddings) {
    if (e.frame_index == ref_frame) ref = &e.vector;
  }
  std::vector<long double> d;
  for (const auto& e : s.embeddings) {
    if (e.frame_index != ref_frame) d.push_back(oracle_distance(e.vector, *ref, k));
  }
  return oracle_stats(d);
}

inline OracleStats oracle_pairs(const EmbeddingSet& s,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                                MetricKind k) {
  std::vector<long double> d;
  for (const auto& [i, j] : pairs) {
    d.push_back(oracle_distance(s.embeddings[i].vector, s.embeddings[j].vector, k));
  }
  return oracle_stats(d);
}

inline constexpr MetricKind kAllMetrics[] = {MetricKind::cosine, MetricKind::euclidean,
                                             MetricKind::euclidean_l2};

}  // namespace fcb::testing
