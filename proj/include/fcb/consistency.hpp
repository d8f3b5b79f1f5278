#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcb/embed.hpp"
#include "fcb/types.hpp"

namespace fcb {

// cosine:       1 - a.b / (|a| |b|), clamped to [0, 2]
// euclidean:    |a - b|
// euclidean_l2: |a/|a| - b/|b||
// Accumulates in double. Throws fcb::Error on dimension mismatch or a
// zero-norm input.
double distance(std::span<const float> a, std::span<const float> b, MetricKind k);
double distance(const Embedding& a, const Embedding& b, MetricKind k);

struct ConsistencyScore {
  std::string video_id;
  std::string model_id;
  MetricKind metric = MetricKind::cosine;
  ComparisonMode mode = ComparisonMode::mode1;
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n_comparisons = 0;
  std::optional<std::size_t> reference_index;  // mode1 only

  friend bool operator==(const ConsistencyScore&, const ConsistencyScore&) = default;
};

struct SourceAggregate {
  std::string source_name;
  std::string model_id;
  MetricKind metric = MetricKind::cosine;
  ComparisonMode mode = ComparisonMode::mode1;
  std::optional<double> mean_of_video_means;  // nullopt: no scorable video
  double std_of_video_means = 0.0;            // population, across videos
  std::vector<ConsistencyScore> per_video;
  std::size_t n_unscorable = 0;

  // Marker for a grid cell where every video was unscorable.
  static SourceAggregate unscorable(std::string source, std::string model, MetricKind metric,
                                    ComparisonMode mode, std::size_t n_unscorable);
};

// Frame index of the Mode 1 reference. Medoid minimizes the mean distance
// to every other frame (ties: lowest frame index).
std::size_t select_reference(const EmbeddingSet& set, const ReferenceChoice& choice,
                             MetricKind metric);

// Distances of every valid frame to the reference frame. The reference's
// zero self-distance is included only with include_self.
// Throws UnscorableVideo with fewer than two embeddings.
ConsistencyScore score_mode1(const EmbeddingSet& set, std::size_t reference_frame,
                             MetricKind metric, bool include_self = false);

/// Seeded random pairs of positions into the valid-frame list.
///
/// The stream for a video is Xoshiro256(splitmix64(seed ^ fnv1a64(video_id))).
/// Each pair draws i = next() % n_valid, then j = next() % n_valid until
/// j != i. Pairs may share frames with other pairs.
std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n_valid,
                                                              std::size_t num_pairs,
                                                              std::uint64_t seed,
                                                              const std::string& video_id);

ConsistencyScore score_mode2(const EmbeddingSet& set, const Mode2Config& cfg,
                             std::uint64_t seed, MetricKind metric);

// Unweighted mean of per-video means. `n_unscorable` is carried through.
// Throws UnscorableVideo when `scores` is empty.
SourceAggregate aggregate_source(const std::string& source_name, std::span<const ConsistencyScore> scores,
                                 std::size_t n_unscorable = 0);

}  // namespace fcb
