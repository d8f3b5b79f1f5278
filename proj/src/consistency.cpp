#include "fcb/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fcb/error.hpp"
#include "fcb/rng.hpp"

namespace fcb {

double distance(std::span<const float> a, std::span<const float> b, MetricKind k) {
  if (a.size() != b.size()) {
    throw Error("distance: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()) + ")");
  }
  double aa = 0, bb = 0, ab = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i], y = b[i];
    aa += x * x;
    bb += y * y;
    ab += x * y;
  }
  if (!(aa > 0.0) || !(bb > 0.0)) throw Error("distance: zero-norm embedding");

  switch (k) {
    case MetricKind::cosine: {
      const double d = 1.0 - ab / (std::sqrt(aa) * std::sqrt(bb));
      return std::clamp(d, 0.0, 2.0);
    }
    case MetricKind::euclidean: {
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - b[i];
        s += d * d;
      }
      return std::sqrt(s);
    }
    case MetricKind::euclidean_l2: {
      const double na = std::sqrt(aa), nb = std::sqrt(bb);
      double s = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] / na - b[i] / nb;
        s += d * d;
      }
      return std::sqrt(s);
    }
  }
  throw Error("distance: unknown metric");
}

double distance(const Embedding& a, const Embedding& b, MetricKind k) {
  return distance(std::span<const float>(a.vector), std::span<const float>(b.vector), k);
}

SourceAggregate SourceAggregate::unscorable(std::string source, std::string model,
                                            MetricKind metric, ComparisonMode mode,
                                            std::size_t n_unscorable) {
  SourceAggregate agg;
  agg.source_name = std::move(source);
  agg.model_id = std::move(model);
  agg.metric = metric;
  agg.mode = mode;
  agg.n_unscorable = n_unscorable;
  return agg;
}

namespace {

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

// Two-pass population statistics, shifted by the first sample so constant
// input yields exactly that value and a zero std.
MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  const double n = static_cast<double>(xs.size());
  const double x0 = xs.front();
  double sum = 0;
  for (double x : xs) sum += x - x0;
  r.mean = x0 + sum / n;
  double ss = 0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.std = std::sqrt(ss / n);
  return r;
}

void require_scorable(const EmbeddingSet& set) {
  if (set.embeddings.size() < 2) {
    throw UnscorableVideo(set.video_id + " [" + set.model_id + "]: " +
                          std::to_string(set.embeddings.size()) +
                          " valid frame(s), need at least 2");
  }
}

std::size_t position_of(const EmbeddingSet& set, std::size_t frame_index) {
  const auto it = std::lower_bound(
      set.embeddings.begin(), set.embeddings.end(), frame_index,
      [](const Embedding& e, std::size_t f) { return e.frame_index < f; });
  if (it == set.embeddings.end() || it->frame_index != frame_index) {
    throw Error(set.video_id + ": frame " + std::to_string(frame_index) +
                " is not a valid (face-bearing) frame");
  }
  return static_cast<std::size_t>(it - set.embeddings.begin());
}

}  // namespace

std::size_t select_reference(const EmbeddingSet& set, const ReferenceChoice& choice,
                             MetricKind metric) {
  if (set.embeddings.empty()) throw UnscorableVideo(set.video_id + ": no valid frames");
  switch (choice.kind) {
    case ReferenceChoice::Kind::first_valid:
      return set.embeddings.front().frame_index;
    case ReferenceChoice::Kind::index:
      return set.embeddings[position_of(set, choice.index)].frame_index;
    case ReferenceChoice::Kind::medoid: {
      const auto& es = set.embeddings;
      std::size_t best = 0;
      double best_mean = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < es.size(); ++i) {
        double sum = 0;
        for (std::size_t j = 0; j < es.size(); ++j) {
          if (j != i) sum += distance(es[i], es[j], metric);
        }
        const double m = es.size() > 1 ? sum / static_cast<double>(es.size() - 1) : 0.0;
        if (m < best_mean) {
          best_mean = m;
          best = i;
        }
      }
      return es[best].frame_index;
    }
  }
  throw Error("select_reference: unknown reference kind");
}

ConsistencyScore score_mode1(const EmbeddingSet& set, std::size_t reference_frame,
                             MetricKind metric, bool include_self) {
  require_scorable(set);
  const std::size_t ref = position_of(set, reference_frame);
  std::vector<double> d;
  d.reserve(set.embeddings.size());
  for (std::size_t i = 0; i < set.embeddings.size(); ++i) {
    if (i == ref && !include_self) continue;
    d.push_back(distance(set.embeddings[i], set.embeddings[ref], metric));
  }
  const auto s = mean_std(d);
  return {set.video_id, set.model_id, metric, ComparisonMode::mode1,
          s.mean,       s.std,        d.size(), reference_frame};
}

std::vector<std::pair<std::size_t, std::size_t>> sample_pairs(std::size_t n_valid,
                                                              std::size_t num_pairs,
                                                              std::uint64_t seed,
                                                              const std::string& video_id) {
  if (n_valid < 2) {
    throw UnscorableVideo(video_id + ": pair sampling needs at least 2 valid frames");
  }
  Xoshiro256 rng(video_stream_seed(seed, video_id));
  const std::uint64_t n = n_valid;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(num_pairs);
  for (std::size_t p = 0; p < num_pairs; ++p) {
    const auto i = static_cast<std::size_t>(rng.next() % n);
    auto j = static_cast<std::size_t>(rng.next() % n);
    while (j == i) j = static_cast<std::size_t>(rng.next() % n);
    pairs.emplace_back(i, j);
  }
  return pairs;
}

ConsistencyScore score_mode2(const EmbeddingSet& set, const Mode2Config& cfg,
                             std::uint64_t seed, MetricKind metric) {
  require_scorable(set);
  if (cfg.num_pairs < 1) throw Error("mode2: num_pairs must be >= 1");
  const auto pairs = sample_pairs(set.embeddings.size(), cfg.num_pairs, seed, set.video_id);
  std::vector<double> d;
  d.reserve(pairs.size());
  for (const auto& [i, j] : pairs) {
    d.push_back(distance(set.embeddings[i], set.embeddings[j], metric));
  }
  const auto s = mean_std(d);
  return {set.video_id, set.model_id, metric, ComparisonMode::mode2,
          s.mean,       s.std,        d.size(), std::nullopt};
}

SourceAggregate aggregate_source(const std::string& source_name,
                                 std::span<const ConsistencyScore> scores,
                                 std::size_t n_unscorable) {
  if (scores.empty()) {
    throw UnscorableVideo("source '" + source_name + "' has no scorable videos");
  }
  SourceAggregate agg;
  agg.source_name = source_name;
  agg.model_id = scores.front().model_id;
  agg.metric = scores.front().metric;
  agg.mode = scores.front().mode;
  agg.n_unscorable = n_unscorable;
  std::vector<double> means;
  for (const auto& s : scores) {
    if (s.model_id != agg.model_id || s.metric != agg.metric || s.mode != agg.mode) {
      throw Error("aggregate_source: scores mix models, metrics or modes");
    }
    means.push_back(s.mean);
  }
  const auto ms = mean_std(means);
  agg.mean_of_video_means = ms.mean;
  agg.std_of_video_means = ms.std;
  agg.per_video.assign(scores.begin(), scores.end());
  return agg;
}

}  // namespace fcb
