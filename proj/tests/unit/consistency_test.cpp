#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>
#include <set>

#include "fcb/consistency.hpp"
#include "fcb/error.hpp"
#include "test_support.hpp"

namespace fcb {
namespace {

using testing::kAllMetrics;
using testing::set_of;

TEST(Distance, Examples) {
  const std::vector<float> a{1, 0}, b{0, 1}, c{2, 0}, d{-1, 0};
  EXPECT_DOUBLE_EQ(distance(a, b, MetricKind::cosine), 1.0);
  EXPECT_DOUBLE_EQ(distance(a, c, MetricKind::cosine), 0.0);
  EXPECT_DOUBLE_EQ(distance(a, d, MetricKind::cosine), 2.0);
  EXPECT_DOUBLE_EQ(distance(a, c, MetricKind::euclidean), 1.0);
  EXPECT_DOUBLE_EQ(distance(a, c, MetricKind::euclidean_l2), 0.0);
  EXPECT_NEAR(distance(a, b, MetricKind::euclidean_l2), std::sqrt(2.0), 1e-15);
  const std::vector<float> p{3, 4}, q{0, 0.5f};
  EXPECT_NEAR(distance(p, q, MetricKind::euclidean), std::sqrt(9.0 + 12.25), 1e-12);
}

TEST(Distance, ZeroNormAndDimensionMismatchThrow) {
  const std::vector<float> z{0, 0}, a{1, 0}, e{1, 0, 0};
  for (auto k : kAllMetrics) {
    EXPECT_THROW(distance(a, e, k), Error);
  }
  EXPECT_THROW(distance(z, a, MetricKind::cosine), Error);
  EXPECT_THROW(distance(a, z, MetricKind::euclidean_l2), Error);
}

TEST(Distance, MatchesLongDoubleOracle) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::size_t> dim(2, 512);
  for (int t = 0; t < 300; ++t) {
    const auto n = dim(rng);
    const auto a = testing::random_vector(rng, n), b = testing::random_vector(rng, n);
    for (auto k : kAllMetrics) {
      EXPECT_NEAR(distance(a, b, k), double(testing::oracle_distance(a, b, k)), 1e-9);
    }
  }
}

TEST(Distance, Properties) {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::size_t> dim(2, 64);
  std::uniform_real_distribution<float> scale(0.1f, 10.0f);
  for (int t = 0; t < 300; ++t) {
    const auto n = dim(rng);
    const auto a = testing::random_vector(rng, n), b = testing::random_vector(rng, n);
    for (auto k : kAllMetrics) {
      EXPECT_NEAR(distance(a, b, k), distance(b, a, k), 1e-12);
      EXPECT_GE(distance(a, b, k), 0.0);
    }
    const double c = distance(a, b, MetricKind::cosine);
    EXPECT_LE(c, 2.0);
    const double l2 = distance(a, b, MetricKind::euclidean_l2);
    EXPECT_NEAR(l2 * l2, 2.0 * c, 1e-7);
    auto as = a;
    const float f = scale(rng);
    for (auto& x : as) x *= f;
    EXPECT_NEAR(distance(as, b, MetricKind::cosine), c, 1e-7);
    EXPECT_NEAR(distance(as, b, MetricKind::euclidean_l2), l2, 1e-7);
  }
}

TEST(Reference, FirstValidIndexAndMedoid) {
  auto s = set_of({{1, 0}, {1, 0.1f}, {1, 0.2f}, {0, 1}});
  s.embeddings[0].frame_index = 3;
  s.embeddings[1].frame_index = 5;
  s.embeddings[2].frame_index = 8;
  s.embeddings[3].frame_index = 9;
  EXPECT_EQ(select_reference(s, ReferenceChoice::first_valid(), MetricKind::cosine), 3u);
  EXPECT_EQ(select_reference(s, ReferenceChoice::at(8), MetricKind::cosine), 8u);
  EXPECT_THROW(select_reference(s, ReferenceChoice::at(4), MetricKind::cosine), Error);
  EXPECT_EQ(select_reference(s, ReferenceChoice::medoid(), MetricKind::euclidean), 5u);
}

TEST(Reference, MedoidTieGoesToLowestFrame) {
  auto s = set_of({{1, 0}, {0, 1}});
  EXPECT_EQ(select_reference(s, ReferenceChoice::medoid(), MetricKind::cosine), 0u);
}

TEST(Reference, MedoidMatchesBruteForce) {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 50; ++t) {
    const auto s = testing::random_set(rng, 2 + t % 12, 6);
    for (auto k : kAllMetrics) {
      std::size_t best = 0;
      long double best_sum = 1e300L;
      for (std::size_t i = 0; i < s.embeddings.size(); ++i) {
        long double sum = 0;
        for (std::size_t j = 0; j < s.embeddings.size(); ++j) {
          if (i != j) sum += testing::oracle_distance(s.embeddings[i].vector, s.embeddings[j].vector, k);
        }
        if (sum < best_sum - 1e-12L) {
          best_sum = sum;
          best = i;
        }
      }
      EXPECT_EQ(select_reference(s, ReferenceChoice::medoid(), k), s.embeddings[best].frame_index);
    }
  }
}

TEST(Mode1, WorkedExample) {
  // Reference (1,0); others at 90 and 180 degrees.
  const auto s = set_of({{1, 0}, {0, 1}, {-1, 0}});
  const auto r = score_mode1(s, 0, MetricKind::cosine);
  EXPECT_DOUBLE_EQ(r.mean, 1.5);
  EXPECT_DOUBLE_EQ(r.std, 0.5);
  EXPECT_EQ(r.n_comparisons, 2u);
  EXPECT_EQ(r.reference_index, 0u);
  EXPECT_EQ(r.mode, ComparisonMode::mode1);
}

TEST(Mode1, IncludeSelfAddsZero) {
  const auto s = set_of({{1, 0}, {0, 1}, {-1, 0}});
  const auto r = score_mode1(s, 0, MetricKind::cosine, true);
  EXPECT_EQ(r.n_comparisons, 3u);
  EXPECT_DOUBLE_EQ(r.mean, 1.0);
}

TEST(Mode1, IdenticalFramesScoreZero) {
  const auto s = set_of({{0.3f, 0.4f, 0.5f}, {0.3f, 0.4f, 0.5f}, {0.3f, 0.4f, 0.5f}});
  for (auto k : kAllMetrics) {
    const auto r = score_mode1(s, 1, k);
    EXPECT_EQ(r.mean, 0.0);
    EXPECT_EQ(r.std, 0.0);
  }
}

TEST(Mode1, FewerThanTwoIsUnscorable) {
  EXPECT_THROW(score_mode1(set_of({{1, 0}}), 0, MetricKind::cosine), UnscorableVideo);
  EXPECT_THROW(score_mode2(set_of({{1, 0}}), {}, 0, MetricKind::cosine), UnscorableVideo);
  EXPECT_THROW(score_mode2(set_of({}), {}, 0, MetricKind::cosine), UnscorableVideo);
}

TEST(Mode1, MatchesOracleOnRandomSets) {
  std::mt19937_64 rng(13);
  for (int t = 0; t < 100; ++t) {
    const auto s = testing::random_set(rng, 2 + t % 19, 1 + t % 16);
    const auto ref = s.embeddings[t % s.embeddings.size()].frame_index;
    for (auto k : kAllMetrics) {
      const auto r = score_mode1(s, ref, k);
      const auto o = testing::oracle_mode1(s, ref, k);
      EXPECT_NEAR(r.mean, o.mean, 1e-12);
      EXPECT_NEAR(r.std, o.std, 1e-12);
      EXPECT_EQ(r.n_comparisons, s.embeddings.size() - 1);
    }
  }
}

TEST(SamplePairs, GoldenValues) {
  using P = std::vector<std::pair<std::size_t, std::size_t>>;
  EXPECT_EQ(sample_pairs(10, 3, 0, "v1"), (P{{4, 8}, {3, 9}, {8, 4}}));
  EXPECT_EQ(sample_pairs(7, 5, 42, "real/a.mp4"), (P{{0, 1}, {6, 2}, {5, 0}, {1, 0}, {5, 4}}));
}

TEST(SamplePairs, Properties) {
  for (std::size_t n = 2; n < 30; ++n) {
    const auto p = sample_pairs(n, 200, n * 31, "vid" + std::to_string(n));
    ASSERT_EQ(p.size(), 200u);
    for (auto [i, j] : p) {
      EXPECT_LT(i, n);
      EXPECT_LT(j, n);
      EXPECT_NE(i, j);
    }
    EXPECT_EQ(p, sample_pairs(n, 200, n * 31, "vid" + std::to_string(n)));
  }
  EXPECT_NE(sample_pairs(50, 20, 0, "a"), sample_pairs(50, 20, 1, "a"));
  EXPECT_NE(sample_pairs(50, 20, 0, "a"), sample_pairs(50, 20, 0, "b"));
}

TEST(SamplePairs, TwoFramesAlwaysSamePair) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    for (auto [i, j] : sample_pairs(2, 50, seed, "x")) {
      EXPECT_EQ(i + j, 1u);
    }
  }
}

TEST(Mode2, MatchesOracleReplay) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 50; ++t) {
    const auto s = testing::random_set(rng, 2 + t % 19, 8, "video" + std::to_string(t));
    const Mode2Config cfg{static_cast<std::size_t>(1 + t * 7)};
    for (auto k : kAllMetrics) {
      const auto r = score_mode2(s, cfg, 99, k);
      const auto o = testing::oracle_pairs(s, sample_pairs(s.embeddings.size(), cfg.num_pairs, 99, s.video_id), k);
      EXPECT_NEAR(r.mean, o.mean, 1e-12);
      EXPECT_NEAR(r.std, o.std, 1e-12);
      EXPECT_EQ(r.n_comparisons, cfg.num_pairs);
      EXPECT_FALSE(r.reference_index.has_value());
    }
  }
}

TEST(Mode2, TwoFrameVideoEqualsTheDistance) {
  const auto s = set_of({{1, 0.2f}, {0.1f, 1}});
  for (auto k : kAllMetrics) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto r = score_mode2(s, {}, seed, k);
      EXPECT_NEAR(r.mean, distance(s.embeddings[0], s.embeddings[1], k), 1e-15);
      EXPECT_EQ(r.std, 0.0);
    }
  }
}

TEST(Aggregate, UnweightedMeanOfMeans) {
  std::vector<ConsistencyScore> v(3);
  v[0].mean = 0.1;
  v[0].n_comparisons = 100;
  v[1].mean = 0.2;
  v[1].n_comparisons = 1;
  v[2].mean = 0.6;
  v[2].n_comparisons = 5;
  const auto a = aggregate_source("gen", v, 2);
  ASSERT_TRUE(a.mean_of_video_means);
  EXPECT_NEAR(*a.mean_of_video_means, 0.3, 1e-15);
  EXPECT_NEAR(a.std_of_video_means, std::sqrt((0.04 + 0.01 + 0.09) / 3), 1e-15);
  EXPECT_EQ(a.n_unscorable, 2u);
  EXPECT_EQ(a.per_video.size(), 3u);
  EXPECT_THROW(aggregate_source("gen", std::span<const ConsistencyScore>{}), UnscorableVideo);
}

TEST(Aggregate, UnscorableMarker) {
  const auto a = SourceAggregate::unscorable("s", "m", MetricKind::cosine, ComparisonMode::mode2, 3);
  EXPECT_FALSE(a.mean_of_video_means);
  EXPECT_EQ(a.n_unscorable, 3u);
}

}  // namespace
}  // namespace fcb
