#pragma once

// Two published 5x6 result grids (mode1, mode2; cosine) used as report
// fixtures. '*' cells are the expected bold set.

#include <array>
#include <string>
#include <vector>

#include "fcb/consistency.hpp"
#include "fcb/report.hpp"

namespace fcb::testing {

inline const std::vector<std::string> kGridModels{"vggface", "facenet", "facenet512",
                                                   "arcface", "sface",   "ghostfacenet"};
inline const std::vector<SourceInfo> kGridSources{{"Real Video", SourceKind::real},
                                                  {"Runway Gen-3", SourceKind::generated},
                                                  {"HunyuanVideo", SourceKind::generated},
                                                  {"Vchitect-2.0", SourceKind::generated},
                                                  {"CogVideoX", SourceKind::generated}};

using GridValues = std::array<std::array<double, 6>, 5>;

inline constexpr GridValues kGridMode1{{
    {0.0636, 0.0650, 0.0514, 0.0843, 0.1267, 0.1391},
    {0.2827, 0.1408, 0.1511, 0.2346, 0.1584, 0.2668},
    {0.2542, 0.1784, 0.2229, 0.1734, 0.2746, 0.2946},
    {0.4042, 0.3295, 0.2951, 0.4843, 0.4554, 0.5215},
    {0.3294, 0.2412, 0.1813, 0.3005, 0.3310, 0.3541},
}};

inline constexpr GridValues kGridMode2{{
    {0.0798, 0.0805, 0.0498, 0.1027, 0.1119, 0.1308},
    {0.2493, 0.1987, 0.2319, 0.2441, 0.1641, 0.3441},
    {0.2655, 0.1955, 0.2307, 0.1896, 0.2842, 0.3161},
    {0.5255, 0.3447, 0.1962, 0.4997, 0.4798, 0.5266},
    {0.5101, 0.3744, 0.4162, 0.3215, 0.4469, 0.5213},
}};

using CellSet = std::set<std::pair<std::string, std::string>>;

inline const CellSet kBoldMode1{{"Runway Gen-3", "facenet"},    {"Runway Gen-3", "facenet512"},
                                {"Runway Gen-3", "sface"},      {"Runway Gen-3", "ghostfacenet"},
                                {"HunyuanVideo", "vggface"},    {"HunyuanVideo", "arcface"}};

inline const CellSet kBoldMode2{{"Runway Gen-3", "vggface"},  {"Runway Gen-3", "sface"},
                                {"HunyuanVideo", "facenet"},  {"HunyuanVideo", "arcface"},
                                {"HunyuanVideo", "ghostfacenet"}, {"Vchitect-2.0", "facenet512"}};

inline std::vector<SourceAggregate> grid_aggregates(const GridValues& g, ComparisonMode mode) {
  std::vector<SourceAggregate> out;
  for (std::size_t s = 0; s < kGridSources.size(); ++s) {
    for (std::size_t m = 0; m < kGridModels.size(); ++m) {
      SourceAggregate a;
      a.source_name = kGridSources[s].name;
      a.model_id = kGridModels[m];
      a.metric = MetricKind::cosine;
      a.mode = mode;
      a.mean_of_video_means = g[s][m];
      a.per_video.resize(10);
      out.push_back(a);
    }
  }
  return out;
}

inline BenchmarkReport grid_report(const GridValues& g, ComparisonMode mode) {
  const auto aggs = grid_aggregates(g, mode);
  return build_report(aggs, kGridSources, kGridModels, RunMetadata{});
}

}  // namespace fcb::testing
