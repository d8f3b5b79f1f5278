#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fcb/consistency.hpp"
#include "fcb/manifest.hpp"
#include "fcb/types.hpp"

namespace fcb {

struct ReportCell {
  std::optional<double> mean;  // nullopt renders as "n/a"
  double std_across_videos = 0.0;
  std::size_t n_videos = 0;
  std::size_t n_unscorable = 0;

  friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct ReportRow {
  std::string source;
  SourceKind kind = SourceKind::generated;
  std::map<std::string, ReportCell> cells;  // model id -> cell

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct RunMetadata {
  std::uint64_t seed = 0;
  std::size_t num_pairs = 200;
  int max_dim = 720;
  std::size_t stride = 1;
  std::string reference = "first_valid";
  bool include_self = false;
  std::string registry_hash;
  std::string toolkit_version{kToolkitVersion};

  friend bool operator==(const RunMetadata&, const RunMetadata&) = default;
};

struct SourceInfo {
  std::string name;
  SourceKind kind = SourceKind::generated;
};

struct BenchmarkReport {
  ComparisonMode mode = ComparisonMode::mode1;
  MetricKind metric = MetricKind::cosine;
  std::vector<std::string> models;  // column order
  std::vector<ReportRow> rows;      // real sources first, then generated
  std::set<std::pair<std::string, std::string>> bold_set;  // (source, model)
  RunMetadata metadata;

  friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

enum class TableFormat { plain, markdown, csv, json };

TableFormat parse_table_format(std::string_view s);
std::string_view file_extension(TableFormat f) noexcept;

// Fixed four decimals, ties to even on the exact binary value.
std::string format_4dp(double v);

/// Lays aggregates out as a source x model grid for one (mode, metric).
///
/// Rows keep `sources` order with real sources moved first. Every
/// (source, model) cell must have an aggregate (an unscorable marker counts).
/// For each model column the bold set holds every generated row that
/// attains the column minimum; real rows are never bold.
BenchmarkReport build_report(std::span<const SourceAggregate> aggregates,
                             std::span<const SourceInfo> sources,
                             std::span<const std::string> models, const RunMetadata& meta);

BenchmarkReport build_report(std::span<const SourceAggregate> aggregates, const Manifest& manifest,
                             const RunMetadata& meta);

std::set<std::pair<std::string, std::string>> compute_bold_set(
    const std::vector<ReportRow>& rows, const std::vector<std::string>& models);

std::string render_table(const BenchmarkReport& r, TableFormat fmt);

// Inverse of render_table(r, TableFormat::json).
BenchmarkReport parse_report_json(const std::string& text);

// Long-format CSV: mode,metric,source,kind,model,mean. One record per
// (mode, source, model), mode1 block first. Throws ReportError when the two
// grids differ or there is no generated source.
std::string emit_plot_data(const BenchmarkReport& mode1, const BenchmarkReport& mode2);

}  // namespace fcb
