#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcb/consistency.hpp"
#include "fcb/embed.hpp"
#include "fcb/manifest.hpp"
#include "fcb/registry.hpp"
#include "fcb/report.hpp"

namespace fcb {

struct RunSummary {
  std::size_t videos_processed = 0;
  std::size_t frames_decoded = 0;
  std::size_t frames_examined = 0;
  std::size_t frames_embedded = 0;
  std::size_t frames_skipped = 0;  // no face
  std::size_t frames_dropped = 0;  // degenerate embedding
  std::size_t cache_hits = 0;
  std::size_t cache_misses = 0;
  std::size_t cache_corrupt = 0;
  std::size_t inference_calls = 0;
  std::size_t alignment_fallbacks = 0;
  std::vector<std::pair<std::string, double>> stage_seconds;
  std::vector<std::string> warnings;
  std::vector<std::string> failures;

  void merge(const RunSummary& other);
  std::string to_text() const;
};

// Upstream settings that change embeddings; hashed into cache keys.
std::uint64_t pipeline_param_hash(const Manifest& m, const ModelSpec& spec,
                                  const AlignmentTemplate& tpl, const std::string& video_id);
std::uint64_t pipeline_param_hash(const Manifest& m, const std::string& model_fingerprint,
                                  const AlignmentTemplate& tpl, const std::string& video_id);

// Model identity for cache keys: shape, preprocessing and weight bytes.
std::string model_fingerprint(const ModelSpec& spec);

struct ExtractOptions {
  std::vector<std::string> models;  // empty: every manifest model
  std::size_t jobs = 1;
  std::filesystem::path cache_dir;  // empty: no cache
};

struct ExtractResult {
  // Keyed by (video_id, model_id); a missing key means that pair failed.
  std::map<std::pair<std::string, std::string>, EmbeddingSet> sets;
  std::map<std::pair<std::string, std::string>, std::string> failures;
  RunSummary summary;
};

// Decode, gate, crop and embed every video for every model, reusing cache
// entries. Per-video failures are collected; setup problems (unknown model,
// missing weights or detector model) throw before any decoding.
ExtractResult run_extract(const Manifest& m, const ModelRegistry& registry,
                          const ExtractOptions& opts);

enum class ScoreStatus { ok, unscorable, failed };

struct ScoreRecord {
  std::string video_id;
  std::string source;
  std::string model_id;
  ComparisonMode mode = ComparisonMode::mode1;
  MetricKind metric = MetricKind::cosine;
  ScoreStatus status = ScoreStatus::ok;
  std::optional<ConsistencyScore> score;
  std::string message;
  std::size_t valid_frames = 0;
  std::size_t total_frames = 0;
  std::size_t skipped_frames = 0;
  std::size_t dropped_frames = 0;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

struct ScoreSource {
  std::string name;
  SourceKind kind = SourceKind::generated;
  std::vector<std::string> video_ids;

  friend bool operator==(const ScoreSource&, const ScoreSource&) = default;
};

struct ScoreFile {
  RunMetadata metadata;
  std::vector<ScoreSource> sources;
  std::vector<std::string> models;
  std::vector<ScoreRecord> records;

  friend bool operator==(const ScoreFile&, const ScoreFile&) = default;
};

struct ScoreOptions {
  std::vector<ComparisonMode> modes{ComparisonMode::mode1, ComparisonMode::mode2};
  bool include_self = false;
};

// Scores every (video, model, mode) in manifest order; the metric,
// reference, pair count and seed come from the manifest.
ScoreFile run_score(const Manifest& m, const ModelRegistry& registry,
                    const ExtractResult& extracted, const ScoreOptions& opts,
                    RunSummary* summary = nullptr);

RunMetadata run_metadata(const Manifest& m, const ModelRegistry& registry, bool include_self);

std::string serialize_score_file(const ScoreFile& f);
ScoreFile parse_score_file(const std::string& text, const std::string& origin = "<scores>");
ScoreFile read_score_file(const std::filesystem::path& path);

// Concatenates score files; sources and models keep first-seen order.
// Throws ReportError on conflicting duplicate records or metadata.
ScoreFile merge_score_files(const std::vector<ScoreFile>& files);

// Per-source aggregates for one (mode, metric), then the report grid.
std::vector<SourceAggregate> aggregate_scores(const ScoreFile& f, ComparisonMode mode,
                                              MetricKind metric);
std::vector<BenchmarkReport> build_reports(const ScoreFile& f);

struct ReportOutputs {
  std::vector<std::filesystem::path> written;
};

// Writes report_<mode>_<metric>.<ext> per requested format and
// plot_<metric>.csv when both modes are present.
ReportOutputs write_reports(const ScoreFile& f, const std::vector<TableFormat>& formats,
                            const std::filesystem::path& out_dir);

void write_file_atomic(const std::filesystem::path& path, const std::string& bytes);

}  // namespace fcb
