// fcb: face consistency benchmark driver.
//
//   fcb extract --manifest m.yaml        populate the embedding cache
//   fcb score   --manifest m.yaml        per-video scores -> <out>/scores.json
//   fcb report  [scores.json ...]        tables + plot data
//   fcb run     --manifest m.yaml        all three
//
// Exit codes: 0 success, 2 partial (some videos failed), 1 fatal.
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fcb/error.hpp"
#include "fcb/manifest.hpp"
#include "fcb/pipeline.hpp"
#include "fcb/registry.hpp"
#include "fcb/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFatal = 1;
constexpr int kExitPartial = 2;

struct Options {
  std::string manifest;
  std::string models;
  std::string metric;
  std::string mode = "both";
  std::optional<std::size_t> pairs;
  std::optional<std::uint64_t> seed;
  std::string reference;
  std::optional<int> max_dim;
  std::optional<std::size_t> stride;
  std::size_t jobs = 1;
  std::string cache_dir;
  std::string out;
  std::string format = "all";
  bool include_self = false;
  std::vector<std::string> score_files;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct Context {
  fcb::Manifest manifest;
  fcb::ModelRegistry registry;
  fs::path cache_dir;
};

Context load_context(const Options& o) {
  if (o.manifest.empty()) throw fcb::Error("--manifest is required");
  Context ctx{fcb::load_manifest(o.manifest), {}, {}};
  auto& m = ctx.manifest;
  if (!o.metric.empty()) m.metric = fcb::parse_metric(o.metric);
  if (o.pairs) m.mode2.num_pairs = *o.pairs;
  if (o.seed) m.seed = *o.seed;
  if (!o.reference.empty()) m.mode1.reference = fcb::parse_reference(o.reference);
  if (o.max_dim) m.max_dim = *o.max_dim;
  if (o.stride) m.stride = *o.stride;
  if (!o.out.empty()) m.output_dir = o.out;
  if (!o.models.empty()) m.models = split_csv(o.models);

  ctx.registry = fcb::ModelRegistry::load(m.registry);
  fcb::validate_against_registry(m, ctx.registry);

  if (!o.cache_dir.empty()) {
    ctx.cache_dir = o.cache_dir;
  } else if (const char* env = std::getenv("FCB_CACHE_DIR"); env && *env) {
    ctx.cache_dir = env;
  } else {
    ctx.cache_dir = m.output_dir / "cache";
  }
  return ctx;
}

std::vector<fcb::ComparisonMode> parse_modes(const std::string& s) {
  if (s == "1") return {fcb::ComparisonMode::mode1};
  if (s == "2") return {fcb::ComparisonMode::mode2};
  if (s == "both") return {fcb::ComparisonMode::mode1, fcb::ComparisonMode::mode2};
  throw fcb::Error("--mode must be 1, 2 or both");
}

std::vector<fcb::TableFormat> parse_formats(const std::string& s) {
  if (s == "all") {
    return {fcb::TableFormat::plain, fcb::TableFormat::markdown, fcb::TableFormat::csv,
            fcb::TableFormat::json};
  }
  std::vector<fcb::TableFormat> out;
  for (const auto& f : split_csv(s)) out.push_back(fcb::parse_table_format(f));
  return out;
}

fcb::ExtractResult extract(const Context& ctx, const Options& o) {
  fcb::ExtractOptions eo;
  eo.jobs = o.jobs;
  eo.cache_dir = ctx.cache_dir;
  std::cerr << "fcb: extracting embeddings (" << ctx.manifest.models.size() << " model(s), "
            << o.jobs << " job(s), cache " << ctx.cache_dir.string() << ")\n";
  return fcb::run_extract(ctx.manifest, ctx.registry, eo);
}

bool has_failed_records(const fcb::ScoreFile& f) {
  for (const auto& r : f.records) {
    if (r.status == fcb::ScoreStatus::failed) return true;
  }
  return false;
}

int cmd_extract(const Options& o) {
  const auto ctx = load_context(o);
  const auto res = extract(ctx, o);
  std::cerr << res.summary.to_text();
  return res.failures.empty() ? kExitOk : kExitPartial;
}

fcb::ScoreFile score(const Context& ctx, const Options& o, fcb::RunSummary& summary) {
  auto res = extract(ctx, o);
  summary.merge(res.summary);
  fcb::ScoreOptions so;
  so.modes = parse_modes(o.mode);
  so.include_self = o.include_self;
  auto file = fcb::run_score(ctx.manifest, ctx.registry, res, so, &summary);
  const auto path = ctx.manifest.output_dir / "scores.json";
  fcb::write_file_atomic(path, fcb::serialize_score_file(file));
  std::cerr << "fcb: wrote " << path.string() << "\n";
  return file;
}

int cmd_score(const Options& o) {
  const auto ctx = load_context(o);
  fcb::RunSummary summary;
  const auto file = score(ctx, o, summary);
  std::cerr << summary.to_text();
  return has_failed_records(file) ? kExitPartial : kExitOk;
}

int write_reports(const fcb::ScoreFile& file, const Options& o, const fs::path& out_dir) {
  const auto outputs = fcb::write_reports(file, parse_formats(o.format), out_dir);
  for (const auto& p : outputs.written) std::cerr << "fcb: wrote " << p.string() << "\n";
  return has_failed_records(file) ? kExitPartial : kExitOk;
}

int cmd_report(const Options& o) {
  std::vector<fs::path> inputs(o.score_files.begin(), o.score_files.end());
  fs::path out_dir = o.out;
  if (inputs.empty() || out_dir.empty()) {
    if (o.manifest.empty() && out_dir.empty()) {
      throw fcb::Error("report needs score files and --out, or --manifest");
    }
    if (out_dir.empty()) out_dir = fcb::load_manifest(o.manifest).output_dir;
    if (inputs.empty()) inputs.push_back(out_dir / "scores.json");
  }
  std::vector<fcb::ScoreFile> files;
  for (const auto& p : inputs) files.push_back(fcb::read_score_file(p));
  return write_reports(fcb::merge_score_files(files), o, out_dir);
}

int cmd_run(const Options& o) {
  const auto ctx = load_context(o);
  fcb::RunSummary summary;
  const auto file = score(ctx, o, summary);
  const int rc = write_reports(file, o, ctx.manifest.output_dir);
  std::cerr << summary.to_text();
  return rc;
}

void add_pipeline_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--manifest", o.manifest, "Run manifest (YAML)")->required();
  cmd->add_option("--models", o.models, "Comma-separated subset of model ids");
  cmd->add_option("--max-dim", o.max_dim, "Longest frame side after downscaling")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--stride", o.stride, "Decode every n-th frame")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", o.jobs, "Parallel workers")->check(CLI::PositiveNumber);
  cmd->add_option("--cache-dir", o.cache_dir, "Embedding cache (default $FCB_CACHE_DIR or <out>/cache)");
  cmd->add_option("--out", o.out, "Output directory (overrides manifest output_dir)");
}

void add_score_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--metric", o.metric, "cosine | euclidean | euclidean_l2")
      ->check(CLI::IsMember({"cosine", "euclidean", "euclidean_l2"}));
  cmd->add_option("--mode", o.mode, "1 | 2 | both")->check(CLI::IsMember({"1", "2", "both"}));
  cmd->add_option("--pairs", o.pairs, "Random pairs per video in mode 2 (default 200)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", o.seed, "64-bit sampling seed");
  cmd->add_option("--reference", o.reference, "first_valid | index:<k> | medoid");
  cmd->add_flag("--include-self", o.include_self,
                "Count the reference frame's zero self-distance in mode 1");
}

void add_format_flag(CLI::App* cmd, Options& o) {
  cmd->add_option("--format", o.format, "plain | markdown | csv | json | all (comma list ok)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Face consistency benchmark: per-video identity consistency of faces in videos"};
  app.require_subcommand(1);
  Options o;

  auto* ex = app.add_subcommand("extract", "Decode, detect, crop and embed into the cache");
  add_pipeline_flags(ex, o);

  auto* sc = app.add_subcommand("score", "Score every video (runs extract on cache misses)");
  add_pipeline_flags(sc, o);
  add_score_flags(sc, o);

  auto* rp = app.add_subcommand("report", "Render benchmark tables and plot data from score files");
  rp->add_option("scores", o.score_files, "Score files (default <out>/scores.json)");
  rp->add_option("--manifest", o.manifest, "Manifest, to locate output_dir");
  rp->add_option("--out", o.out, "Output directory");
  add_format_flag(rp, o);

  auto* run = app.add_subcommand("run", "extract + score + report");
  add_pipeline_flags(run, o);
  add_score_flags(run, o);
  add_format_flag(run, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; usage errors are fatal.
    return app.exit(e) == 0 ? kExitOk : kExitFatal;
  }

  try {
    if (ex->parsed()) return cmd_extract(o);
    if (sc->parsed()) return cmd_score(o);
    if (rp->parsed()) return cmd_report(o);
    if (run->parsed()) return cmd_run(o);
  } catch (const std::exception& e) {
    std::cerr << "fcb: error: " << e.what() << "\n";
    return kExitFatal;
  }
  return kExitFatal;
}
