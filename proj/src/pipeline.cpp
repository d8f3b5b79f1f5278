#include "fcb/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "fcb/cache.hpp"
#include "fcb/error.hpp"
#include "fcb/facegate.hpp"
#include "fcb/frameio.hpp"
#include "fcb/hash.hpp"

namespace fcb {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

void RunSummary::merge(const RunSummary& o) {
  videos_processed += o.videos_processed;
  frames_decoded += o.frames_decoded;
  frames_examined += o.frames_examined;
  frames_embedded += o.frames_embedded;
  frames_skipped += o.frames_skipped;
  frames_dropped += o.frames_dropped;
  cache_hits += o.cache_hits;
  cache_misses += o.cache_misses;
  cache_corrupt += o.cache_corrupt;
  inference_calls += o.inference_calls;
  alignment_fallbacks += o.alignment_fallbacks;
  stage_seconds.insert(stage_seconds.end(), o.stage_seconds.begin(), o.stage_seconds.end());
  warnings.insert(warnings.end(), o.warnings.begin(), o.warnings.end());
  failures.insert(failures.end(), o.failures.begin(), o.failures.end());
}

std::string RunSummary::to_text() const {
  std::ostringstream os;
  os << "videos processed:   " << videos_processed << "\n"
     << "frames decoded:     " << frames_decoded << "\n"
     << "frames examined:    " << frames_examined << " (embedded " << frames_embedded
     << ", skipped/no face " << frames_skipped << ", dropped/degenerate " << frames_dropped
     << ")\n"
     << "cache:              " << cache_hits << " hit(s), " << cache_misses << " miss(es), "
     << cache_corrupt << " corrupt\n"
     << "inference calls:    " << inference_calls << "\n";
  if (alignment_fallbacks) os << "alignment fallbacks: " << alignment_fallbacks << "\n";
  for (const auto& [stage, secs] : stage_seconds) {
    os << "stage " << stage << ": " << std::fixed << std::setprecision(3) << secs << " s\n";
  }
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  for (const auto& f : failures) os << "failure: " << f << "\n";
  return os.str();
}

std::string model_fingerprint(const ModelSpec& spec) {
  std::ostringstream os;
  os << std::setprecision(17);
  const auto& pp = spec.preprocessing;
  os << spec.id << "," << (spec.backend == Backend::toy ? "toy" : "onnx") << ","
     << spec.input_size.width << "x" << spec.input_size.height << "," << spec.embedding_dim
     << "," << pp.scale << "," << pp.mean[0] << "," << pp.mean[1] << "," << pp.mean[2] << ","
     << pp.std[0] << "," << pp.std[1] << "," << pp.std[2] << ","
     << (pp.order == ChannelOrder::rgb ? "rgb" : "bgr") << ","
     << (pp.layout == TensorLayout::nchw ? "nchw" : "nhwc");
  if (spec.backend == Backend::onnx) os << ",weights=" << to_hex(hash_path_contents(spec.weights));
  return os.str();
}

std::uint64_t pipeline_param_hash(const Manifest& m, const std::string& model_fp,
                                  const AlignmentTemplate& tpl, const std::string& video_id) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "fcb-params/1|max_dim=" << m.max_dim << "|stride=" << m.stride
     << "|detector=" << to_string(m.detector.type) << "," << m.detector.threshold << ","
     << m.detector.margin;
  if (m.detector.type == DetectorType::neural) {
    os << ",model=" << to_hex(hash_path_contents(m.detector.model));
  } else if (m.detector.type == DetectorType::stub) {
    const auto script = m.detector.scripts / (video_id + ".json");
    os << ",script=" << (fs::exists(script) ? to_hex(hash_path_contents(script)) : "missing");
  }
  os << "|template=" << tpl.size.width << "x" << tpl.size.height;
  for (const auto& p : tpl.points) os << "," << p.x << "," << p.y;
  os << "|model=" << model_fp;
  return fnv1a64(os.str());
}

std::uint64_t pipeline_param_hash(const Manifest& m, const ModelSpec& spec,
                                  const AlignmentTemplate& tpl, const std::string& video_id) {
  return pipeline_param_hash(m, model_fingerprint(spec), tpl, video_id);
}

// --- extract ---------------------------------------------------------------

namespace {

struct VideoTask {
  std::string video_id;
  fs::path path;
};

struct TaskResult {
  std::map<std::string, EmbeddingSet> sets;      // model id -> set
  std::map<std::string, std::string> failures;   // model id -> message
  RunSummary summary;
};

// Per-worker inference state: one embedder per model, created on demand.
class Worker {
 public:
  Worker(const Manifest& m, const ModelRegistry& reg, const std::vector<ModelSpec>& specs,
         const std::map<std::string, std::string>& fingerprints, const fs::path& cache_dir)
      : m_(m), reg_(reg), specs_(specs), fingerprints_(fingerprints), cache_dir_(cache_dir) {}

  TaskResult run(const VideoTask& task);

 private:
  Embedder& embedder(const ModelSpec& spec) {
    auto& slot = embedders_[spec.id];
    if (!slot) slot = make_embedder(spec);
    return *slot;
  }

  const Manifest& m_;
  const ModelRegistry& reg_;
  const std::vector<ModelSpec>& specs_;
  const std::map<std::string, std::string>& fingerprints_;
  fs::path cache_dir_;
  std::map<std::string, std::unique_ptr<Embedder>> embedders_;
};

TaskResult Worker::run(const VideoTask& task) {
  TaskResult out;
  auto& sum = out.summary;
  ++sum.videos_processed;

  std::uint64_t content_hash = 0;
  try {
    content_hash = hash_path_contents(task.path);
  } catch (const std::exception& e) {
    for (const auto& s : specs_) out.failures[s.id] = task.video_id + ": " + e.what();
    return out;
  }

  std::vector<const ModelSpec*> pending;
  std::map<std::string, CacheKey> keys;
  for (const auto& spec : specs_) {
    CacheKey key{task.video_id, spec.id, content_hash, 0};
    try {
      key.param_hash = pipeline_param_hash(m_, fingerprints_.at(spec.id),
                                           reg_.alignment_template(), task.video_id);
    } catch (const std::exception& e) {
      out.failures[spec.id] = task.video_id + ": " + e.what();
      continue;
    }
    keys[spec.id] = key;
    if (!cache_dir_.empty()) {
      std::string warning;
      if (auto hit = cache_load(key, cache_dir_, &warning)) {
        ++sum.cache_hits;
        out.sets[spec.id] = std::move(*hit);
        continue;
      }
      ++sum.cache_misses;
      if (!warning.empty()) {
        ++sum.cache_corrupt;
        sum.warnings.push_back(warning);
      }
    }
    pending.push_back(&spec);
  }
  if (pending.empty()) return out;

  try {
    auto detector = make_detector(m_.detector, task.video_id);
    VideoReader reader(task.path, m_.stride);
    std::vector<EmbeddingAccumulator> accs;
    for (const auto* spec : pending) accs.emplace_back(task.video_id, embedder(*spec));
    const std::size_t calls_before = [&] {
      std::size_t n = 0;
      for (const auto* spec : pending) n += embedder(*spec).inference_calls();
      return n;
    }();

    const double margin = m_.detector.type == DetectorType::full_frame ? 0.0 : m_.detector.margin;
    AlignStats align_stats;
    while (auto frame = reader.next()) {
      const FrameRecord f = normalize_resolution(*frame, m_.max_dim);
      ++sum.frames_examined;
      auto obs = detect_primary_face(f, *detector);
      if (!obs) {
        ++sum.frames_skipped;
        for (auto& acc : accs) acc.skip();
        continue;
      }
      for (std::size_t k = 0; k < pending.size(); ++k) {
        auto cropped = align_and_crop(f, *obs, pending[k]->input_size, reg_.alignment_template(),
                                      margin, k == 0 ? &align_stats : nullptr);
        accs[k].add(cropped, &sum.warnings);
      }
    }
    sum.frames_decoded += reader.frames_decoded();
    sum.alignment_fallbacks += align_stats.degenerate_fallbacks;
    if (align_stats.degenerate_fallbacks) {
      sum.warnings.push_back(task.video_id + ": " + std::to_string(align_stats.degenerate_fallbacks) +
                             " frame(s) with degenerate landmarks used the bbox crop");
    }

    std::size_t calls_after = 0;
    for (const auto* spec : pending) calls_after += embedder(*spec).inference_calls();
    sum.inference_calls += calls_after - calls_before;

    for (std::size_t k = 0; k < pending.size(); ++k) {
      EmbeddingSet set = std::move(accs[k]).finish();
      const auto& id = pending[k]->id;
      sum.frames_embedded += set.embeddings.size();
      sum.frames_dropped += set.dropped_frames;
      if (!cache_dir_.empty()) cache_store(set, keys.at(id), cache_dir_);
      out.sets[id] = std::move(set);
    }
  } catch (const std::exception& e) {
    for (const auto* spec : pending) {
      out.sets.erase(spec->id);
      out.failures[spec->id] = task.video_id + ": " + e.what();
    }
  }
  return out;
}

}  // namespace

ExtractResult run_extract(const Manifest& m, const ModelRegistry& registry,
                          const ExtractOptions& opts) {
  const auto start = Clock::now();
  const auto ids = opts.models.empty() ? m.models : opts.models;
  const std::vector<ModelSpec> specs = resolve_models(ids, registry);

  // Fail fast on setup problems shared by every video.
  for (const auto& spec : specs) make_embedder(spec);
  if (m.detector.type == DetectorType::neural) {
    NeuralDetector probe(m.detector.model, m.detector.threshold);
  }

  std::vector<VideoTask> tasks;
  for (const auto& src : m.sources) {
    for (const auto& v : src.videos) tasks.push_back({video_id(src, v), v});
  }

  std::vector<TaskResult> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::map<std::string, std::string> fingerprints;
  for (const auto& spec : specs) fingerprints[spec.id] = model_fingerprint(spec);
  auto work = [&] {
    Worker worker(m, registry, specs, fingerprints, opts.cache_dir);
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      results[i] = worker.run(tasks[i]);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(opts.jobs, 1, std::max<std::size_t>(1, tasks.size()));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(work);
  }

  ExtractResult out;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    auto& r = results[i];
    for (auto& [model, set] : r.sets) out.sets[{tasks[i].video_id, model}] = std::move(set);
    for (auto& [model, msg] : r.failures) {
      out.failures[{tasks[i].video_id, model}] = msg;
      r.summary.failures.push_back("[" + model + "] " + msg);
    }
    out.summary.merge(r.summary);
  }
  out.summary.stage_seconds.emplace_back(
      "extract", std::chrono::duration<double>(Clock::now() - start).count());
  return out;
}

// --- score -----------------------------------------------------------------

RunMetadata run_metadata(const Manifest& m, const ModelRegistry& registry, bool include_self) {
  RunMetadata meta;
  meta.seed = m.seed;
  meta.num_pairs = m.mode2.num_pairs;
  meta.max_dim = m.max_dim;
  meta.stride = m.stride;
  meta.reference = to_string(m.mode1.reference);
  meta.include_self = include_self;
  meta.registry_hash = to_hex(registry.content_hash());
  return meta;
}

ScoreFile run_score(const Manifest& m, const ModelRegistry& registry,
                    const ExtractResult& extracted, const ScoreOptions& opts,
                    RunSummary* summary) {
  const auto start = Clock::now();
  ScoreFile f;
  f.metadata = run_metadata(m, registry, opts.include_self);
  std::set<std::string> models_seen;
  for (const auto& [key, _] : extracted.sets) models_seen.insert(key.second);
  for (const auto& [key, _] : extracted.failures) models_seen.insert(key.second);
  for (const auto& id : m.models) {
    if (models_seen.count(id)) f.models.push_back(id);
  }

  for (const auto& src : m.sources) {
    ScoreSource ss{src.name, src.kind, {}};
    for (const auto& v : src.videos) ss.video_ids.push_back(video_id(src, v));
    f.sources.push_back(ss);
  }

  for (const auto& src : f.sources) {
    for (const auto& vid : src.video_ids) {
      for (const auto& model : f.models) {
        const auto key = std::make_pair(vid, model);
        const auto it = extracted.sets.find(key);
        for (const auto mode : opts.modes) {
          ScoreRecord rec;
          rec.video_id = vid;
          rec.source = src.name;
          rec.model_id = model;
          rec.mode = mode;
          rec.metric = m.metric;
          if (it == extracted.sets.end()) {
            rec.status = ScoreStatus::failed;
            const auto fit = extracted.failures.find(key);
            rec.message = fit != extracted.failures.end() ? fit->second : "no embeddings";
            f.records.push_back(std::move(rec));
            continue;
          }
          const auto& set = it->second;
          rec.valid_frames = set.embeddings.size();
          rec.total_frames = set.total_frames;
          rec.skipped_frames = set.skipped_frames;
          rec.dropped_frames = set.dropped_frames;
          try {
            if (mode == ComparisonMode::mode1) {
              if (set.embeddings.size() < 2) {
                throw UnscorableVideo(vid + " [" + model + "]: " +
                                      std::to_string(set.embeddings.size()) +
                                      " valid frame(s), need at least 2");
              }
              const auto ref = select_reference(set, m.mode1.reference, m.metric);
              rec.score = score_mode1(set, ref, m.metric, opts.include_self);
            } else {
              rec.score = score_mode2(set, m.mode2, m.seed, m.metric);
            }
          } catch (const UnscorableVideo& e) {
            rec.status = ScoreStatus::unscorable;
            rec.message = e.what();
          } catch (const Error& e) {
            rec.status = ScoreStatus::failed;
            rec.message = e.what();
            if (summary) summary->failures.push_back(std::string(to_string(mode)) + " " + e.what());
          }
          f.records.push_back(std::move(rec));
        }
      }
    }
  }
  if (summary) {
    summary->stage_seconds.emplace_back(
        "score", std::chrono::duration<double>(Clock::now() - start).count());
  }
  return f;
}

// --- score file ------------------------------------------------------------

namespace {

std::string_view to_string(ScoreStatus s) {
  switch (s) {
    case ScoreStatus::ok: return "ok";
    case ScoreStatus::unscorable: return "unscorable";
    case ScoreStatus::failed: return "failed";
  }
  return "?";
}

ScoreStatus parse_status(const std::string& s) {
  if (s == "ok") return ScoreStatus::ok;
  if (s == "unscorable") return ScoreStatus::unscorable;
  if (s == "failed") return ScoreStatus::failed;
  throw ReportError("unknown record status '" + s + "'");
}

ordered_json metadata_json(const RunMetadata& meta) {
  ordered_json j;
  j["seed"] = meta.seed;
  j["num_pairs"] = meta.num_pairs;
  j["max_dim"] = meta.max_dim;
  j["stride"] = meta.stride;
  j["reference"] = meta.reference;
  j["include_self"] = meta.include_self;
  j["registry_hash"] = meta.registry_hash;
  j["toolkit_version"] = meta.toolkit_version;
  return j;
}

RunMetadata parse_metadata(const json& j) {
  RunMetadata meta;
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.num_pairs = j.at("num_pairs").get<std::size_t>();
  meta.max_dim = j.at("max_dim").get<int>();
  meta.stride = j.at("stride").get<std::size_t>();
  meta.reference = j.at("reference").get<std::string>();
  meta.include_self = j.at("include_self").get<bool>();
  meta.registry_hash = j.at("registry_hash").get<std::string>();
  meta.toolkit_version = j.at("toolkit_version").get<std::string>();
  return meta;
}

}  // namespace

std::string serialize_score_file(const ScoreFile& f) {
  ordered_json j;
  j["format"] = "fcb-scores";
  j["version"] = 1;
  j["metadata"] = metadata_json(f.metadata);
  ordered_json sources = ordered_json::array();
  for (const auto& s : f.sources) {
    sources.push_back({{"name", s.name}, {"kind", fcb::to_string(s.kind)}, {"videos", s.video_ids}});
  }
  j["sources"] = sources;
  j["models"] = f.models;
  ordered_json records = ordered_json::array();
  for (const auto& r : f.records) {
    ordered_json jr;
    jr["video_id"] = r.video_id;
    jr["source"] = r.source;
    jr["model"] = r.model_id;
    jr["mode"] = fcb::to_string(r.mode);
    jr["metric"] = fcb::to_string(r.metric);
    jr["status"] = to_string(r.status);
    if (r.score) {
      jr["mean"] = r.score->mean;
      jr["std"] = r.score->std;
      jr["n_comparisons"] = r.score->n_comparisons;
      jr["reference_index"] =
          r.score->reference_index ? ordered_json(*r.score->reference_index) : ordered_json(nullptr);
    }
    if (!r.message.empty()) jr["message"] = r.message;
    jr["valid_frames"] = r.valid_frames;
    jr["total_frames"] = r.total_frames;
    jr["skipped_frames"] = r.skipped_frames;
    jr["dropped_frames"] = r.dropped_frames;
    records.push_back(std::move(jr));
  }
  j["records"] = std::move(records);
  return j.dump(2) + "\n";
}

ScoreFile parse_score_file(const std::string& text, const std::string& origin) {
  try {
    const json j = json::parse(text);
    if (j.at("format") != "fcb-scores" || j.at("version") != 1) {
      throw ReportError(origin + ": not a version-1 fcb score file");
    }
    ScoreFile f;
    f.metadata = parse_metadata(j.at("metadata"));
    for (const auto& s : j.at("sources")) {
      f.sources.push_back({s.at("name").get<std::string>(),
                           parse_source_kind(s.at("kind").get<std::string>()),
                           s.at("videos").get<std::vector<std::string>>()});
    }
    f.models = j.at("models").get<std::vector<std::string>>();
    for (const auto& jr : j.at("records")) {
      ScoreRecord r;
      r.video_id = jr.at("video_id").get<std::string>();
      r.source = jr.at("source").get<std::string>();
      r.model_id = jr.at("model").get<std::string>();
      r.mode = parse_mode(jr.at("mode").get<std::string>());
      r.metric = parse_metric(jr.at("metric").get<std::string>());
      r.status = parse_status(jr.at("status").get<std::string>());
      if (jr.contains("mean")) {
        ConsistencyScore s;
        s.video_id = r.video_id;
        s.model_id = r.model_id;
        s.metric = r.metric;
        s.mode = r.mode;
        s.mean = jr.at("mean").get<double>();
        s.std = jr.at("std").get<double>();
        s.n_comparisons = jr.at("n_comparisons").get<std::size_t>();
        if (!jr.at("reference_index").is_null()) {
          s.reference_index = jr["reference_index"].get<std::size_t>();
        }
        r.score = s;
      }
      r.message = jr.value("message", std::string());
      r.valid_frames = jr.at("valid_frames").get<std::size_t>();
      r.total_frames = jr.at("total_frames").get<std::size_t>();
      r.skipped_frames = jr.at("skipped_frames").get<std::size_t>();
      r.dropped_frames = jr.at("dropped_frames").get<std::size_t>();
      if (r.status == ScoreStatus::ok && !r.score) {
        throw ReportError(origin + ": ok record without a score for " + r.video_id);
      }
      f.records.push_back(std::move(r));
    }
    return f;
  } catch (const json::exception& e) {
    throw ReportError(origin + ": malformed score file: " + e.what());
  } catch (const ReportError&) {
    throw;
  } catch (const Error& e) {
    throw ReportError(origin + ": " + e.what());
  }
}

ScoreFile read_score_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReportError("cannot open score file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_score_file(ss.str(), path.string());
}

ScoreFile merge_score_files(const std::vector<ScoreFile>& files) {
  if (files.empty()) throw ReportError("no score files given");
  ScoreFile out;
  out.metadata = files.front().metadata;
  std::map<std::tuple<std::string, std::string, ComparisonMode, MetricKind>, const ScoreRecord*> seen;
  for (const auto& f : files) {
    if (!(f.metadata == out.metadata)) {
      throw ReportError("score files disagree on run metadata (seed, pairs, registry, ...)");
    }
    for (const auto& s : f.sources) {
      auto it = std::find_if(out.sources.begin(), out.sources.end(),
                             [&](const ScoreSource& o) { return o.name == s.name; });
      if (it == out.sources.end()) {
        out.sources.push_back(s);
        continue;
      }
      if (it->kind != s.kind) throw ReportError("source '" + s.name + "' has conflicting kinds");
      for (const auto& v : s.video_ids) {
        if (std::find(it->video_ids.begin(), it->video_ids.end(), v) == it->video_ids.end()) {
          it->video_ids.push_back(v);
        }
      }
    }
    for (const auto& m : f.models) {
      if (std::find(out.models.begin(), out.models.end(), m) == out.models.end()) {
        out.models.push_back(m);
      }
    }
    for (const auto& r : f.records) {
      const auto key = std::make_tuple(r.video_id, r.model_id, r.mode, r.metric);
      if (auto it = seen.find(key); it != seen.end()) {
        if (!(*it->second == r)) {
          throw ReportError("conflicting scores for " + r.video_id + " [" + r.model_id + ", " +
                            std::string(fcb::to_string(r.mode)) + "]");
        }
        continue;
      }
      out.records.push_back(r);
      seen[key] = &r;
    }
  }
  return out;
}

std::vector<SourceAggregate> aggregate_scores(const ScoreFile& f, ComparisonMode mode,
                                              MetricKind metric) {
  std::vector<SourceAggregate> aggs;
  for (const auto& src : f.sources) {
    for (const auto& model : f.models) {
      std::vector<ConsistencyScore> ok;
      std::size_t excluded = 0;
      for (const auto& vid : src.video_ids) {
        const auto it = std::find_if(f.records.begin(), f.records.end(), [&](const ScoreRecord& r) {
          return r.video_id == vid && r.model_id == model && r.mode == mode && r.metric == metric;
        });
        if (it == f.records.end()) {
          throw ReportError("incomplete grid: no " + std::string(fcb::to_string(mode)) + " " +
                            std::string(fcb::to_string(metric)) + " score for video '" + vid +
                            "' and model '" + model + "'");
        }
        if (it->status == ScoreStatus::ok) {
          ok.push_back(*it->score);
        } else {
          ++excluded;
        }
      }
      if (ok.empty()) {
        aggs.push_back(SourceAggregate::unscorable(src.name, model, metric, mode, excluded));
      } else {
        aggs.push_back(aggregate_source(src.name, ok, excluded));
      }
    }
  }
  return aggs;
}

std::vector<BenchmarkReport> build_reports(const ScoreFile& f) {
  std::set<std::pair<MetricKind, ComparisonMode>> present;
  for (const auto& r : f.records) present.emplace(r.metric, r.mode);
  if (present.empty()) throw ReportError("score file has no records");

  std::vector<SourceInfo> sources;
  for (const auto& s : f.sources) sources.push_back({s.name, s.kind});

  std::vector<BenchmarkReport> out;
  for (const auto& [metric, mode] : present) {
    const auto aggs = aggregate_scores(f, mode, metric);
    out.push_back(build_report(aggs, sources, f.models, f.metadata));
  }
  return out;
}

void write_file_atomic(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

ReportOutputs write_reports(const ScoreFile& f, const std::vector<TableFormat>& formats,
                            const fs::path& out_dir) {
  ReportOutputs out;
  const auto reports = build_reports(f);
  for (const auto& r : reports) {
    for (const auto fmt : formats) {
      const auto path = out_dir / ("report_" + std::string(to_string(r.mode)) + "_" +
                                   std::string(to_string(r.metric)) + "." +
                                   std::string(file_extension(fmt)));
      write_file_atomic(path, render_table(r, fmt));
      out.written.push_back(path);
    }
  }
  for (const auto& r1 : reports) {
    if (r1.mode != ComparisonMode::mode1) continue;
    for (const auto& r2 : reports) {
      if (r2.mode != ComparisonMode::mode2 || r2.metric != r1.metric) continue;
      const auto path = out_dir / ("plot_" + std::string(to_string(r1.metric)) + ".csv");
      write_file_atomic(path, emit_plot_data(r1, r2));
      out.written.push_back(path);
    }
  }
  return out;
}

}  // namespace fcb
