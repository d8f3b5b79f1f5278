#include "fcb/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "fcb/error.hpp"
#include "fcb/registry.hpp"

namespace fcb {

namespace fs = std::filesystem;

std::string_view to_string(DetectorType t) noexcept {
  switch (t) {
    case DetectorType::full_frame: return "full_frame";
    case DetectorType::stub: return "stub";
    case DetectorType::neural: return "neural";
  }
  return "?";
}

std::string video_id(const SourceGroup& src, const fs::path& video) {
  auto name = video.filename();
  if (name.empty()) name = video.parent_path().filename();  // "dir/" form
  return src.name + "/" + name.string();
}

namespace {

class Parser {
 public:
  Parser(std::string origin, fs::path base_dir)
      : origin_(std::move(origin)), base_dir_(std::move(base_dir)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& msg) const {
    const auto mark = node.Mark();
    std::string where = origin_;
    if (mark.line >= 0) {
      where += ":" + std::to_string(mark.line + 1) + ":" + std::to_string(mark.column + 1);
    }
    throw ManifestError(where + ": " + msg);
  }

  void check_keys(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                  const std::string& where) const {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
      const auto key = kv.first.as<std::string>();
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail(kv.first, "unknown field '" + key + "' in " + where);
      }
    }
  }

  template <typename T>
  T scalar(const YAML::Node& node, const std::string& what) const {
    if (!node.IsScalar()) fail(node, what + " must be a scalar");
    try {
      return node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "invalid value for " + what + ": '" + node.Scalar() + "'");
    }
  }

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative()) path = base_dir_ / path;
    return path.lexically_normal();
  }

  Manifest parse(const YAML::Node& root) {
    Manifest m;
    if (!root.IsDefined() || root.IsNull()) fail(root, "empty manifest");
    check_keys(root,
               {"sources", "models", "metric", "mode1", "mode2", "max_dim", "seed",
                "output_dir", "detector", "registry", "stride"},
               "manifest");

    parse_sources(root["sources"], m);

    const auto models = root["models"];
    if (!models || !models.IsSequence() || models.size() == 0) {
      fail(models ? models : root, "'models' must be a non-empty list of model ids");
    }
    std::set<std::string> seen_models;
    for (const auto& node : models) {
      auto id = scalar<std::string>(node, "model id");
      if (!seen_models.insert(id).second) fail(node, "duplicate model id '" + id + "'");
      m.models.push_back(std::move(id));
    }

    if (const auto n = root["metric"]) {
      try {
        m.metric = parse_metric(scalar<std::string>(n, "metric"));
      } catch (const ManifestError&) {
        throw;
      } catch (const Error& e) {
        fail(n, e.what());
      }
    }
    if (const auto n = root["mode1"]) {
      check_keys(n, {"reference"}, "mode1");
      if (const auto r = n["reference"]) {
        try {
          m.mode1.reference = parse_reference(scalar<std::string>(r, "mode1.reference"));
        } catch (const ManifestError&) {
          throw;
        } catch (const Error& e) {
          fail(r, e.what());
        }
      }
    }
    if (const auto n = root["mode2"]) {
      check_keys(n, {"num_pairs"}, "mode2");
      if (const auto p = n["num_pairs"]) {
        const auto v = scalar<long long>(p, "mode2.num_pairs");
        if (v < 1) fail(p, "mode2.num_pairs must be >= 1");
        m.mode2.num_pairs = static_cast<std::size_t>(v);
      }
    }
    if (const auto n = root["max_dim"]) {
      const auto v = scalar<long long>(n, "max_dim");
      if (v < 1 || v > 1 << 20) fail(n, "max_dim must be >= 1");
      m.max_dim = static_cast<int>(v);
    }
    if (const auto n = root["seed"]) {
      const auto text = scalar<std::string>(n, "seed");
      if (text.empty() || text.front() == '-') fail(n, "seed must be an unsigned integer");
      m.seed = scalar<std::uint64_t>(n, "seed");
    }
    if (const auto n = root["stride"]) {
      const auto v = scalar<long long>(n, "stride");
      if (v < 1) fail(n, "stride must be >= 1");
      m.stride = static_cast<std::size_t>(v);
    }
    m.output_dir = resolve(root["output_dir"] ? scalar<std::string>(root["output_dir"], "output_dir")
                                               : std::string("fcb_out"));
    if (const auto n = root["detector"]) parse_detector(n, m.detector);
    m.registry = root["registry"] ? resolve(scalar<std::string>(root["registry"], "registry"))
                                  : default_registry_path();
    return m;
  }

 private:
  void parse_sources(const YAML::Node& sources, Manifest& m) {
    if (!sources || !sources.IsSequence() || sources.size() == 0) {
      fail(sources ? sources : YAML::Node(), "'sources' must be a non-empty list");
    }
    std::set<std::string> names;
    std::set<std::string> ids;
    for (const auto& node : sources) {
      check_keys(node, {"name", "kind", "videos"}, "source");
      SourceGroup src;
      if (!node["name"]) fail(node, "source is missing 'name'");
      src.name = scalar<std::string>(node["name"], "source name");
      if (src.name.empty() || src.name.find('/') != std::string::npos) {
        fail(node["name"], "source name must be non-empty and contain no '/'");
      }
      if (!names.insert(src.name).second) {
        fail(node["name"], "duplicate source name '" + src.name + "'");
      }
      if (!node["kind"]) fail(node, "source '" + src.name + "' is missing 'kind'");
      try {
        src.kind = parse_source_kind(scalar<std::string>(node["kind"], "source kind"));
      } catch (const ManifestError&) {
        throw;
      } catch (const Error& e) {
        fail(node["kind"], e.what());
      }
      const auto videos = node["videos"];
      if (!videos || !videos.IsSequence() || videos.size() == 0) {
        fail(videos ? videos : node, "source '" + src.name + "' needs at least one video");
      }
      for (const auto& v : videos) {
        auto path = resolve(scalar<std::string>(v, "video path"));
        if (!fs::exists(path)) fail(v, "video not found: " + path.string());
        if (!ids.insert(video_id(src, path)).second) {
          fail(v, "duplicate video id '" + video_id(src, path) + "'");
        }
        src.videos.push_back(std::move(path));
      }
      m.sources.push_back(std::move(src));
    }
  }

  void parse_detector(const YAML::Node& n, DetectorConfig& d) {
    check_keys(n, {"kind", "model", "scripts", "threshold", "margin"}, "detector");
    if (const auto k = n["kind"]) {
      const auto s = scalar<std::string>(k, "detector.kind");
      if (s == "full_frame") d.type = DetectorType::full_frame;
      else if (s == "stub") d.type = DetectorType::stub;
      else if (s == "neural") d.type = DetectorType::neural;
      else fail(k, "detector.kind must be full_frame, stub or neural");
    }
    if (const auto t = n["threshold"]) {
      d.threshold = scalar<double>(t, "detector.threshold");
      if (!(d.threshold > 0.0 && d.threshold < 1.0)) fail(t, "detector.threshold must be in (0,1)");
    }
    if (const auto mg = n["margin"]) {
      d.margin = scalar<double>(mg, "detector.margin");
      if (!(d.margin >= 0.0 && d.margin <= 4.0)) fail(mg, "detector.margin must be in [0,4]");
    }
    if (const auto p = n["model"]) d.model = resolve(scalar<std::string>(p, "detector.model"));
    if (const auto p = n["scripts"]) d.scripts = resolve(scalar<std::string>(p, "detector.scripts"));
    if (d.type == DetectorType::neural && d.model.empty()) fail(n, "neural detector needs 'model'");
    if (d.type == DetectorType::stub && d.scripts.empty()) fail(n, "stub detector needs 'scripts'");
  }

  std::string origin_;
  fs::path base_dir_;
};

}  // namespace

Manifest parse_manifest(const std::string& text, const std::string& origin,
                        const fs::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ManifestError(origin + ":" + std::to_string(e.mark.line + 1) + ":" +
                        std::to_string(e.mark.column + 1) + ": " + e.msg);
  }
  return Parser(origin, base_dir).parse(root);
}

Manifest load_manifest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError("cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto base = fs::absolute(path).parent_path();
  Manifest m = parse_manifest(ss.str(), path.string(), base);

  const auto registry = ModelRegistry::load(m.registry);
  validate_against_registry(m, registry);
  return m;
}

std::string serialize_manifest(const Manifest& m) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "sources" << YAML::Value << YAML::BeginSeq;
  for (const auto& src : m.sources) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << src.name;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(src.kind));
    out << YAML::Key << "videos" << YAML::Value << YAML::BeginSeq;
    for (const auto& v : src.videos) out << v.string();
    out << YAML::EndSeq << YAML::EndMap;
  }
  out << YAML::EndSeq;
  out << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
  for (const auto& id : m.models) out << id;
  out << YAML::EndSeq;
  out << YAML::Key << "metric" << YAML::Value << std::string(to_string(m.metric));
  out << YAML::Key << "mode1" << YAML::Value << YAML::BeginMap << YAML::Key << "reference"
      << YAML::Value << to_string(m.mode1.reference) << YAML::EndMap;
  out << YAML::Key << "mode2" << YAML::Value << YAML::BeginMap << YAML::Key << "num_pairs"
      << YAML::Value << m.mode2.num_pairs << YAML::EndMap;
  out << YAML::Key << "max_dim" << YAML::Value << m.max_dim;
  out << YAML::Key << "seed" << YAML::Value << m.seed;
  out << YAML::Key << "stride" << YAML::Value << m.stride;
  out << YAML::Key << "output_dir" << YAML::Value << m.output_dir.string();
  out << YAML::Key << "registry" << YAML::Value << m.registry.string();

  out << YAML::Key << "detector" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << std::string(to_string(m.detector.type));
  out << YAML::Key << "threshold" << YAML::Value << YAML::Precision(17) << m.detector.threshold;
  out << YAML::Key << "margin" << YAML::Value << YAML::Precision(17) << m.detector.margin;
  if (!m.detector.model.empty()) out << YAML::Key << "model" << YAML::Value << m.detector.model.string();
  if (!m.detector.scripts.empty()) out << YAML::Key << "scripts" << YAML::Value << m.detector.scripts.string();
  out << YAML::EndMap;
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::vector<ModelSpec> resolve_models(const std::vector<std::string>& ids,
                                      const ModelRegistry& registry) {
  std::vector<ModelSpec> specs;
  std::set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw RegistryError("duplicate model id '" + id + "'");
    specs.push_back(registry.find(id));
  }
  return specs;
}

std::vector<ModelSpec> validate_against_registry(const Manifest& m,
                                                 const ModelRegistry& registry) {
  try {
    return resolve_models(m.models, registry);
  } catch (const RegistryError& e) {
    throw ManifestError(std::string(e.what()) + " [registry " + registry.path().string() + "]");
  }
}

}  // namespace fcb
