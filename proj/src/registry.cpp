#include "fcb/registry.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcb/error.hpp"
#include "fcb/hash.hpp"

namespace fcb {

namespace fs = std::filesystem;
using nlohmann::json;

std::array<cv::Point2f, 5> AlignmentTemplate::scaled_to(cv::Size target) const {
  const float sx = static_cast<float>(target.width) / static_cast<float>(size.width);
  const float sy = static_cast<float>(target.height) / static_cast<float>(size.height);
  std::array<cv::Point2f, 5> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    out[i] = {points[i].x * sx, points[i].y * sy};
  }
  return out;
}

fs::path default_registry_path() {
  if (const char* env = std::getenv("FCB_REGISTRY"); env && *env) return env;
  return FCB_DEFAULT_REGISTRY;
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw RegistryError(where + ": unknown field '" + key + "'");
    }
  }
}

cv::Size parse_size(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) {
    throw RegistryError(where + ": expected [width, height]");
  }
  const int w = j[0].get<int>();
  const int h = j[1].get<int>();
  if (w < 1 || h < 1) throw RegistryError(where + ": non-positive size");
  return {w, h};
}

std::array<double, 3> parse_triplet(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 3) {
    throw RegistryError(where + ": expected three per-channel values");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Preprocessing parse_preprocessing(const json& j, const std::string& where) {
  check_keys(j, {"scale", "mean", "std", "channel_order", "layout"}, where);
  Preprocessing p;
  if (j.contains("scale")) p.scale = j["scale"].get<double>();
  if (j.contains("mean")) p.mean = parse_triplet(j["mean"], where + ".mean");
  if (j.contains("std")) p.std = parse_triplet(j["std"], where + ".std");
  for (double s : p.std) {
    if (s == 0.0) throw RegistryError(where + ".std: zero divisor");
  }
  if (j.contains("channel_order")) {
    const auto s = j["channel_order"].get<std::string>();
    if (s == "rgb") p.order = ChannelOrder::rgb;
    else if (s == "bgr") p.order = ChannelOrder::bgr;
    else throw RegistryError(where + ".channel_order: expected rgb or bgr");
  }
  if (j.contains("layout")) {
    const auto s = j["layout"].get<std::string>();
    if (s == "nchw") p.layout = TensorLayout::nchw;
    else if (s == "nhwc") p.layout = TensorLayout::nhwc;
    else throw RegistryError(where + ".layout: expected nchw or nhwc");
  }
  return p;
}

ModelSpec parse_model(const json& j, const fs::path& base_dir, const std::string& where) {
  check_keys(j, {"id", "backend", "input_size", "embedding_dim", "preprocessing", "weights"},
             where);
  ModelSpec spec;
  spec.id = j.at("id").get<std::string>();
  const std::string w = where + " (" + spec.id + ")";
  const auto backend = j.value("backend", std::string("onnx"));
  if (backend == "toy") spec.backend = Backend::toy;
  else if (backend == "onnx") spec.backend = Backend::onnx;
  else throw RegistryError(w + ": unknown backend '" + backend + "'");

  spec.input_size = parse_size(j.at("input_size"), w + ".input_size");
  spec.embedding_dim = j.at("embedding_dim").get<int>();
  if (spec.embedding_dim < 2) throw RegistryError(w + ": embedding_dim must be >= 2");
  if (j.contains("preprocessing")) {
    spec.preprocessing = parse_preprocessing(j["preprocessing"], w + ".preprocessing");
  }

  if (spec.backend == Backend::toy) {
    if (spec.embedding_dim != 64) throw RegistryError(w + ": toy backend emits 64 values");
    if (j.contains("weights")) throw RegistryError(w + ": toy backend takes no weights");
  } else {
    if (spec.input_size.width < 16 || spec.input_size.height < 16) {
      throw RegistryError(w + ": neural input_size must be at least 16x16");
    }
    if (!j.contains("weights")) throw RegistryError(w + ": missing weights");
    fs::path weights = j["weights"].get<std::string>();
    spec.weights = weights.is_absolute() ? weights : base_dir / weights;
  }
  return spec;
}

}  // namespace

ModelRegistry ModelRegistry::parse(const std::string& json_text, const fs::path& base_dir,
                                   const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw RegistryError(origin + ": " + e.what());
  }

  ModelRegistry reg;
  try {
    check_keys(root, {"format", "version", "alignment_template", "models"}, origin);
    if (root.value("format", std::string()) != "fcb-model-registry") {
      throw RegistryError(origin + ": format must be \"fcb-model-registry\"");
    }
    if (root.value("version", 0) != 1) {
      throw RegistryError(origin + ": unsupported registry version");
    }

    const auto& tpl = root.at("alignment_template");
    check_keys(tpl, {"size", "points"}, origin + ".alignment_template");
    reg.template_.size = parse_size(tpl.at("size"), origin + ".alignment_template.size");
    const auto& pts = tpl.at("points");
    if (!pts.is_array() || pts.size() != 5) {
      throw RegistryError(origin + ".alignment_template.points: expected 5 points");
    }
    for (std::size_t i = 0; i < 5; ++i) {
      reg.template_.points[i] = {pts[i].at(0).get<float>(), pts[i].at(1).get<float>()};
    }

    std::set<std::string> seen;
    const auto& models = root.at("models");
    for (std::size_t i = 0; i < models.size(); ++i) {
      auto spec = parse_model(models[i], base_dir,
                              origin + ".models[" + std::to_string(i) + "]");
      if (!seen.insert(spec.id).second) {
        throw RegistryError(origin + ": duplicate model id '" + spec.id + "'");
      }
      reg.models_.push_back(std::move(spec));
    }
  } catch (const json::exception& e) {
    throw RegistryError(origin + ": " + e.what());
  }
  reg.hash_ = fnv1a64(json_text);
  return reg;
}

ModelRegistry ModelRegistry::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw RegistryError("cannot open model registry " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto reg = parse(ss.str(), path.parent_path(), path.string());
  reg.path_ = path;
  return reg;
}

bool ModelRegistry::contains(const std::string& id) const {
  return std::any_of(models_.begin(), models_.end(),
                     [&](const ModelSpec& m) { return m.id == id; });
}

const ModelSpec& ModelRegistry::find(const std::string& id) const {
  for (const auto& m : models_) {
    if (m.id == id) return m;
  }
  std::string avail;
  for (const auto& m : models_) avail += (avail.empty() ? "" : ", ") + m.id;
  throw RegistryError("unknown model id '" + id + "' (available: " + avail + ")");
}

std::vector<std::string> ModelRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& m : models_) out.push_back(m.id);
  return out;
}

}  // namespace fcb
