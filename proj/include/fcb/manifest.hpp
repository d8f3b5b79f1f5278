#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fcb/types.hpp"

namespace fcb {

struct SourceGroup {
  std::string name;
  SourceKind kind = SourceKind::generated;
  std::vector<std::filesystem::path> videos;

  friend bool operator==(const SourceGroup&, const SourceGroup&) = default;
};

enum class DetectorType { full_frame, stub, neural };

struct DetectorConfig {
  DetectorType type = DetectorType::full_frame;
  std::filesystem::path model;    // neural: YuNet ONNX graph
  std::filesystem::path scripts;  // stub: directory of <video_id>.json scripts
  double threshold = 0.6;
  double margin = 0.2;

  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

std::string_view to_string(DetectorType t) noexcept;

struct Manifest {
  std::vector<SourceGroup> sources;
  std::vector<std::string> models;
  MetricKind metric = MetricKind::cosine;
  Mode1Config mode1;
  Mode2Config mode2;
  int max_dim = 720;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;

  // Extensions: how faces are found, which registry resolves `models`,
  // and the decode stride.
  DetectorConfig detector;
  std::filesystem::path registry;
  std::size_t stride = 1;

  friend bool operator==(const Manifest&, const Manifest&) = default;
};

// Stable identifier of a video inside a manifest: "<source>/<file name>".
std::string video_id(const SourceGroup& src, const std::filesystem::path& video);

// Parses and validates a YAML manifest. Relative paths are resolved against
// the manifest's directory. Errors carry "<file>:<line>:<col>" context.
Manifest load_manifest(const std::filesystem::path& path);

// Same, from in-memory text; `origin` names the text in error messages and
// `base_dir` anchors relative paths.
Manifest parse_manifest(const std::string& text, const std::string& origin,
                        const std::filesystem::path& base_dir);

// Emits YAML that load_manifest turns back into an equal Manifest.
std::string serialize_manifest(const Manifest& m);

class ModelRegistry;
struct ModelSpec;

std::vector<ModelSpec> validate_against_registry(const Manifest& m,
                                                 const ModelRegistry& registry);
std::vector<ModelSpec> resolve_models(const std::vector<std::string>& ids,
                                      const ModelRegistry& registry);

}  // namespace fcb
