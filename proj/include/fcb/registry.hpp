#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core/types.hpp>

namespace fcb {

enum class Backend { toy, onnx };
enum class ChannelOrder { rgb, bgr };
enum class TensorLayout { nchw, nhwc };

// value = (pixel * scale - mean[c]) / std[c], channel c in `order`.
struct Preprocessing {
  double scale = 1.0 / 255.0;
  std::array<double, 3> mean{0.0, 0.0, 0.0};
  std::array<double, 3> std{1.0, 1.0, 1.0};
  ChannelOrder order = ChannelOrder::rgb;
  TensorLayout layout = TensorLayout::nchw;

  friend bool operator==(const Preprocessing&, const Preprocessing&) = default;
};

struct ModelSpec {
  std::string id;
  Backend backend = Backend::onnx;
  cv::Size input_size;
  int embedding_dim = 0;
  Preprocessing preprocessing;
  std::filesystem::path weights;  // empty for the toy backend

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

// Canonical five-point face layout (left eye, right eye, nose, left mouth
// corner, right mouth corner) defined on a reference canvas.
struct AlignmentTemplate {
  cv::Size size{112, 112};
  std::array<cv::Point2f, 5> points{};

  // Template points mapped onto a canvas of `target` pixels.
  std::array<cv::Point2f, 5> scaled_to(cv::Size target) const;
};

class ModelRegistry {
 public:
  static ModelRegistry load(const std::filesystem::path& path);
  static ModelRegistry parse(const std::string& json_text,
                             const std::filesystem::path& base_dir,
                             const std::string& origin = "<registry>");

  // Throws RegistryError naming the available ids.
  const ModelSpec& find(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;

  const std::vector<ModelSpec>& models() const { return models_; }
  const AlignmentTemplate& alignment_template() const { return template_; }
  std::uint64_t content_hash() const { return hash_; }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::vector<ModelSpec> models_;
  AlignmentTemplate template_;
  std::uint64_t hash_ = 0;
  std::filesystem::path path_;
};

std::filesystem::path default_registry_path();

}  // namespace fcb
