#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core/mat.hpp>

#include "fcb/facegate.hpp"
#include "fcb/registry.hpp"

namespace fcb {

struct Embedding {
  std::vector<float> vector;
  std::string model_id;
  std::size_t frame_index = 0;

  friend bool operator==(const Embedding&, const Embedding&) = default;
};

struct EmbeddingSet {
  std::string video_id;
  std::string model_id;
  std::vector<Embedding> embeddings;  // strictly ascending frame_index
  std::size_t total_frames = 0;       // frames examined by the face gate
  std::size_t skipped_frames = 0;     // no face
  std::size_t dropped_frames = 0;     // degenerate embedding

  friend bool operator==(const EmbeddingSet&, const EmbeddingSet&) = default;
};

// Grayscale, area-resize to 8x8, row-major flatten scaled to [0,1], then
// +1e-6 on component 0 so the norm is never zero.
std::vector<float> toy_embed(const cv::Mat& rgb_crop);

/// Recognition backend bound to one ModelSpec. Instances hold inference
/// state and are not shared across threads.
class Embedder {
 public:
  explicit Embedder(ModelSpec spec) : spec_(std::move(spec)) {}
  virtual ~Embedder() = default;

  const ModelSpec& spec() const noexcept { return spec_; }

  // Checks crop size, runs the backend, and rejects zero-norm or
  // non-finite outputs with DegenerateEmbedding.
  Embedding embed(const cv::Mat& rgb_crop, std::size_t frame_index);

  std::size_t inference_calls() const noexcept { return calls_; }

 protected:
  virtual std::vector<float> infer(const cv::Mat& rgb_crop) = 0;

 private:
  ModelSpec spec_;
  std::size_t calls_ = 0;
};

class ToyEmbedder final : public Embedder {
 public:
  using Embedder::Embedder;

 protected:
  std::vector<float> infer(const cv::Mat& rgb_crop) override { return toy_embed(rgb_crop); }
};

// ONNX graph through cv::dnn, CPU target.
class OnnxEmbedder final : public Embedder {
 public:
  explicit OnnxEmbedder(ModelSpec spec);
  ~OnnxEmbedder() override;

 protected:
  std::vector<float> infer(const cv::Mat& rgb_crop) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::unique_ptr<Embedder> make_embedder(const ModelSpec& spec);

// Input tensor for an ONNX backend: 1x3xHxW (nchw) or 1xHxWx3 (nhwc) float.
cv::Mat preprocess(const cv::Mat& rgb_crop, const Preprocessing& p);

// Streaming form of embed_video: add() observations in frame order,
// skip() frames the gate rejected.
class EmbeddingAccumulator {
 public:
  EmbeddingAccumulator(std::string video_id, Embedder& embedder);

  void add(const FaceObservation& obs, std::vector<std::string>* warnings = nullptr);
  void skip(std::size_t n = 1);
  EmbeddingSet finish() &&;

 private:
  Embedder& embedder_;
  EmbeddingSet set_;
};

Embedding embed_crop(const cv::Mat& rgb_crop, Embedder& embedder, std::size_t frame_index = 0);

// One embedding per observation; degenerate outputs are dropped and counted
// in dropped_frames with a warning. `skipped_frames` comes from the gate.
EmbeddingSet embed_video(std::span<const FaceObservation> observations, Embedder& embedder,
                         const std::string& video_id, std::size_t skipped_frames,
                         std::vector<std::string>* warnings = nullptr);

}  // namespace fcb
