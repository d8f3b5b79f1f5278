#include "fcb/embed.hpp"

#include <cmath>

#include <opencv2/dnn.hpp>
#include <opencv2/imgproc.hpp>

#include "fcb/error.hpp"

namespace fcb {

namespace fs = std::filesystem;

std::vector<float> toy_embed(const cv::Mat& rgb_crop) {
  cv::Mat f32;
  rgb_crop.convertTo(f32, CV_32F);
  cv::Mat gray;
  if (f32.channels() == 3) {
    cv::cvtColor(f32, gray, cv::COLOR_RGB2GRAY);
  } else {
    gray = f32;
  }
  cv::Mat small;
  cv::resize(gray, small, cv::Size(8, 8), 0, 0, cv::INTER_AREA);

  std::vector<float> v;
  v.reserve(64);
  for (int r = 0; r < 8; ++r) {
    for (int c = 0; c < 8; ++c) v.push_back(small.at<float>(r, c) / 255.0f);
  }
  v[0] += 1e-6f;
  return v;
}

Embedding Embedder::embed(const cv::Mat& rgb_crop, std::size_t frame_index) {
  if (rgb_crop.size() != spec_.input_size) {
    throw InferenceError("crop is " + std::to_string(rgb_crop.cols) + "x" +
                         std::to_string(rgb_crop.rows) + " but model '" + spec_.id +
                         "' expects " + std::to_string(spec_.input_size.width) + "x" +
                         std::to_string(spec_.input_size.height));
  }
  ++calls_;
  std::vector<float> v = infer(rgb_crop);
  if (v.size() != static_cast<std::size_t>(spec_.embedding_dim)) {
    throw InferenceError("model '" + spec_.id + "' produced " + std::to_string(v.size()) +
                         " values, registry declares " + std::to_string(spec_.embedding_dim));
  }
  double sq = 0.0;
  for (float x : v) {
    if (!std::isfinite(x)) {
      throw DegenerateEmbedding("non-finite embedding from '" + spec_.id + "' at frame " +
                                std::to_string(frame_index));
    }
    sq += static_cast<double>(x) * x;
  }
  if (!(sq > 0.0)) {
    throw DegenerateEmbedding("zero-norm embedding from '" + spec_.id + "' at frame " +
                              std::to_string(frame_index));
  }
  return {std::move(v), spec_.id, frame_index};
}

cv::Mat preprocess(const cv::Mat& rgb_crop, const Preprocessing& p) {
  const int h = rgb_crop.rows, w = rgb_crop.cols;
  const bool nchw = p.layout == TensorLayout::nchw;
  const int dims_nchw[] = {1, 3, h, w};
  const int dims_nhwc[] = {1, h, w, 3};
  cv::Mat blob(4, nchw ? dims_nchw : dims_nhwc, CV_32F);
  float* out = blob.ptr<float>();

  for (int y = 0; y < h; ++y) {
    const auto* row = rgb_crop.ptr<cv::Vec3b>(y);
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        const int src_c = p.order == ChannelOrder::rgb ? c : 2 - c;
        const double v = (row[x][src_c] * p.scale - p.mean[c]) / p.std[c];
        const std::size_t idx = nchw ? (static_cast<std::size_t>(c) * h + y) * w + x
                                     : (static_cast<std::size_t>(y) * w + x) * 3 + c;
        out[idx] = static_cast<float>(v);
      }
    }
  }
  return blob;
}

struct OnnxEmbedder::Impl {
  cv::dnn::Net net;
};

OnnxEmbedder::OnnxEmbedder(ModelSpec spec)
    : Embedder(std::move(spec)), impl_(std::make_unique<Impl>()) {
  const auto& weights = this->spec().weights;
  if (!fs::is_regular_file(weights)) {
    throw InferenceError("weights for model '" + this->spec().id + "' not found: " +
                         weights.string());
  }
  try {
    impl_->net = cv::dnn::readNetFromONNX(weights.string());
  } catch (const cv::Exception& e) {
    throw InferenceError("cannot load '" + weights.string() + "': " + e.what());
  }
  if (impl_->net.empty()) throw InferenceError("empty network in " + weights.string());
  impl_->net.setPreferableBackend(cv::dnn::DNN_BACKEND_OPENCV);
  impl_->net.setPreferableTarget(cv::dnn::DNN_TARGET_CPU);
}

OnnxEmbedder::~OnnxEmbedder() = default;

std::vector<float> OnnxEmbedder::infer(const cv::Mat& rgb_crop) {
  cv::Mat out;
  try {
    impl_->net.setInput(preprocess(rgb_crop, spec().preprocessing));
    out = impl_->net.forward();
  } catch (const cv::Exception& e) {
    throw InferenceError("inference failed for '" + spec().id + "': " + e.what());
  }
  if (!out.isContinuous()) out = out.clone();
  const auto* p = out.ptr<float>();
  return std::vector<float>(p, p + out.total());
}

std::unique_ptr<Embedder> make_embedder(const ModelSpec& spec) {
  if (spec.backend == Backend::toy) return std::make_unique<ToyEmbedder>(spec);
  return std::make_unique<OnnxEmbedder>(spec);
}

Embedding embed_crop(const cv::Mat& rgb_crop, Embedder& embedder, std::size_t frame_index) {
  return embedder.embed(rgb_crop, frame_index);
}

EmbeddingAccumulator::EmbeddingAccumulator(std::string video_id, Embedder& embedder)
    : embedder_(embedder) {
  set_.video_id = std::move(video_id);
  set_.model_id = embedder.spec().id;
}

void EmbeddingAccumulator::add(const FaceObservation& obs, std::vector<std::string>* warnings) {
  if (!set_.embeddings.empty() && obs.frame_index <= set_.embeddings.back().frame_index) {
    throw InferenceError("observations for " + set_.video_id + " are not ordered by frame index");
  }
  ++set_.total_frames;
  try {
    set_.embeddings.push_back(embedder_.embed(obs.crop, obs.frame_index));
  } catch (const DegenerateEmbedding& e) {
    ++set_.dropped_frames;
    if (warnings) warnings->push_back(set_.video_id + ": " + e.what() + " (frame dropped)");
  }
}

void EmbeddingAccumulator::skip(std::size_t n) {
  set_.skipped_frames += n;
  set_.total_frames += n;
}

EmbeddingSet EmbeddingAccumulator::finish() && { return std::move(set_); }

EmbeddingSet embed_video(std::span<const FaceObservation> observations, Embedder& embedder,
                         const std::string& video_id, std::size_t skipped_frames,
                         std::vector<std::string>* warnings) {
  EmbeddingAccumulator acc(video_id, embedder);
  acc.skip(skipped_frames);
  for (const auto& obs : observations) acc.add(obs, warnings);
  return std::move(acc).finish();
}

}  // namespace fcb
