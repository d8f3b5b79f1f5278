#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <opencv2/core/mat.hpp>
#include <opencv2/core/matx.hpp>

#include "fcb/frameio.hpp"
#include "fcb/manifest.hpp"
#include "fcb/registry.hpp"

namespace fcb {

// Two eyes, nose tip, two mouth corners, in frame pixels, ordered like the
// alignment template (image-left eye first).
using Landmarks = std::array<cv::Point2f, 5>;

inline constexpr int kMinFaceSide = 8;

struct FaceCandidate {
  cv::Rect2f bbox;
  float confidence = 0.0f;
  std::optional<Landmarks> landmarks;
};

struct FaceObservation {
  std::size_t frame_index = 0;
  cv::Rect bbox;
  float confidence = 0.0f;
  std::optional<Landmarks> landmarks;
  cv::Mat crop;  // empty until align_and_crop
};

class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  // Raw candidates; no thresholding or selection.
  virtual std::vector<FaceCandidate> candidates(const FrameRecord& f) = 0;
  virtual double threshold() const = 0;
};

// The whole frame is the face, confidence 1.
class FullFrameDetector final : public FaceDetector {
 public:
  std::vector<FaceCandidate> candidates(const FrameRecord& f) override;
  double threshold() const override { return 0.0; }
};

/// Replays a fixture script. JSON layout:
///
///   { "default": "none" | "full_frame",
///     "frames": { "<frame_index>": "none" | <candidate> | [<candidate>, ...] } }
///
/// with <candidate> = {"bbox": [x, y, w, h], "confidence": c,
///                     "landmarks": [[x, y] x5]}   (landmarks optional).
class StubDetector final : public FaceDetector {
 public:
  StubDetector(const std::filesystem::path& script, double threshold);
  static StubDetector from_json(const std::string& json_text, double threshold,
                                const std::string& origin = "<stub>");

  std::vector<FaceCandidate> candidates(const FrameRecord& f) override;
  double threshold() const override { return threshold_; }

 private:
  StubDetector() = default;
  void parse(const std::string& text, const std::string& origin);

  std::map<std::size_t, std::vector<FaceCandidate>> frames_;
  bool default_full_frame_ = false;
  double threshold_ = 0.6;
};

// YuNet via cv::FaceDetectorYN. Not internally synchronized: one per worker.
class NeuralDetector final : public FaceDetector {
 public:
  NeuralDetector(const std::filesystem::path& model, double threshold);
  ~NeuralDetector() override;

  std::vector<FaceCandidate> candidates(const FrameRecord& f) override;
  double threshold() const override { return threshold_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  double threshold_;
};

// Builds the detector for one video. Stub scripts live at
// <scripts>/<video_id>.json.
std::unique_ptr<FaceDetector> make_detector(const DetectorConfig& cfg,
                                            const std::string& video_id);

// Largest clipped bbox among candidates at or above `threshold`; ties go to
// the smaller top-left y, then x. Boxes are clipped to the frame and
// dropped when either side ends up below kMinFaceSide.
std::optional<FaceObservation> select_primary_face(std::span<const FaceCandidate> candidates,
                                                   cv::Size frame_size, double threshold,
                                                   std::size_t frame_index);

// nullopt means the frame has no usable face and is skipped.
std::optional<FaceObservation> detect_primary_face(const FrameRecord& f, FaceDetector& d);

// Least-squares similarity transform (rotation, uniform scale, translation)
// taking `src` onto `dst`. nullopt when src is degenerate.
std::optional<cv::Matx23d> estimate_similarity(std::span<const cv::Point2f> src,
                                               std::span<const cv::Point2f> dst);

// Square box around `bbox` grown by margin * max(w, h), centered.
cv::Rect expanded_square(const cv::Rect& bbox, double margin);

struct AlignStats {
  std::size_t degenerate_fallbacks = 0;
};

/// Fills obs.crop at exactly `input_size`.
///
/// With landmarks, the frame is warped so the five points land on
/// `tpl` scaled to input_size. Without them (or when the landmarks are
/// degenerate, which bumps stats->degenerate_fallbacks) the bbox is grown
/// by `margin`, squared, zero-padded where it leaves the frame, and resized.
FaceObservation align_and_crop(const FrameRecord& f, FaceObservation obs, cv::Size input_size,
                               const AlignmentTemplate& tpl, double margin,
                               AlignStats* stats = nullptr);

}  // namespace fcb
