#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <optional>

#include <opencv2/core/mat.hpp>

namespace fcb {

struct FrameRecord {
  std::size_t frame_index = 0;  // decode order, not renumbered by stride
  double timestamp = 0.0;       // seconds
  cv::Mat image;                // CV_8UC3, RGB channel order
};

// Frame-folder videos have no container clock; timestamps use this rate.
inline constexpr double kFrameFolderFps = 25.0;

/// Single-consumer stream of decoded frames.
///
/// Accepts anything cv::VideoCapture (FFMPEG) can open, or a directory of
/// numerically named images ("frame-folder video", sorted by numeric stem,
/// non-numeric names ignored). Construction decodes the first frame, so an
/// unreadable container or a video with zero decodable frames throws
/// DecodeError up front.
class VideoReader {
 public:
  VideoReader(const std::filesystem::path& path, std::size_t stride = 1);
  ~VideoReader();
  VideoReader(VideoReader&&) noexcept;
  VideoReader& operator=(VideoReader&&) noexcept;

  // Next frame with frame_index % stride == 0, or nullopt at end of stream.
  std::optional<FrameRecord> next();

  std::size_t frames_decoded() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Downscales (area averaging) so max(width, height) == max_dim; frames that
// already fit are returned unchanged. Never upscales.
FrameRecord normalize_resolution(const FrameRecord& f, int max_dim);

// Target size used by normalize_resolution.
cv::Size normalized_size(cv::Size in, int max_dim);

}  // namespace fcb
