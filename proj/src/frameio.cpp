#include "fcb/frameio.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/videoio.hpp>

#include "fcb/error.hpp"

namespace fcb {

namespace fs = std::filesystem;

namespace {

std::optional<unsigned long long> numeric_stem(const fs::path& p) {
  const std::string stem = p.stem().string();
  unsigned long long v = 0;
  auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + stem.size(), v);
  if (stem.empty() || ec != std::errc{} || ptr != stem.data() + stem.size()) return std::nullopt;
  return v;
}

cv::Mat to_rgb(const cv::Mat& decoded) {
  cv::Mat rgb;
  switch (decoded.channels()) {
    case 1: cv::cvtColor(decoded, rgb, cv::COLOR_GRAY2RGB); break;
    case 4: cv::cvtColor(decoded, rgb, cv::COLOR_BGRA2RGB); break;
    default: cv::cvtColor(decoded, rgb, cv::COLOR_BGR2RGB); break;
  }
  if (rgb.depth() != CV_8U) {
    // 16-bit PNGs and similar: scale into 8 bits.
    const double scale = rgb.depth() == CV_16U ? 1.0 / 257.0 : 1.0;
    rgb.convertTo(rgb, CV_8U, scale);
  }
  return rgb;
}

}  // namespace

struct VideoReader::Impl {
  fs::path path;
  std::size_t stride = 1;
  std::size_t next_index = 0;  // decode index of the next raw frame
  std::size_t decoded = 0;

  // Frame-folder mode.
  bool folder = false;
  std::vector<fs::path> files;

  // Container mode.
  cv::VideoCapture capture;
  std::optional<FrameRecord> pending;  // first frame, decoded eagerly

  std::optional<FrameRecord> read_raw() {
    if (folder) {
      if (next_index >= files.size()) return std::nullopt;
      cv::Mat img = cv::imread(files[next_index].string(), cv::IMREAD_UNCHANGED);
      if (img.empty()) throw DecodeError("cannot decode frame image " + files[next_index].string());
      FrameRecord f{next_index, static_cast<double>(next_index) / kFrameFolderFps, to_rgb(img)};
      ++next_index;
      ++decoded;
      return f;
    }
    if (pending) {
      auto f = std::move(*pending);
      pending.reset();
      return f;
    }
    cv::Mat img;
    if (!capture.read(img) || img.empty()) return std::nullopt;
    double ts = capture.get(cv::CAP_PROP_POS_MSEC) / 1000.0;
    if (!std::isfinite(ts) || ts < 0.0) ts = 0.0;
    FrameRecord f{next_index, ts, to_rgb(img)};
    ++next_index;
    ++decoded;
    return f;
  }
};

VideoReader::VideoReader(const fs::path& path, std::size_t stride)
    : impl_(std::make_unique<Impl>()) {
  if (stride == 0) throw DecodeError("stride must be >= 1");
  impl_->path = path;
  impl_->stride = stride;

  if (fs::is_directory(path)) {
    impl_->folder = true;
    std::vector<std::pair<unsigned long long, fs::path>> numbered;
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      if (auto n = numeric_stem(entry.path())) numbered.emplace_back(*n, entry.path());
    }
    std::sort(numbered.begin(), numbered.end());
    for (auto& [_, p] : numbered) impl_->files.push_back(std::move(p));
    if (impl_->files.empty()) {
      throw DecodeError("frame folder has no numerically named images: " + path.string());
    }
    return;
  }

  if (!fs::exists(path)) throw DecodeError("video not found: " + path.string());
  if (!impl_->capture.open(path.string(), cv::CAP_FFMPEG) || !impl_->capture.isOpened()) {
    throw DecodeError("cannot open video container: " + path.string());
  }
  impl_->pending = impl_->read_raw();
  if (!impl_->pending) throw DecodeError("no decodable frames in " + path.string());
}

VideoReader::~VideoReader() = default;
VideoReader::VideoReader(VideoReader&&) noexcept = default;
VideoReader& VideoReader::operator=(VideoReader&&) noexcept = default;

std::optional<FrameRecord> VideoReader::next() {
  while (auto f = impl_->read_raw()) {
    if (f->frame_index % impl_->stride == 0) return f;
  }
  return std::nullopt;
}

std::size_t VideoReader::frames_decoded() const noexcept { return impl_->decoded; }

cv::Size normalized_size(cv::Size in, int max_dim) {
  const int longest = std::max(in.width, in.height);
  if (longest <= max_dim) return in;
  const double s = static_cast<double>(max_dim) / static_cast<double>(longest);
  auto scaled = [&](int v) {
    return std::max(1, static_cast<int>(std::lround(static_cast<double>(v) * s)));
  };
  if (in.width >= in.height) return {max_dim, scaled(in.height)};
  return {scaled(in.width), max_dim};
}

FrameRecord normalize_resolution(const FrameRecord& f, int max_dim) {
  const cv::Size target = normalized_size(f.image.size(), max_dim);
  if (target == f.image.size()) return f;
  FrameRecord out{f.frame_index, f.timestamp, {}};
  cv::resize(f.image, out.image, target, 0, 0, cv::INTER_AREA);
  return out;
}

}  // namespace fcb
