#include "fcb/facegate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <opencv2/imgproc.hpp>
#include <opencv2/objdetect.hpp>

#include "fcb/error.hpp"

namespace fcb {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<FaceCandidate> FullFrameDetector::candidates(const FrameRecord& f) {
  return {FaceCandidate{cv::Rect2f(0.f, 0.f, static_cast<float>(f.image.cols),
                                   static_cast<float>(f.image.rows)),
                        1.0f, std::nullopt}};
}

// --- stub ------------------------------------------------------------------

namespace {

FaceCandidate parse_candidate(const json& j, const std::string& where) {
  FaceCandidate c;
  const auto& b = j.at("bbox");
  if (!b.is_array() || b.size() != 4) throw DetectorError(where + ": bbox must be [x,y,w,h]");
  c.bbox = {b[0].get<float>(), b[1].get<float>(), b[2].get<float>(), b[3].get<float>()};
  c.confidence = j.value("confidence", 1.0f);
  if (j.contains("landmarks")) {
    const auto& l = j["landmarks"];
    if (!l.is_array() || l.size() != 5) throw DetectorError(where + ": landmarks must be 5 points");
    Landmarks lm;
    for (std::size_t i = 0; i < 5; ++i) lm[i] = {l[i].at(0).get<float>(), l[i].at(1).get<float>()};
    c.landmarks = lm;
  }
  return c;
}

}  // namespace

void StubDetector::parse(const std::string& text, const std::string& origin) {
  try {
    const json root = json::parse(text);
    const auto def = root.value("default", std::string("none"));
    if (def == "full_frame") default_full_frame_ = true;
    else if (def != "none") throw DetectorError(origin + ": default must be none or full_frame");

    if (root.contains("frames")) {
      for (const auto& [key, value] : root["frames"].items()) {
        const std::size_t idx = std::stoull(key);
        const std::string where = origin + ": frame " + key;
        auto& list = frames_[idx];
        if (value.is_string()) {
          if (value.get<std::string>() != "none") throw DetectorError(where + ": expected \"none\"");
        } else if (value.is_array()) {
          for (const auto& c : value) list.push_back(parse_candidate(c, where));
        } else {
          list.push_back(parse_candidate(value, where));
        }
      }
    }
  } catch (const json::exception& e) {
    throw DetectorError(origin + ": " + e.what());
  } catch (const std::invalid_argument&) {
    throw DetectorError(origin + ": frame keys must be frame indices");
  }
}

StubDetector::StubDetector(const fs::path& script, double threshold) : threshold_(threshold) {
  std::ifstream in(script, std::ios::binary);
  if (!in) throw DetectorError("cannot open stub detector script " + script.string());
  std::stringstream ss;
  ss << in.rdbuf();
  parse(ss.str(), script.string());
}

StubDetector StubDetector::from_json(const std::string& json_text, double threshold,
                                     const std::string& origin) {
  StubDetector d;
  d.threshold_ = threshold;
  d.parse(json_text, origin);
  return d;
}

std::vector<FaceCandidate> StubDetector::candidates(const FrameRecord& f) {
  if (auto it = frames_.find(f.frame_index); it != frames_.end()) return it->second;
  if (default_full_frame_) return FullFrameDetector{}.candidates(f);
  return {};
}

// --- neural ----------------------------------------------------------------

struct NeuralDetector::Impl {
  cv::Ptr<cv::FaceDetectorYN> yn;
};

NeuralDetector::NeuralDetector(const fs::path& model, double threshold)
    : impl_(std::make_unique<Impl>()), threshold_(threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw DetectorError("detector threshold must be in (0,1)");
  }
  if (!fs::is_regular_file(model)) throw DetectorError("detector model not found: " + model.string());
  try {
    impl_->yn = cv::FaceDetectorYN::create(model.string(), "", cv::Size(320, 320),
                                           static_cast<float>(threshold), 0.3f, 5000);
  } catch (const cv::Exception& e) {
    throw DetectorError("cannot load detector model " + model.string() + ": " + e.what());
  }
  if (!impl_->yn) throw DetectorError("cannot load detector model " + model.string());
}

NeuralDetector::~NeuralDetector() = default;

std::vector<FaceCandidate> NeuralDetector::candidates(const FrameRecord& f) {
  cv::Mat bgr;
  cv::cvtColor(f.image, bgr, cv::COLOR_RGB2BGR);
  cv::Mat faces;
  try {
    impl_->yn->setInputSize(bgr.size());
    impl_->yn->detect(bgr, faces);
  } catch (const cv::Exception& e) {
    throw DetectorError(std::string("face detector failed: ") + e.what());
  }
  std::vector<FaceCandidate> out;
  for (int r = 0; r < faces.rows; ++r) {
    const float* row = faces.ptr<float>(r);
    FaceCandidate c;
    c.bbox = {row[0], row[1], row[2], row[3]};
    Landmarks lm;
    for (int i = 0; i < 5; ++i) lm[i] = {row[4 + 2 * i], row[5 + 2 * i]};
    c.landmarks = lm;
    c.confidence = row[14];
    out.push_back(c);
  }
  return out;
}

std::unique_ptr<FaceDetector> make_detector(const DetectorConfig& cfg, const std::string& video_id) {
  switch (cfg.type) {
    case DetectorType::full_frame: return std::make_unique<FullFrameDetector>();
    case DetectorType::stub:
      return std::make_unique<StubDetector>(cfg.scripts / (video_id + ".json"), cfg.threshold);
    case DetectorType::neural: return std::make_unique<NeuralDetector>(cfg.model, cfg.threshold);
  }
  throw DetectorError("unknown detector type");
}

// --- selection -------------------------------------------------------------

namespace {

cv::Rect to_pixel_rect(const cv::Rect2f& r) {
  const int x0 = static_cast<int>(std::lround(r.x));
  const int y0 = static_cast<int>(std::lround(r.y));
  const int x1 = static_cast<int>(std::lround(r.x + r.width));
  const int y1 = static_cast<int>(std::lround(r.y + r.height));
  return {x0, y0, x1 - x0, y1 - y0};
}

}  // namespace

std::optional<FaceObservation> select_primary_face(std::span<const FaceCandidate> candidates,
                                                   cv::Size frame_size, double threshold,
                                                   std::size_t frame_index) {
  const cv::Rect frame_rect({0, 0}, frame_size);
  std::optional<FaceObservation> best;
  for (const auto& c : candidates) {
    if (!(c.confidence >= threshold)) continue;
    const cv::Rect box = to_pixel_rect(c.bbox) & frame_rect;
    if (box.width < kMinFaceSide || box.height < kMinFaceSide) continue;
    if (best) {
      const auto area = box.area();
      const auto best_area = best->bbox.area();
      if (area < best_area) continue;
      if (area == best_area &&
          std::tie(box.y, box.x) >= std::tie(best->bbox.y, best->bbox.x)) {
        continue;
      }
    }
    best = FaceObservation{frame_index, box, c.confidence, c.landmarks, {}};
  }
  return best;
}

std::optional<FaceObservation> detect_primary_face(const FrameRecord& f, FaceDetector& d) {
  const auto cands = d.candidates(f);
  return select_primary_face(cands, f.image.size(), d.threshold(), f.frame_index);
}

// --- alignment -------------------------------------------------------------

std::optional<cv::Matx23d> estimate_similarity(std::span<const cv::Point2f> src,
                                               std::span<const cv::Point2f> dst) {
  if (src.size() != dst.size() || src.size() < 2) return std::nullopt;
  const double n = static_cast<double>(src.size());
  double msx = 0, msy = 0, mdx = 0, mdy = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    msx += src[i].x;
    msy += src[i].y;
    mdx += dst[i].x;
    mdy += dst[i].y;
  }
  msx /= n;
  msy /= n;
  mdx /= n;
  mdy /= n;

  double denom = 0, num_a = 0, num_b = 0;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const double xs = src[i].x - msx, ys = src[i].y - msy;
    const double xd = dst[i].x - mdx, yd = dst[i].y - mdy;
    denom += xs * xs + ys * ys;
    num_a += xs * xd + ys * yd;
    num_b += xs * yd - ys * xd;
  }
  if (denom < 1e-9) return std::nullopt;
  const double a = num_a / denom;
  const double b = num_b / denom;
  if (a == 0.0 && b == 0.0) return std::nullopt;
  const double tx = mdx - (a * msx - b * msy);
  const double ty = mdy - (b * msx + a * msy);
  return cv::Matx23d(a, -b, tx, b, a, ty);
}

cv::Rect expanded_square(const cv::Rect& bbox, double margin) {
  const double longest = std::max(bbox.width, bbox.height);
  const int side = std::max(1, static_cast<int>(std::lround(longest * (1.0 + margin))));
  const double cx = bbox.x + bbox.width / 2.0;
  const double cy = bbox.y + bbox.height / 2.0;
  const int x0 = static_cast<int>(std::lround(cx - side / 2.0));
  const int y0 = static_cast<int>(std::lround(cy - side / 2.0));
  return {x0, y0, side, side};
}

namespace {

bool degenerate_landmarks(const Landmarks& lm) {
  const double eye_dist = std::hypot(lm[1].x - lm[0].x, lm[1].y - lm[0].y);
  return !(eye_dist >= 1.0);
}

cv::Mat bbox_crop(const cv::Mat& image, const cv::Rect& bbox, cv::Size input_size, double margin) {
  const cv::Rect box = expanded_square(bbox, margin);
  cv::Mat padded = cv::Mat::zeros(box.size(), image.type());
  const cv::Rect inside = box & cv::Rect({0, 0}, image.size());
  if (inside.area() > 0) {
    image(inside).copyTo(padded(inside - box.tl()));
  }
  cv::Mat crop;
  cv::resize(padded, crop, input_size, 0, 0, cv::INTER_AREA);
  return crop;
}

}  // namespace

FaceObservation align_and_crop(const FrameRecord& f, FaceObservation obs, cv::Size input_size,
                               const AlignmentTemplate& tpl, double margin, AlignStats* stats) {
  if (obs.landmarks) {
    std::optional<cv::Matx23d> m;
    if (!degenerate_landmarks(*obs.landmarks)) {
      const auto dst = tpl.scaled_to(input_size);
      m = estimate_similarity(*obs.landmarks, dst);
    }
    if (m) {
      cv::warpAffine(f.image, obs.crop, cv::Mat(*m), input_size, cv::INTER_LINEAR,
                     cv::BORDER_CONSTANT, cv::Scalar::all(0));
      return obs;
    }
    if (stats) ++stats->degenerate_fallbacks;
  }
  obs.crop = bbox_crop(f.image, obs.bbox, input_size, margin);
  return obs;
}

}  // namespace fcb
