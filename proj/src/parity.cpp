#include "fcb/parity.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include "fcb/embed.hpp"
#include "fcb/error.hpp"

namespace fcb {

namespace fs = std::filesystem;

ParityFixture load_parity_fixture(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open parity fixture " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    const auto j = nlohmann::json::parse(ss.str());
    if (j.at("format") != "fcb-parity-fixture" || j.at("version") != 1) {
      throw Error(path.string() + ": not a version-1 parity fixture");
    }
    ParityFixture f;
    f.image = path.parent_path() / j.at("image").get<std::string>();
    f.model_id = j.at("model_id").get<std::string>();
    f.golden = j.at("golden").get<std::vector<double>>();
    f.reference_versions = j.value("reference_versions", nlohmann::json::object()).dump();
    double sq = 0;
    for (double v : f.golden) {
      if (!std::isfinite(v)) throw Error(path.string() + ": non-finite golden value");
      sq += v * v;
    }
    if (!(sq > 0)) throw Error(path.string() + ": zero-norm golden vector");
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

ParityResult check_parity(const ParityFixture& fixture, const ModelRegistry& registry) {
  const auto& spec = registry.find(fixture.model_id);
  if (fixture.golden.size() != static_cast<std::size_t>(spec.embedding_dim)) {
    throw Error("golden vector for '" + spec.id + "' has " + std::to_string(fixture.golden.size()) +
                " values, registry declares " + std::to_string(spec.embedding_dim));
  }
  cv::Mat bgr = cv::imread(fixture.image.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw Error("cannot read fixture image " + fixture.image.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);

  auto embedder = make_embedder(spec);
  const auto e = embedder->embed(rgb, 0);
  double dot = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < e.vector.size(); ++i) {
    dot += e.vector[i] * fixture.golden[i];
    aa += static_cast<double>(e.vector[i]) * e.vector[i];
    bb += fixture.golden[i] * fixture.golden[i];
  }
  return {spec.id, fixture.image, dot / (std::sqrt(aa) * std::sqrt(bb))};
}

}  // namespace fcb
