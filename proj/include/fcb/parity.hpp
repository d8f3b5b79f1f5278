#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fcb/registry.hpp"

namespace fcb {

// Golden embedding of a fixture crop, produced by the model export tooling
// from the reference implementation. JSON:
//   {"format": "fcb-parity-fixture", "version": 1, "image": "<png>",
//    "model_id": "...", "golden": [...], "preprocessing": {...},
//    "reference_versions": {...}}
// `image` is relative to the fixture file and already at the model's input size.
struct ParityFixture {
  std::filesystem::path image;
  std::string model_id;
  std::vector<double> golden;
  std::string reference_versions;  // raw JSON, provenance only
};

ParityFixture load_parity_fixture(const std::filesystem::path& path);

struct ParityResult {
  std::string model_id;
  std::filesystem::path image;
  double cosine_similarity = 0.0;
};

// Embeds the fixture image through the registry's backend and compares with
// the golden vector.
ParityResult check_parity(const ParityFixture& fixture, const ModelRegistry& registry);

}  // namespace fcb
