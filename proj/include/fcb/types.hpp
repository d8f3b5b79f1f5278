#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace fcb {

enum class MetricKind { cosine, euclidean, euclidean_l2 };

enum class ComparisonMode { mode1, mode2 };

enum class SourceKind { real, generated };

std::string_view to_string(MetricKind k) noexcept;
std::string_view to_string(ComparisonMode m) noexcept;
std::string_view to_string(SourceKind k) noexcept;

// Throw fcb::Error on unknown names.
MetricKind parse_metric(std::string_view s);
ComparisonMode parse_mode(std::string_view s);  // "mode1"/"1", "mode2"/"2"
SourceKind parse_source_kind(std::string_view s);

// How Mode 1 picks its representative frame.
struct ReferenceChoice {
  enum class Kind { first_valid, index, medoid };

  Kind kind = Kind::first_valid;
  std::size_t index = 0;  // frame index, only meaningful for Kind::index

  static ReferenceChoice first_valid() { return {}; }
  static ReferenceChoice at(std::size_t k) { return {Kind::index, k}; }
  static ReferenceChoice medoid() { return {Kind::medoid, 0}; }

  friend bool operator==(const ReferenceChoice&, const ReferenceChoice&) = default;
};

// "first_valid" | "index:<k>" | "medoid"
ReferenceChoice parse_reference(std::string_view s);
std::string to_string(const ReferenceChoice& r);

struct Mode1Config {
  ReferenceChoice reference;
  friend bool operator==(const Mode1Config&, const Mode1Config&) = default;
};

struct Mode2Config {
  std::size_t num_pairs = 200;
  friend bool operator==(const Mode2Config&, const Mode2Config&) = default;
};

inline constexpr std::string_view kToolkitVersion = "0.1.0";

}  // namespace fcb
