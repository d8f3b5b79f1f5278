#include "fcb/types.hpp"

#include <charconv>

#include "fcb/error.hpp"

namespace fcb {

std::string_view to_string(MetricKind k) noexcept {
  switch (k) {
    case MetricKind::cosine: return "cosine";
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::euclidean_l2: return "euclidean_l2";
  }
  return "?";
}

std::string_view to_string(ComparisonMode m) noexcept {
  return m == ComparisonMode::mode1 ? "mode1" : "mode2";
}

std::string_view to_string(SourceKind k) noexcept {
  return k == SourceKind::real ? "real" : "generated";
}

MetricKind parse_metric(std::string_view s) {
  if (s == "cosine") return MetricKind::cosine;
  if (s == "euclidean") return MetricKind::euclidean;
  if (s == "euclidean_l2") return MetricKind::euclidean_l2;
  throw Error("unknown metric '" + std::string(s) +
              "' (expected cosine, euclidean or euclidean_l2)");
}

ComparisonMode parse_mode(std::string_view s) {
  if (s == "mode1" || s == "1") return ComparisonMode::mode1;
  if (s == "mode2" || s == "2") return ComparisonMode::mode2;
  throw Error("unknown mode '" + std::string(s) + "'");
}

SourceKind parse_source_kind(std::string_view s) {
  if (s == "real") return SourceKind::real;
  if (s == "generated") return SourceKind::generated;
  throw Error("unknown source kind '" + std::string(s) +
              "' (expected real or generated)");
}

ReferenceChoice parse_reference(std::string_view s) {
  if (s == "first_valid") return ReferenceChoice::first_valid();
  if (s == "medoid") return ReferenceChoice::medoid();
  constexpr std::string_view prefix = "index:";
  if (s.starts_with(prefix)) {
    const auto digits = s.substr(prefix.size());
    std::size_t k = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
    if (!digits.empty() && ec == std::errc{} && ptr == digits.data() + digits.size()) {
      return ReferenceChoice::at(k);
    }
  }
  throw Error("invalid reference '" + std::string(s) +
              "' (expected first_valid, index:<k> or medoid)");
}

std::string to_string(const ReferenceChoice& r) {
  switch (r.kind) {
    case ReferenceChoice::Kind::first_valid: return "first_valid";
    case ReferenceChoice::Kind::medoid: return "medoid";
    case ReferenceChoice::Kind::index: return "index:" + std::to_string(r.index);
  }
  return "?";
}

}  // namespace fcb
