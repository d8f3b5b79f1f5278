#include "fcb/hash.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <vector>

#include "fcb/error.hpp"

namespace fcb {

namespace fs = std::filesystem;

std::string to_hex(std::uint64_t v) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx",
                static_cast<unsigned long long>(v));
  return std::string(buf.data(), 16);
}

namespace {

std::uint64_t hash_file(const fs::path& p, std::uint64_t h) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::array<char, 1 << 16> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    const auto n = static_cast<std::size_t>(in.gcount());
    h = fnv1a64(std::string_view(buf.data(), n), h);
  }
  return h;
}

}  // namespace

std::uint64_t hash_path_contents(const fs::path& p) {
  if (!fs::is_directory(p)) return hash_file(p, kFnvOffset);

  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(p)) {
    if (entry.is_regular_file()) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& f : files) {
    const std::string rel = fs::relative(f, p).generic_string();
    h = fnv1a64(rel, h);
    h = fnv1a64(std::string_view("\0", 1), h);
    h = hash_file(f, h);
  }
  return h;
}

}  // namespace fcb
