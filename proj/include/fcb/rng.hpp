#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "fcb/hash.hpp"

namespace fcb {

/// xoshiro256** with state words drawn from a splitmix64 sequence.
///
/// Seeding: state[i] = splitmix64(seed + i * 0x9e3779b97f4a7c15) for
/// i = 0..3, which is the standard "splitmix64 stream" expansion of a
/// single 64-bit seed. Output is the reference xoshiro256** scrambler.
class Xoshiro256 {
 public:
  explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
    for (std::uint64_t i = 0; i < 4; ++i) {
      state_[i] = splitmix64(seed + i * 0x9e3779b97f4a7c15ULL);
    }
  }

  static constexpr Xoshiro256 from_state(const std::array<std::uint64_t, 4>& state) noexcept {
    Xoshiro256 g(0);
    g.state_ = state;
    return g;
  }

  constexpr std::uint64_t next() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

// Per-video stream seed: independent of the order videos are processed in.
constexpr std::uint64_t video_stream_seed(std::uint64_t seed,
                                          std::string_view video_id) noexcept {
  return splitmix64(seed ^ fnv1a64(video_id));
}

}  // namespace fcb
