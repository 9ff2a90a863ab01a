#pragma once

/// @file rng.hpp
/// Counter-based random streams. Every draw is a pure function of
/// (seed, stream id, block counter), so path i always sees the same numbers
/// no matter how work is scheduled across threads.

#include <array>
#include <cmath>
#include <cstdint>

namespace invlab {

// Philox4x32-10 block cipher core (Salmon et al. constants).
struct Philox4x32 {
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                            std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t(kMul0) * ctr[0];
      const std::uint64_t p1 = std::uint64_t(kMul1) * ctr[2];
      const auto hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
      const auto hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// One logical stream: stream id goes into the counter's high words, the seed
// is the cipher key. Distinct (seed, stream) pairs give independent streams.
class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream)
      : key_{std::uint32_t(seed), std::uint32_t(seed >> 32)},
        stream_(stream) {}

  // Uniform on the open interval (0,1).
  double uniform() {
    const std::uint64_t r = next_u64();
    return (double(r >> 12) + 0.5) * 0x1.0p-52;
  }

  // Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_u64() {
    if (word_pos_ == 0) {
      buffer_ = Philox4x32::block(
          {std::uint32_t(block_), std::uint32_t(block_ >> 32),
           std::uint32_t(stream_), std::uint32_t(stream_ >> 32)},
          key_);
      ++block_;
    }
    const int base = word_pos_;
    word_pos_ = (word_pos_ + 2) % 4;
    return (std::uint64_t(buffer_[base]) << 32) | buffer_[base + 1];
  }

 private:
  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int word_pos_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

} // namespace invlab
