#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <string_view>

namespace tentmle::rng {

using Block = std::array<std::uint64_t, 4>;
using Key = std::array<std::uint64_t, 2>;

/// Philox4x64-10 block function (Salmon et al. counter-based generator).
inline Block philox4x64(Block ctr, Key key) {
  constexpr std::uint64_t kM0 = 0xD2E7470EE14C6C93ULL;
  constexpr std::uint64_t kM1 = 0xCA5A826395121157ULL;
  constexpr std::uint64_t kW0 = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kW1 = 0xBB67AE8584CAA73BULL;
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    const unsigned __int128 p0 = static_cast<unsigned __int128>(kM0) * ctr[0];
    const unsigned __int128 p1 = static_cast<unsigned __int128>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint64_t>(p0 >> 64), lo0 = static_cast<std::uint64_t>(p0);
    const auto hi1 = static_cast<std::uint64_t>(p1 >> 64), lo1 = static_cast<std::uint64_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// FNV-1a, used for purpose tags and file digests.
inline std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Sequential stream over one Philox key; the counter walks blocks 0, 1, 2, ...
class Stream {
 public:
  explicit Stream(Key key) : key_(key) {}

  /// Substream keyed by (seed, trial, purpose); independent of scheduling order.
  static Stream substream(std::uint64_t seed, std::uint64_t trial, std::string_view purpose) {
    const std::uint64_t tag = fnv1a(purpose);
    const std::uint64_t k0 = splitmix64(seed ^ splitmix64(tag));
    const std::uint64_t k1 = splitmix64(trial ^ splitmix64(k0));
    return Stream({k0, k1});
  }

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      buf_ = philox4x64({block_, 0, 0, 0}, key_);
      ++block_;
      pos_ = 0;
    }
    return buf_[pos_++];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open0() { return 1.0 - uniform(); }

  /// Standard normal by Box-Muller (both variates used).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_open0()));
    const double theta = 2.0 * M_PI * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  double exponential() { return -std::log(uniform_open0()); }

 private:
  Key key_;
  std::uint64_t block_ = 0;
  Block buf_{};
  int pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace tentmle::rng
