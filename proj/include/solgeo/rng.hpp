#ifndef SOLGEO_RNG_HPP
#define SOLGEO_RNG_HPP

// Counter-based Gaussian streams (Philox4x32-10). Every variate is a pure
// function of (seed, path index, channel, position), so paths can be
// simulated in any order on any number of workers with identical results.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

#include "solgeo/types.hpp"

namespace solgeo {

namespace detail {

inline void philox_round(std::array<std::uint32_t, 4>& ctr, const std::array<std::uint32_t, 2>& key) {
  constexpr std::uint64_t kM0 = 0xD2511F53;
  constexpr std::uint64_t kM1 = 0xCD9E8D57;
  const std::uint64_t p0 = kM0 * ctr[0];
  const std::uint64_t p1 = kM1 * ctr[2];
  ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
         static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
}

}  // namespace detail

/// Philox4x32 with 10 rounds (Salmon et al. 2011 constants).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kW0 = 0x9E3779B9;
  constexpr std::uint32_t kW1 = 0xBB67AE85;
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    detail::philox_round(ctr, key);
  }
  return ctr;
}

/// Independent noise sources of one sample path.
enum class Channel : std::uint32_t { W = 0, W1 = 1, W2 = 2, reference = 3 };

/// Standard normal variates number 0, 1, 2, ... of one (seed, path, channel)
/// stream. Block k of the counter yields variates 2k and 2k+1 (Box-Muller on
/// two 53-bit uniforms).
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t path, Channel channel)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        path_lo_(static_cast<std::uint32_t>(path)),
        channel_(static_cast<std::uint32_t>(channel) |
                 (static_cast<std::uint32_t>(path >> 32) << 2)) {
    if ((path >> 62) != 0) throw DomainError("NormalStream: path index too large");
  }

  /// Next variate of the stream.
  double operator()() {
    if (slot_ == 2) {
      fill(block_++);
      slot_ = 0;
    }
    return cache_[slot_++];
  }

  /// Variate number k, independent of the sequential position.
  [[nodiscard]] double at(std::uint64_t k) const {
    NormalStream tmp = *this;
    tmp.fill(k / 2);
    return tmp.cache_[k % 2];
  }

 private:
  void fill(std::uint64_t block) {
    const auto r = philox4x32({static_cast<std::uint32_t>(block),
                               static_cast<std::uint32_t>(block >> 32), channel_, path_lo_},
                              key_);
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    const std::uint64_t a = (static_cast<std::uint64_t>(r[0]) << 21) ^ (r[1] >> 11);
    const std::uint64_t b = (static_cast<std::uint64_t>(r[2]) << 21) ^ (r[3] >> 11);
    const double u1 = (static_cast<double>(a & ((1ULL << 53) - 1)) + 1.0) * kScale;  // (0,1]
    const double u2 = static_cast<double>(b & ((1ULL << 53) - 1)) * kScale;          // [0,1)
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * std::numbers::pi * u2;
    cache_[0] = rad * std::cos(ang);
    cache_[1] = rad * std::sin(ang);
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t path_lo_;
  std::uint32_t channel_;
  std::uint64_t block_ = 0;
  int slot_ = 2;
  std::array<double, 2> cache_{};
};

}  // namespace solgeo

#endif  // SOLGEO_RNG_HPP
