#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace edyn::sde {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11). A 128-bit
/// counter and 64-bit key map to four 32-bit outputs with no hidden state,
/// so every walker can own an independent stream addressed by
/// (seed, walker, step) and parallel runs reproduce serial ones bit for bit.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      ctr = single_round(ctr, key);
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

  static Counter single_round(const Counter& c, const Key& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Gaussian and uniform draws for one (seed, stream, step) triple. Normals
/// come from Box-Muller on 53-bit uniforms: a fixed number of generator
/// calls per draw, no rejection.
class WalkerStream {
 public:
  WalkerStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t step)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        ctr_{0u, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
             static_cast<std::uint32_t>(stream)},
        stream_hi_(static_cast<std::uint32_t>(stream >> 32)) {
    // High stream bits are folded into the key so that up to 2^64 streams stay distinct.
    key_[1] ^= stream_hi_ * 0x85EBCA6Bu;
  }

  /// Uniform on (0, 1].
  double uniform() {
    if (pending_uniforms_ == 0) refill();
    return uniforms_[static_cast<std::size_t>(--pending_uniforms_)];
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  void refill() {
    const auto out = Philox4x32::block(ctr_, key_);
    ++ctr_[0];
    constexpr double k2m53 = 1.0 / 9007199254740992.0;
    const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32 | out[1]) >> 11;
    const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32 | out[3]) >> 11;
    // Stored in reverse so uniform() pops them in order.
    uniforms_[1] = static_cast<double>(a + 1) * k2m53;
    uniforms_[0] = static_cast<double>(b + 1) * k2m53;
    pending_uniforms_ = 2;
  }

  Philox4x32::Key key_;
  Philox4x32::Counter ctr_;
  std::uint32_t stream_hi_;
  std::array<double, 2> uniforms_{};
  int pending_uniforms_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace edyn::sde
