#pragma once

// Counter-based random numbers. Every draw is a pure function of
// (seed, stream, step, lane, purpose), so a trajectory's noise never depends on
// which worker produced it or in what order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace hypoco {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kMul0 = 0xD2511F53u;
  static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

/// What a block of random bits is used for; keeps initial-state draws and
/// per-step noise in disjoint counter ranges.
enum class Purpose : std::uint32_t { Noise = 0, Initial = 1, Auxiliary = 2 };

/// Independent random stream for one trajectory (`stream`) of an experiment (`seed`).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        stream_(stream) {}

  Philox4x32::Counter bits(std::uint32_t step, std::uint32_t lane,
                           Purpose purpose = Purpose::Noise) const noexcept {
    const std::uint32_t tag = (lane & 0x00FFFFFFu) | (static_cast<std::uint32_t>(purpose) << 24);
    return Philox4x32::generate(
        {step, tag, static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)},
        key_);
  }

  /// Two uniforms in the open interval (0, 1) with 53 random bits each.
  std::array<double, 2> uniform2(std::uint32_t step, std::uint32_t lane,
                                 Purpose purpose = Purpose::Noise) const noexcept {
    const auto b = bits(step, lane, purpose);
    return {to_unit(b[0], b[1]), to_unit(b[2], b[3])};
  }

  /// Two independent standard normals (Box–Muller).
  std::array<double, 2> normal2(std::uint32_t step, std::uint32_t lane,
                                Purpose purpose = Purpose::Noise) const noexcept {
    const auto [u1, u2] = uniform2(step, lane, purpose);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
  }

  /// Fills `out` with standard normals for one step; lanes are consumed in pairs.
  void normals(std::uint32_t step, std::span<double> out, Purpose purpose = Purpose::Noise) const noexcept {
    for (std::size_t k = 0; k < out.size(); k += 2) {
      const auto z = normal2(step, static_cast<std::uint32_t>(k / 2), purpose);
      out[k] = z[0];
      if (k + 1 < out.size()) out[k + 1] = z[1];
    }
  }

  std::uint64_t stream() const noexcept { return stream_; }

 private:
  static double to_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
    const std::uint64_t word = (std::uint64_t{hi} << 32) | lo;
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
  }

  Philox4x32::Key key_;
  std::uint64_t stream_;
};

}  // namespace hypoco
