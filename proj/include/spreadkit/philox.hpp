#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>

namespace spreadkit {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(Key key) : key_(key) {}
  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Counter operator()(Counter ctr) const {
    Key k = key_;
    for (int r = 0; r < 10; ++r) {
      if (r > 0) {
        k[0] += 0x9E3779B9u;
        k[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k[0], static_cast<std::uint32_t>(p1),
             static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k[1], static_cast<std::uint32_t>(p0)};
    }
    return ctr;
  }

 private:
  Key key_;
};

/// Fills `out` with standard normals that are a pure function of (seed, stream).
/// Box-Muller on 53-bit uniforms in (0, 1).
inline void fill_normals(const Philox4x32& gen, std::uint64_t stream, std::span<double> out) {
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  const auto lo = static_cast<std::uint32_t>(stream);
  const auto hi = static_cast<std::uint32_t>(stream >> 32);
  std::uint32_t block = 0;
  for (std::size_t i = 0; i < out.size(); i += 2, ++block) {
    const auto x = gen({block, 0u, lo, hi});
    const std::uint64_t a = ((std::uint64_t{x[0]} << 32) | x[1]) >> 11;
    const std::uint64_t b = ((std::uint64_t{x[2]} << 32) | x[3]) >> 11;
    const double u1 = (static_cast<double>(a) + 0.5) * kScale;
    const double u2 = (static_cast<double>(b) + 0.5) * kScale;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * std::numbers::pi * u2;
    out[i] = r * std::cos(th);
    if (i + 1 < out.size()) out[i + 1] = r * std::sin(th);
  }
}

}  // namespace spreadkit
