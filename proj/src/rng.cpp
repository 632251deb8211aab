#include "cavkin/rng.hpp"

#include <cmath>

namespace cavkin {

namespace {

inline void philox_round(Counter4& c, const Key2& k) {
  constexpr std::uint64_t M0 = 0xD2511F53ull;
  constexpr std::uint64_t M1 = 0xCD9E8D57ull;
  const std::uint64_t p0 = M0 * c[0];
  const std::uint64_t p1 = M1 * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

inline Counter4 block(std::uint64_t seed, Stream stream, std::uint64_t index,
                      std::uint64_t slot) {
  Counter4 ctr = {static_cast<std::uint32_t>(slot),
                  static_cast<std::uint32_t>(slot >> 32),
                  static_cast<std::uint32_t>(index),
                  (static_cast<std::uint32_t>(index >> 32) << 8) |
                      static_cast<std::uint32_t>(stream)};
  Key2 key = {static_cast<std::uint32_t>(seed),
              static_cast<std::uint32_t>(seed >> 32)};
  return philox4x32_10(ctr, key);
}

// 53-bit uniform in (0, 1]; never returns 0 so log() is safe.
inline Real u53_pos(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<Real>(bits) + 1.0) * 0x1.0p-53;
}

}  // namespace

Counter4 philox4x32_10(Counter4 counter, Key2 key) {
  constexpr std::uint32_t W0 = 0x9E3779B9u;
  constexpr std::uint32_t W1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    philox_round(counter, key);
    key[0] += W0;
    key[1] += W1;
  }
  return counter;
}

GaussianPair normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index,
                         std::uint64_t slot) {
  const Counter4 r = block(seed, stream, index, slot);
  const Real u1 = u53_pos(r[0], r[1]);
  const Real u2 = u53_pos(r[2], r[3]);
  const Real rad = std::sqrt(-2.0 * std::log(u1));
  const Real ang = 2.0 * pi * u2;
  return {rad * std::cos(ang), rad * std::sin(ang)};
}

Real uniform01(std::uint64_t seed, Stream stream, std::uint64_t index,
               std::uint64_t slot) {
  const Counter4 r = block(seed, stream, index, slot);
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(r[0]) << 32) | r[1]) >> 11;
  return static_cast<Real>(bits) * 0x1.0p-53;
}

}  // namespace cavkin
