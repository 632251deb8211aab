#pragma once

#include <array>
#include <cstdint>

#include "cavkin/types.hpp"

namespace cavkin {

// Counter-based random numbers (Philox 4x32-10). Every draw is a pure
// function of (master seed, stream id, trajectory index, step/slot index),
// so trajectories can run on any number of threads in any order and still
// produce bit-identical results.

using Counter4 = std::array<std::uint32_t, 4>;
using Key2 = std::array<std::uint32_t, 2>;

Counter4 philox4x32_10(Counter4 counter, Key2 key);

enum class Stream : std::uint32_t {
  initial_conditions = 0,
  field_noise = 1,
  sampling = 2,  // generic sampling (synthetic data, fits)
};

struct GaussianPair {
  Real z1;
  Real z2;
};

// Two independent standard normals for (seed, stream, index, slot).
GaussianPair normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index,
                         std::uint64_t slot);

// Uniform in [0, 1) for (seed, stream, index, slot).
Real uniform01(std::uint64_t seed, Stream stream, std::uint64_t index,
               std::uint64_t slot);

// Convenience view of one logical stream.
class RngStream {
 public:
  RngStream(std::uint64_t seed, Stream stream, std::uint64_t index)
      : seed_(seed), stream_(stream), index_(index) {}

  GaussianPair normal_pair(std::uint64_t slot) const {
    return cavkin::normal_pair(seed_, stream_, index_, slot);
  }
  Real uniform01(std::uint64_t slot) const {
    return cavkin::uniform01(seed_, stream_, index_, slot);
  }

 private:
  std::uint64_t seed_;
  Stream stream_;
  std::uint64_t index_;
};

}  // namespace cavkin
