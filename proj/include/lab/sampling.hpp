#pragma once

#include <cstdint>

#include "lab/geometry.hpp"

namespace lab {

// splitmix64: cheap deterministic stream, used for seed scrambling and the
// randomized exactness tests. Not a statistical-quality generator and not
// meant to be one.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform double in [0,1) from a splitmix64 stream.
inline double uniform01(std::uint64_t& state) {
  return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
}

// Radical-inverse (van der Corput) in the given base.
inline double radical_inverse(std::uint64_t index, std::uint32_t base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

// Halton (2,3) sequence with a Cranley-Patterson rotation derived from the
// seed. Prefix-stable: sample i depends only on (seed, i), so enlarging the
// sample count keeps the earlier points.
class QuasiSampler {
 public:
  explicit QuasiSampler(std::uint64_t seed) {
    std::uint64_t s = seed * 0x9e3779b97f4a7c15ULL + 1;
    shift_x_ = uniform01(s);
    shift_y_ = uniform01(s);
  }

  Vec2 unit(std::uint64_t i) const {
    double x = radical_inverse(i + 1, 2) + shift_x_;
    double y = radical_inverse(i + 1, 3) + shift_y_;
    x -= std::floor(x);
    y -= std::floor(y);
    return {x, y};
  }

  Vec2 in_box(std::uint64_t i, const Box& box) const {
    Vec2 u = unit(i);
    return {box.xmin() + u.x * (box.xmax() - box.xmin()),
            box.ymin() + u.y * (box.ymax() - box.ymin())};
  }

 private:
  double shift_x_ = 0.0;
  double shift_y_ = 0.0;
};

}  // namespace lab
