#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "projdim/matrix_words.hpp"

namespace projdim::detail {

using Rng = std::mt19937_64;

// splitmix64 step; derives independent stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform on (0, 1).
inline double uniform_open(Rng& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

inline double exponential(Rng& rng) { return -std::log(uniform_open(rng)); }

// Uniform point of the standard simplex by normalised exponential spacings.
inline Point uniform_on_simplex(Rng& rng, std::size_t n) {
  Point x(n);
  double total = 0;
  for (auto& v : x) {
    v = exponential(rng);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

// Uniform point of the simplex with the given vertices (Dirichlet(1,...,1) weights).
inline Point uniform_in_hull(Rng& rng, const std::vector<Point>& vertices) {
  const Point w = uniform_on_simplex(rng, vertices.size());
  Point x(vertices.front().size(), 0.0);
  for (std::size_t j = 0; j < vertices.size(); ++j)
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += w[j] * vertices[j][i];
  return x;
}

}  // namespace projdim::detail
