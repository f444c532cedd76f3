#pragma once

// Deterministic sample generation. Samples are produced as exact rationals
// and converted to the backend afterwards, so the exact and float backends
// see the same points.
//
// Random draws use SplitMix64:
//   state += 0x9E3779B97F4A7C15
//   z = state
//   z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   return z ^ (z >> 31)
// A uniform value in [lo, hi] at resolution R is lo + (hi - lo) * u / R with
// u = next() mod (R + 1).

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/scalar.hpp"

namespace modfix {

class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on the lattice {lo + (hi - lo) i / resolution : 0 <= i <= resolution}.
  Rational uniform(const Rational& lo, const Rational& hi, std::uint64_t resolution) {
    if (resolution == 0) throw PreconditionError("sampling resolution must be positive");
    std::uint64_t u = next() % (resolution + 1);
    return lo + (hi - lo) * Rational(BigInt(u), BigInt(resolution));
  }

  /// Uniform on the open lattice interval (lo, hi): never returns an endpoint.
  Rational uniform_open(const Rational& lo, const Rational& hi, std::uint64_t resolution) {
    if (resolution < 2) throw PreconditionError("open sampling needs resolution >= 2");
    std::uint64_t u = 1 + next() % (resolution - 1);
    return lo + (hi - lo) * Rational(BigInt(u), BigInt(resolution));
  }

 private:
  std::uint64_t state_;
};

using RationalPoint = std::vector<Rational>;

/// count equally spaced values from lo to hi inclusive (count >= 1; a single
/// value is lo).
inline std::vector<Rational> linear_grid(const Rational& lo, const Rational& hi, std::size_t count) {
  if (count == 0) throw PreconditionError("grid count must be >= 1");
  std::vector<Rational> out;
  out.reserve(count);
  if (count == 1) {
    out.push_back(lo);
    return out;
  }
  const Rational step = (hi - lo) / Rational(static_cast<long long>(count - 1));
  for (std::size_t i = 0; i < count; ++i) out.push_back(lo + step * Rational(static_cast<long long>(i)));
  return out;
}

/// Cartesian product of a 1-D grid over `dimension` axes, last axis fastest.
inline std::vector<RationalPoint> grid_points(const Rational& lo, const Rational& hi, std::size_t count,
                                              std::size_t dimension) {
  const auto axis = linear_grid(lo, hi, count);
  std::vector<RationalPoint> out{RationalPoint{}};
  for (std::size_t d = 0; d < dimension; ++d) {
    std::vector<RationalPoint> next;
    next.reserve(out.size() * axis.size());
    for (const auto& prefix : out)
      for (const auto& v : axis) {
        auto p = prefix;
        p.push_back(v);
        next.push_back(std::move(p));
      }
    out = std::move(next);
  }
  return out;
}

inline std::vector<RationalPoint> random_points(SplitMix64& rng, const Rational& lo, const Rational& hi,
                                                std::size_t count, std::size_t dimension,
                                                std::uint64_t resolution) {
  std::vector<RationalPoint> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    RationalPoint p;
    p.reserve(dimension);
    for (std::size_t d = 0; d < dimension; ++d) p.push_back(rng.uniform(lo, hi, resolution));
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace modfix
