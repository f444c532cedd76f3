#pragma once

#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/scalar.hpp"

namespace modfix {

/// An element of the ambient space R^d. Coordinates are always finite and
/// d >= 1.
template <Scalar T>
class Point {
 public:
  using value_type = T;

  explicit Point(std::vector<T> coords) : coords_(std::move(coords)) { validate(); }
  Point(std::initializer_list<T> coords) : coords_(coords) { validate(); }

  static Point zero(std::size_t dimension) {
    if (dimension == 0) throw DimensionError("point dimension must be >= 1");
    return Point(std::vector<T>(dimension, T(0)));
  }

  /// 1-dimensional convenience constructor.
  static Point scalar(T value) { return Point(std::vector<T>{std::move(value)}); }

  std::size_t dimension() const noexcept { return coords_.size(); }
  const T& operator[](std::size_t i) const { return coords_[i]; }
  std::span<const T> coords() const noexcept { return coords_; }

  bool is_zero() const {
    for (const auto& c : coords_)
      if (c != T(0)) return false;
    return true;
  }

  friend bool operator==(const Point& a, const Point& b) { return a.coords_ == b.coords_; }

  friend Point operator+(const Point& a, const Point& b) {
    require_same_dimension(a, b);
    std::vector<T> out(a.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] + b.coords_[i];
    return Point(std::move(out));
  }

  friend Point operator-(const Point& a, const Point& b) {
    require_same_dimension(a, b);
    std::vector<T> out(a.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coords_[i] - b.coords_[i];
    return Point(std::move(out));
  }

  friend Point operator-(const Point& a) {
    std::vector<T> out(a.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = -a.coords_[i];
    return Point(std::move(out));
  }

  friend Point operator*(const T& s, const Point& a) {
    std::vector<T> out(a.dimension());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = s * a.coords_[i];
    return Point(std::move(out));
  }

  friend std::ostream& operator<<(std::ostream& os, const Point& p) { return os << to_string(p); }

  friend std::string to_string(const Point& p) {
    if (p.dimension() == 1) return modfix::to_string(p.coords_[0]);
    std::string s = "(";
    for (std::size_t i = 0; i < p.dimension(); ++i) {
      if (i) s += ", ";
      s += modfix::to_string(p.coords_[i]);
    }
    return s + ")";
  }

 private:
  static void require_same_dimension(const Point& a, const Point& b) {
    if (a.dimension() != b.dimension())
      throw DimensionError("dimension mismatch: " + std::to_string(a.dimension()) + " vs " +
                           std::to_string(b.dimension()));
  }

  void validate() const {
    if (coords_.empty()) throw DimensionError("point dimension must be >= 1");
    for (const auto& c : coords_)
      if (!is_finite(c)) throw DomainError("non-finite coordinate");
  }

  std::vector<T> coords_;
};

template <Scalar T>
Point<T> point_from_rational(std::span<const Rational> coords) {
  std::vector<T> out;
  out.reserve(coords.size());
  for (const auto& c : coords) out.push_back(from_rational<T>(c));
  return Point<T>(std::move(out));
}

/// Largest absolute coordinate difference, as a double.
template <Scalar T>
double max_coordinate_gap(const Point<T>& a, const Point<T>& b) {
  if (a.dimension() != b.dimension()) throw DimensionError("dimension mismatch");
  double gap = 0;
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    double d = to_double(abs_value<T>(a[i] - b[i]));
    if (d > gap) gap = d;
  }
  return gap;
}

}  // namespace modfix
