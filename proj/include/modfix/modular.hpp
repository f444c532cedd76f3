#pragma once

// Modular functionals on R^d and sampled falsifiers for the modular axioms
//   M1  rho(x) >= 0
//   M2  rho(x) = 0  iff  x = 0
//   M3  rho(-x) = rho(x)
//   M4  rho(ax + by) <= rho(x) + rho(y)          (a, b >= 0, a + b = 1)
//   M4' rho(ax + by) <= a rho(x) + b rho(y)      (convex modulars)
// A clean report means "no violation on this sample", never a proof.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/point.hpp"
#include "modfix/scalar.hpp"

namespace modfix {

enum class ModularFamily { abs_norm, power, weighted_power };

inline std::string_view family_name(ModularFamily f) {
  switch (f) {
    case ModularFamily::abs_norm: return "abs-norm";
    case ModularFamily::power: return "power";
    case ModularFamily::weighted_power: return "weighted-power";
  }
  return "?";
}

inline ModularFamily parse_family(std::string_view s) {
  if (s == "abs-norm") return ModularFamily::abs_norm;
  if (s == "power") return ModularFamily::power;
  if (s == "weighted-power") return ModularFamily::weighted_power;
  throw PreconditionError("unknown modular family '" + std::string(s) + "'");
}

/// Backend-independent description of a builtin modular
///   rho(x) = sum_i w_i |x_i|^p.
/// abs-norm is p = 1 (on R it is |x|); power has unit weights.
struct ModularSpec {
  ModularFamily family = ModularFamily::abs_norm;
  Rational exponent = 1;
  std::vector<Rational> weights;  // empty means all ones
  bool convex = true;

  static ModularSpec abs_norm() { return {}; }
  static ModularSpec power(Rational p) { return {ModularFamily::power, std::move(p), {}, true}; }
  static ModularSpec weighted_power(Rational p, std::vector<Rational> w) {
    return {ModularFamily::weighted_power, std::move(p), std::move(w), true};
  }

  void validate(std::size_t dimension) const {
    if (family == ModularFamily::abs_norm && exponent != 1)
      throw PreconditionError("abs-norm modular has exponent 1");
    if (exponent < 1) throw PreconditionError("modular exponent must be >= 1");
    if (family == ModularFamily::weighted_power && weights.empty())
      throw PreconditionError("weighted-power modular needs weights");
    if (family == ModularFamily::power && !weights.empty())
      throw PreconditionError("power modular takes no weights (use weighted-power)");
    if (!weights.empty() && weights.size() != dimension)
      throw DimensionError("modular has " + std::to_string(weights.size()) +
                           " weights for dimension " + std::to_string(dimension));
    for (const auto& w : weights)
      if (w <= 0) throw PreconditionError("modular weights must be strictly positive");
  }
};

/// A modular functional bound to a backend and a dimension: either a builtin
/// family or a caller-supplied functional (used for expression modulars and
/// for injecting deliberately broken functionals into the samplers).
template <Scalar T>
class Modular {
 public:
  using Functional = std::function<T(const Point<T>&)>;

  Modular(ModularSpec spec, std::size_t dimension) : dimension_(dimension), convex_(spec.convex) {
    if (dimension == 0) throw DimensionError("dimension must be >= 1");
    spec.validate(dimension);
    const bool integral_exponent = boost::multiprecision::denominator(spec.exponent) == 1;
    if constexpr (is_exact_v<T>) {
      if (!integral_exponent)
        throw PreconditionError("exact backend needs an integer modular exponent, got " +
                                to_string(spec.exponent));
    }
    std::vector<T> weights(dimension, T(1));
    for (std::size_t i = 0; i < spec.weights.size(); ++i) weights[i] = from_rational<T>(spec.weights[i]);
    description_ = describe(spec);
    if (integral_exponent) {
      auto p = static_cast<unsigned>(boost::multiprecision::numerator(spec.exponent));
      fn_ = [weights, p](const Point<T>& x) {
        T sum(0);
        for (std::size_t i = 0; i < x.dimension(); ++i) sum += weights[i] * pow_int(abs_value(x[i]), p);
        return sum;
      };
    } else {
      double p = to_double(spec.exponent);
      fn_ = [weights, p](const Point<T>& x) {
        T sum(0);
        for (std::size_t i = 0; i < x.dimension(); ++i)
          sum += weights[i] * T(std::pow(to_double(abs_value(x[i])), p));
        return sum;
      };
    }
    spec_ = std::move(spec);
  }

  static Modular custom(Functional fn, std::size_t dimension, bool convex, std::string description) {
    return Modular(std::move(fn), dimension, convex, std::move(description));
  }

  /// rho(x). Throws DimensionError if x does not live in this space.
  T operator()(const Point<T>& x) const {
    if (x.dimension() != dimension_)
      throw DimensionError("modular on R^" + std::to_string(dimension_) + " applied to a point of dimension " +
                           std::to_string(x.dimension()));
    return fn_(x);
  }

  std::size_t dimension() const noexcept { return dimension_; }
  bool convex() const noexcept { return convex_; }
  const std::string& description() const noexcept { return description_; }
  /// The builtin descriptor, or nullopt for custom functionals.
  const std::optional<ModularSpec>& spec() const noexcept { return spec_; }

 private:
  Modular(Functional fn, std::size_t dimension, bool convex, std::string description)
      : fn_(std::move(fn)), dimension_(dimension), convex_(convex), description_(std::move(description)) {
    if (dimension == 0) throw DimensionError("dimension must be >= 1");
  }

  static std::string describe(const ModularSpec& spec) {
    std::string s(family_name(spec.family));
    if (spec.family != ModularFamily::abs_norm) s += " p=" + to_string(spec.exponent);
    if (!spec.weights.empty()) {
      s += " w=(";
      for (std::size_t i = 0; i < spec.weights.size(); ++i) s += (i ? "," : "") + to_string(spec.weights[i]);
      s += ")";
    }
    return s;
  }

  Functional fn_;
  std::optional<ModularSpec> spec_;
  std::size_t dimension_;
  bool convex_;
  std::string description_;
};

template <Scalar T>
T eval_modular(const Modular<T>& rho, const Point<T>& x) {
  return rho(x);
}

/// rho(scale * (x - y)), the quantity every contraction inequality is built from.
template <Scalar T>
T rho_gap(const Modular<T>& rho, const T& scale, const Point<T>& x, const Point<T>& y) {
  if (!(scale > T(0))) throw PreconditionError("rho_gap scale must be positive");
  return rho(scale * (x - y));
}

// ---------------------------------------------------------------------------
// Axiom samplers

enum class Axiom { m1_nonnegative, m2_zero, m3_symmetric, m4_subadditive, m4_convex, scaling_monotone, n_term };

inline std::string_view axiom_name(Axiom a) {
  switch (a) {
    case Axiom::m1_nonnegative: return "M1";
    case Axiom::m2_zero: return "M2";
    case Axiom::m3_symmetric: return "M3";
    case Axiom::m4_subadditive: return "M4";
    case Axiom::m4_convex: return "M4'";
    case Axiom::scaling_monotone: return "scaling-monotone";
    case Axiom::n_term: return "n-term";
  }
  return "?";
}

template <Scalar T>
struct Coefficients {
  T a;
  T b;
};

template <Scalar T>
struct AxiomViolation {
  Axiom axiom;
  Point<T> x;
  std::optional<Point<T>> y;
  T a{0};
  T b{0};
  T lhs{0};
  T rhs{0};
};

template <Scalar T>
struct AxiomReport {
  std::size_t instances_checked = 0;
  std::vector<AxiomViolation<T>> violations;

  bool ok() const noexcept { return violations.empty(); }
  bool violates(Axiom a) const {
    return std::any_of(violations.begin(), violations.end(), [a](const auto& v) { return v.axiom == a; });
  }
};

/// The default convex coefficient sample used by the harness.
template <Scalar T>
std::vector<Coefficients<T>> default_coefficients() {
  return {{T(1), T(0)}, {T(0), T(1)}, {T(1) / T(2), T(1) / T(2)}, {T(1) / T(3), T(2) / T(3)}};
}

namespace detail {

template <Scalar T>
void require_sample(const std::vector<Point<T>>& sample, const std::vector<Coefficients<T>>& coeffs,
                    std::size_t dimension) {
  if (sample.empty()) throw PreconditionError("axiom check needs a nonempty sample");
  if (coeffs.empty()) throw PreconditionError("axiom check needs a nonempty coefficient sample");
  for (const auto& p : sample)
    if (p.dimension() != dimension) throw DimensionError("sample point dimension does not match the modular");
  for (const auto& c : coeffs) {
    if (c.a < T(0) || c.b < T(0)) throw PreconditionError("coefficients must be nonnegative");
    if (std::fabs(to_double(T(c.a + c.b - T(1)))) > 1e-12)
      throw PreconditionError("coefficients must satisfy a + b = 1");
  }
}

}  // namespace detail

/// Samples M1-M4 plus the two consequences of M4 used later:
///   |s| <= |t|  implies  rho(s x) <= rho(t x)
///   rho(sum a_i x_i) <= sum rho(x_i)   for convex coefficient tuples.
/// M4 runs over every ordered pair of sample points and every coefficient pair.
template <Scalar T>
AxiomReport<T> check_modular_axioms(const Modular<T>& rho, const std::vector<Point<T>>& sample,
                                    const std::vector<Coefficients<T>>& coeffs) {
  detail::require_sample(sample, coeffs, rho.dimension());
  AxiomReport<T> report;
  auto flag = [&](AxiomViolation<T> v) { report.violations.push_back(std::move(v)); };

  const auto origin = Point<T>::zero(rho.dimension());
  std::vector<Point<T>> points;
  points.reserve(sample.size() + 1);
  points.push_back(origin);
  points.insert(points.end(), sample.begin(), sample.end());

  std::vector<T> values;
  values.reserve(sample.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& x = points[i];
    T v = rho(x);
    if (i > 0) values.push_back(v);
    report.instances_checked += 3;
    if (v < T(0)) flag({Axiom::m1_nonnegative, x, std::nullopt, T(0), T(0), v, T(0)});
    if (x.is_zero() ? v != T(0) : v == T(0)) flag({Axiom::m2_zero, x, std::nullopt, T(0), T(0), v, T(0)});
    T vn = rho(-x);
    if (!approx_equal(v, vn)) flag({Axiom::m3_symmetric, x, -x, T(0), T(0), vn, v});
  }

  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      for (const auto& c : coeffs) {
        ++report.instances_checked;
        T lhs = rho(c.a * sample[i] + c.b * sample[j]);
        T rhs = values[i] + values[j];
        if (exceeds(lhs, rhs)) flag({Axiom::m4_subadditive, sample[i], sample[j], c.a, c.b, lhs, rhs});
      }
    }
  }

  std::vector<T> scalars;
  for (const auto& c : coeffs)
    for (const T& s : {c.a, c.b}) {
      scalars.push_back(s);
      scalars.push_back(-s);
    }
  for (const auto& x : sample) {
    for (const auto& s : scalars) {
      for (const auto& t : scalars) {
        if (abs_value(s) > abs_value(t)) continue;
        ++report.instances_checked;
        T lhs = rho(s * x);
        T rhs = rho(t * x);
        if (exceeds(lhs, rhs)) flag({Axiom::scaling_monotone, x, std::nullopt, s, t, lhs, rhs});
      }
    }
  }

  // Three-term tuples (a*a, a*b, b) over cyclic windows of the sample.
  const std::size_t n = sample.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& x0 = sample[i];
    const auto& x1 = sample[(i + 1) % n];
    const auto& x2 = sample[(i + 2) % n];
    for (const auto& c : coeffs) {
      ++report.instances_checked;
      T lhs = rho(T(c.a * c.a) * x0 + T(c.a * c.b) * x1 + c.b * x2);
      T rhs = values[i] + values[(i + 1) % n] + values[(i + 2) % n];
      if (exceeds(lhs, rhs)) flag({Axiom::n_term, x0, x1, c.a, c.b, lhs, rhs});
    }
  }
  return report;
}

/// Samples the convex inequality M4' over every ordered pair and coefficient pair.
template <Scalar T>
AxiomReport<T> check_convexity(const Modular<T>& rho, const std::vector<Point<T>>& sample,
                               const std::vector<Coefficients<T>>& coeffs) {
  detail::require_sample(sample, coeffs, rho.dimension());
  AxiomReport<T> report;
  std::vector<T> values;
  values.reserve(sample.size());
  for (const auto& x : sample) values.push_back(rho(x));
  for (std::size_t i = 0; i < sample.size(); ++i) {
    for (std::size_t j = 0; j < sample.size(); ++j) {
      for (const auto& c : coeffs) {
        ++report.instances_checked;
        T lhs = rho(c.a * sample[i] + c.b * sample[j]);
        T rhs = c.a * values[i] + c.b * values[j];
        if (exceeds(lhs, rhs)) report.violations.push_back({Axiom::m4_convex, sample[i], sample[j], c.a, c.b, lhs, rhs});
      }
    }
  }
  return report;
}

}  // namespace modfix
