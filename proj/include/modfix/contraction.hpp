#pragma once

// Contraction constants and sampled checks of the defining inequalities
//   (B1)/(K1)  (x, y) in E(G)  =>  (fx, fy) in E(G)
//   (B2)  rho(b(fx - fy)) <= k rho(a(x - y))
//   (K2)  rho(b(fx - fy)) <= k rho(a1(fx - x)) + l rho(a2(fy - y))
// on sampled pairs that are edges of G (or of G~).

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "modfix/error.hpp"
#include "modfix/graph.hpp"
#include "modfix/modular.hpp"
#include "modfix/point.hpp"

namespace modfix {

/// (k, a, b) with 0 < k < 1 and 0 < a < b.
template <Scalar T>
struct BanachConstants {
  T k;
  T a;
  T b;

  BanachConstants(T k_, T a_, T b_) : k(std::move(k_)), a(std::move(a_)), b(std::move(b_)) {
    if (!(k > T(0) && k < T(1))) throw AdmissibilityError("Banach constant k must lie in (0, 1), got " + to_string(k));
    if (!(a > T(0))) throw AdmissibilityError("Banach constant a must be positive, got " + to_string(a));
    if (!(a < b)) throw AdmissibilityError("Banach constants need a < b, got a=" + to_string(a) + " b=" + to_string(b));
  }

  /// alpha with a/b + 1/alpha = 1.
  T alpha() const { return b / (b - a); }
};

/// (k, l, a1, a2, b), all positive, with k + l < 1, a1 <= b/2 and a2 <= b.
template <Scalar T>
struct KannanConstants {
  T k;
  T l;
  T a1;
  T a2;
  T b;

  KannanConstants(T k_, T l_, T a1_, T a2_, T b_)
      : k(std::move(k_)), l(std::move(l_)), a1(std::move(a1_)), a2(std::move(a2_)), b(std::move(b_)) {
    if (!(k > T(0) && l > T(0) && a1 > T(0) && a2 > T(0) && b > T(0)))
      throw AdmissibilityError("Kannan constants must all be positive");
    if (!(k + l < T(1))) throw AdmissibilityError("Kannan constants need k + l < 1, got " + to_string(T(k + l)));
    if (a1 > b / T(2)) throw AdmissibilityError("Kannan constants need a1 <= b/2");
    if (a2 > b) throw AdmissibilityError("Kannan constants need a2 <= b");
  }

  /// Step-gap contraction rate delta = l / (1 - k).
  T delta() const { return l / (T(1) - k); }
  /// Uniqueness rate lambda = k / (1 - k); below 1 exactly when k < 1/2.
  T lambda() const { return k / (T(1) - k); }
  /// The stricter a2 <= b/2 needed to move (K2) from G to G~.
  bool a2_within_half_b() const { return a2 <= b / T(2); }
};

template <Scalar T>
struct SelfMap {
  std::function<Point<T>(const Point<T>&)> apply;
  std::string description;

  Point<T> operator()(const Point<T>& x) const {
    Point<T> y = apply(x);
    if (y.dimension() != x.dimension()) throw DimensionError("self-map changed the dimension");
    return y;
  }
};

template <Scalar T>
SelfMap<T> affine_map(T slope, T offset) {
  std::string d = "f(x) = " + to_string(slope) + "*x + " + to_string(offset);
  return {[slope, offset](const Point<T>& x) {
            std::vector<T> out;
            out.reserve(x.dimension());
            for (std::size_t i = 0; i < x.dimension(); ++i) out.push_back(slope * x[i] + offset);
            return Point<T>(std::move(out));
          },
          std::move(d)};
}

template <Scalar T>
SelfMap<T> constant_map(Point<T> value) {
  std::string d = "f(x) = " + to_string(value);
  return {[value](const Point<T>&) { return value; }, std::move(d)};
}

enum class ViolationKind { edge_not_preserved, inequality };

template <Scalar T>
struct PairViolation {
  ViolationKind kind;
  Point<T> x;
  Point<T> y;
  T lhs{0};
  T rhs{0};
};

template <Scalar T>
struct ContractionReport {
  std::size_t pairs_checked = 0;
  std::vector<PairViolation<T>> violations;
  std::optional<T> max_ratio;  // sup lhs/rhs over checked pairs with rhs > 0
  std::optional<bool> a2_within_half_b;  // Kannan checks only; reported, not enforced

  bool ok() const noexcept { return violations.empty(); }

  const PairViolation<T>* find(const Point<T>& x, const Point<T>& y) const {
    for (const auto& v : violations)
      if (v.x == x && v.y == y) return &v;
    return nullptr;
  }
};

template <Scalar T>
using PairSample = std::vector<std::pair<Point<T>, Point<T>>>;

namespace detail {

template <Scalar T>
void record_inequality(ContractionReport<T>& report, const Point<T>& x, const Point<T>& y, T lhs, T rhs) {
  ++report.pairs_checked;
  if (rhs > T(0)) {
    T ratio = lhs / rhs;
    if (!report.max_ratio || ratio > *report.max_ratio) report.max_ratio = ratio;
  }
  if (exceeds(lhs, rhs)) report.violations.push_back({ViolationKind::inequality, x, y, std::move(lhs), std::move(rhs)});
}

template <Scalar T>
bool is_edge(const SpaceGraph<T>& g, const Point<T>& x, const Point<T>& y, bool undirected) {
  return undirected ? g.has_undirected_edge(x, y) : g.has_edge(x, y);
}

}  // namespace detail

/// (B1)/(K1) on the sample: every sampled edge must map to an edge.
template <Scalar T>
ContractionReport<T> check_edge_preservation(const SelfMap<T>& f, const SpaceGraph<T>& g,
                                             const PairSample<T>& sample) {
  ContractionReport<T> report;
  for (const auto& [x, y] : sample) {
    if (!g.has_edge(x, y)) continue;
    ++report.pairs_checked;
    if (!g.has_edge(f(x), f(y))) report.violations.push_back({ViolationKind::edge_not_preserved, x, y, T(0), T(0)});
  }
  return report;
}

/// (B2) on sampled edges: lhs = rho(b(fx - fy)), rhs = k rho(a(x - y)).
template <Scalar T>
ContractionReport<T> check_banach_condition(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g,
                                            const BanachConstants<T>& c, const PairSample<T>& sample,
                                            bool use_undirected = false) {
  ContractionReport<T> report;
  for (const auto& [x, y] : sample) {
    if (!detail::is_edge(g, x, y, use_undirected)) continue;
    T lhs = rho(c.b * (f(x) - f(y)));
    T rhs = c.k * rho(c.a * (x - y));
    detail::record_inequality(report, x, y, std::move(lhs), std::move(rhs));
  }
  return report;
}

/// (K2) on sampled edges: lhs = rho(b(fx - fy)),
/// rhs = k rho(a1(fx - x)) + l rho(a2(fy - y)).
template <Scalar T>
ContractionReport<T> check_kannan_condition(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g,
                                            const KannanConstants<T>& c, const PairSample<T>& sample,
                                            bool use_undirected = false) {
  ContractionReport<T> report;
  report.a2_within_half_b = c.a2_within_half_b();
  for (const auto& [x, y] : sample) {
    if (!detail::is_edge(g, x, y, use_undirected)) continue;
    Point<T> fx = f(x);
    Point<T> fy = f(y);
    T lhs = rho(c.b * (fx - fy));
    T rhs = c.k * rho(c.a1 * (fx - x)) + c.l * rho(c.a2 * (fy - y));
    detail::record_inequality(report, x, y, std::move(lhs), std::move(rhs));
  }
  return report;
}

/// Empirical sup of rho(b(fx - fy)) / rho(a(x - y)) over sampled directed
/// edges with a nonzero denominator. nullopt when no such pair exists.
template <Scalar T>
std::optional<T> estimate_banach_k(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g, const T& a,
                                   const T& b, const PairSample<T>& sample) {
  if (!(a > T(0) && a < b)) throw PreconditionError("estimate_banach_k needs 0 < a < b");
  std::optional<T> sup;
  for (const auto& [x, y] : sample) {
    if (!g.has_edge(x, y)) continue;
    T den = rho(a * (x - y));
    if (!(den > T(0))) continue;
    T ratio = rho(b * (f(x) - f(y))) / den;
    if (!sup || ratio > *sup) sup = ratio;
  }
  return sup;
}

// ---------------------------------------------------------------------------
// Convex rescalings. Valid only for convex modulars; the caller is expected
// to have run check_convexity.

template <Scalar T>
struct BanachRescale {
  BanachConstants<T> constants;
  T c;  // max{a, ak}
  std::string rationale;
};

/// For b > max{a, ak}: a0 = (c + b)/2 with c = max{a, ak}, and
/// (k, a, b) -> (ak/a0, a0, b).
template <Scalar T>
BanachRescale<T> convex_rescale_banach(const T& k, const T& a, const T& b) {
  if (!(k > T(0) && a > T(0) && b > T(0))) throw AdmissibilityError("convex Banach rescaling needs k, a, b > 0");
  T c = a > a * k ? a : T(a * k);
  if (!(b > c)) throw AdmissibilityError("convex Banach rescaling needs b > max{a, ak}");
  T a0 = (c + b) / T(2);
  T k_new = a * k / a0;
  // BanachConstants re-validates k' < 1 and a0 < b.
  return {BanachConstants<T>(k_new, a0, b), c, "a0 = midpoint of (max{a,ak}, b): balances the k'<1 and a0<b margins"};
}

template <Scalar T>
struct KannanRescale {
  KannanConstants<T> constants;
  T c;                    // 2 max{a1, a2, a1 k, a2 l}
  bool uniqueness_gate;   // k' < 1/2
  std::string rationale;
};

/// For b > 4 max{a1, a2, a1 k, a2 l}: a0 = b/2 and
/// (k, l, a1, a2, b) -> (a1 k/a0, a2 l/a0, a0, a0, b).
template <Scalar T>
KannanRescale<T> convex_rescale_kannan(const T& k, const T& l, const T& a1, const T& a2, const T& b) {
  if (!(k > T(0) && l > T(0) && a1 > T(0) && a2 > T(0) && b > T(0)))
    throw AdmissibilityError("convex Kannan rescaling needs positive inputs");
  T m = a1;
  for (const T& v : {a2, T(a1 * k), T(a2 * l)})
    if (v > m) m = v;
  if (!(b > T(4) * m)) throw AdmissibilityError("convex Kannan rescaling needs b > 4 max{a1, a2, a1k, a2l}");
  T c = T(2) * m;
  T a0 = b / T(2);
  KannanConstants<T> out(T(a1 * k / a0), T(a2 * l / a0), a0, a0, b);
  bool gate = out.k < T(1) / T(2);
  return {std::move(out), std::move(c), gate, "a0 = b/2: smallest k' = a1 k/a0 on (c, b/2]"};
}

}  // namespace modfix
