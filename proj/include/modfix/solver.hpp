#pragma once

// Picard iteration with the explicit convergence certificates of the Banach
// and Kannan G~-rho-contraction fixed point theorems.
//
// Banach, with alpha = b/(b - a) and r = rho(alpha a (fx - x)):
//   rho(b(f^m x - f^n x)) <= k^n r / (1 - k)                 (m > n >= 1)
// Kannan, with delta = l/(1 - k) and d0 = rho(b(fx - x)):
//   rho(b(f^n x - f^{n-1} x)) <= delta^n d0
//   rho(b(f^m x - f^n x))     <= k delta^m d0 + l delta^n d0  (m, n >= 1)

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "modfix/contraction.hpp"
#include "modfix/error.hpp"
#include "modfix/graph.hpp"
#include "modfix/modular.hpp"
#include "modfix/point.hpp"

namespace modfix {

template <Scalar T>
struct OrbitTrace {
  Point<T> start;
  std::vector<Point<T>> points;  // f^0 x ... f^N x
  std::vector<T> step_gaps;      // step_gaps[i] = rho(b(f^{i+1} x - f^i x)); empty when no modular given
};

/// x0, f x0, ..., f^N x0. Throws DomainError if an iterate leaves R^d.
template <Scalar T>
OrbitTrace<T> picard_orbit(const SelfMap<T>& f, const Point<T>& x0, std::size_t n) {
  OrbitTrace<T> trace{x0, {x0}, {}};
  trace.points.reserve(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    try {
      trace.points.push_back(f(trace.points.back()));
    } catch (const DomainError& e) {
      throw DomainError("Picard iterate " + std::to_string(i + 1) + " is not finite (" + e.what() + ")");
    }
  }
  return trace;
}

/// Orbit plus the scaled step gaps rho(b(f^{i+1} x - f^i x)).
template <Scalar T>
OrbitTrace<T> picard_orbit(const SelfMap<T>& f, const Point<T>& x0, std::size_t n, const Modular<T>& rho,
                           const T& b) {
  OrbitTrace<T> trace = picard_orbit(f, x0, n);
  trace.step_gaps.reserve(n);
  for (std::size_t i = 0; i + 1 < trace.points.size(); ++i)
    trace.step_gaps.push_back(rho(b * (trace.points[i + 1] - trace.points[i])));
  return trace;
}

struct CfReport {
  bool passed = true;
  std::size_t depth = 0;
  std::optional<std::pair<std::size_t, std::size_t>> failing_pair;  // (n, m)
};

inline constexpr std::size_t kDefaultCfDepth = 20;

/// Evidence for x in C_f: (f^n x, f^m x) in E(G~) for all 0 <= n, m <= depth.
template <Scalar T>
CfReport check_cf_membership(const SelfMap<T>& f, const SpaceGraph<T>& g, const Point<T>& x,
                             std::size_t depth = kDefaultCfDepth) {
  if (depth < 1) throw PreconditionError("C_f depth must be >= 1");
  const auto orbit = picard_orbit(f, x, depth).points;
  CfReport report{true, depth, std::nullopt};
  for (std::size_t n = 0; n <= depth; ++n) {
    for (std::size_t m = n + 1; m <= depth; ++m) {
      if (!g.has_undirected_edge(orbit[n], orbit[m])) {
        report.passed = false;
        report.failing_pair = {n, m};
        return report;
      }
    }
  }
  return report;
}

/// r = rho(alpha a (fx - x)).
template <Scalar T>
T banach_seed(const BanachConstants<T>& c, const Modular<T>& rho, const SelfMap<T>& f, const Point<T>& x) {
  return rho(T(c.alpha() * c.a) * (f(x) - x));
}

/// k^n r / (1 - k).
template <Scalar T>
T banach_apriori_bound(const BanachConstants<T>& c, const T& r, std::size_t n) {
  if (r < T(0)) throw PreconditionError("a-priori bound needs r >= 0");
  return pow_int(c.k, static_cast<unsigned>(n)) * r / (T(1) - c.k);
}

/// k delta^m d0 + l delta^n d0.
template <Scalar T>
T kannan_cauchy_bound(const KannanConstants<T>& c, const T& d0, std::size_t n, std::size_t m) {
  if (d0 < T(0)) throw PreconditionError("Kannan bound needs d0 >= 0");
  if (n < 1 || m < 1) throw PreconditionError("Kannan bound needs n, m >= 1");
  const T delta = c.delta();
  return c.k * pow_int(delta, static_cast<unsigned>(m)) * d0 + c.l * pow_int(delta, static_cast<unsigned>(n)) * d0;
}

// ---------------------------------------------------------------------------

enum class ContractionMode { banach, kannan };
enum class SolveStatus { converged, max_iter_reached, residual_too_large };
enum class StopReason { step_gap, apriori_bound, max_iter };

inline std::string_view mode_name(ContractionMode m) { return m == ContractionMode::banach ? "banach" : "kannan"; }

inline std::string_view status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged: return "converged";
    case SolveStatus::max_iter_reached: return "max-iter-reached";
    case SolveStatus::residual_too_large: return "residual-too-large";
  }
  return "?";
}

inline std::string_view stop_reason_name(StopReason s) {
  switch (s) {
    case StopReason::step_gap: return "step-gap";
    case StopReason::apriori_bound: return "apriori-bound";
    case StopReason::max_iter: return "max-iter";
  }
  return "?";
}

struct UniquenessEvidence {
  std::string kind;  // "path" or "star"
  bool supported = false;
  std::string detail;
};

template <Scalar T>
struct ConvergenceCertificate {
  ContractionMode mode;
  std::variant<BanachConstants<T>, KannanConstants<T>> constants;
  T seed;                   // r (Banach) or d0 (Kannan)
  std::optional<T> alpha;   // Banach only
  T rate;                   // k (Banach) or delta (Kannan)
  std::size_t iterations = 0;
  Point<T> fixed_point;
  T residual;               // rho((b/2)(f x* - x*))
  T bound_at_stop;
  T step_gap_at_stop;       // rho(b(f x* - x*))
  StopReason stop_reason = StopReason::max_iter;
  bool snapped = false;     // exact backend: limit recovered as the simplest rational near the last iterate
  std::size_t cf_checked_depth = 0;
  bool cf_passed = false;
  std::optional<UniquenessEvidence> uniqueness;
};

template <Scalar T>
struct SolveResult {
  SolveStatus status;
  ConvergenceCertificate<T> certificate;
  OrbitTrace<T> trace;
  std::vector<T> bounds;  // a-priori bound per trace row

  bool converged() const noexcept { return status == SolveStatus::converged; }
};

template <Scalar T>
struct SolveOptions {
  T tol;
  std::size_t max_iter = 1000;
  std::size_t cf_depth = kDefaultCfDepth;
  std::optional<WitnessSet<T>> witnesses;  // enables uniqueness evidence
};

namespace detail {

inline Rational floor_rational(const Rational& q) {
  BigInt num = boost::multiprecision::numerator(q);
  BigInt den = boost::multiprecision::denominator(q);
  BigInt fl = num / den;
  if (num < 0 && fl * den != num) fl -= 1;
  return Rational(fl);
}

/// The rational with the smallest denominator in [lo, hi] (ties broken by
/// smallest magnitude), via the continued-fraction walk of the Stern-Brocot tree.
inline Rational simplest_between(Rational lo, Rational hi) {
  if (lo > hi) std::swap(lo, hi);
  if (lo <= 0 && hi >= 0) return Rational(0);
  if (hi < 0) return -simplest_between(-hi, -lo);
  Rational fl = floor_rational(lo);
  if (fl == lo) return lo;
  if (fl + 1 <= hi) return fl + 1;
  return fl + Rational(1) / simplest_between(Rational(1) / (hi - fl), Rational(1) / (lo - fl));
}

// On the exact backend the Picard limit is usually not an iterate. Recover it
// as the simplest rational inside a box around the last iterate whose
// half-width grows from one step by doubling, and keep the first candidate
// that is an exact fixed point.
template <Scalar T>
std::optional<Point<T>> snap_to_fixed_point(const SelfMap<T>& f, const Point<T>& x, const Point<T>& fx) {
  if constexpr (!is_exact_v<T>) {
    return std::nullopt;
  } else {
    constexpr int kDoublings = 48;
    T scale(1);
    for (int j = 0; j <= kDoublings; ++j, scale *= 2) {
      std::vector<T> coords;
      coords.reserve(x.dimension());
      for (std::size_t i = 0; i < x.dimension(); ++i) {
        T radius = scale * abs_value<T>(fx[i] - x[i]);
        coords.push_back(simplest_between(x[i] - radius, x[i] + radius));
      }
      Point<T> candidate(std::move(coords));
      if (f(candidate) == candidate) return candidate;
    }
    return std::nullopt;
  }
}

template <Scalar T, class BoundFn>
SolveResult<T> run_picard(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g, const Point<T>& x0,
                          const T& b, const SolveOptions<T>& opts, BoundFn bound_at,
                          ConvergenceCertificate<T> cert) {
  if (!(opts.tol > T(0))) throw PreconditionError("solver tolerance must be positive");
  const CfReport cf = check_cf_membership(f, g, x0, opts.cf_depth);
  cert.cf_checked_depth = cf.depth;
  cert.cf_passed = cf.passed;

  OrbitTrace<T> trace{x0, {x0}, {}};
  std::vector<T> bounds;
  SolveStatus status = SolveStatus::max_iter_reached;
  std::size_t n = 0;
  for (;; ++n) {
    const Point<T>& x = trace.points.back();
    Point<T> fx = f(x);
    T gap = rho(b * (fx - x));
    T bound = bound_at(n);
    bounds.push_back(bound);
    trace.points.push_back(std::move(fx));
    trace.step_gaps.push_back(gap);
    if (!(gap > opts.tol)) {
      cert.stop_reason = StopReason::step_gap;
      status = SolveStatus::converged;
      break;
    }
    if (n >= 1 && !(bound > opts.tol)) {
      cert.stop_reason = StopReason::apriori_bound;
      status = SolveStatus::converged;
      break;
    }
    if (n == opts.max_iter) {
      cert.stop_reason = StopReason::max_iter;
      break;
    }
  }
  // Trace row n+1 has no bound of its own yet.
  bounds.push_back(bound_at(n + 1));

  const Point<T>& xn = trace.points[n];
  const Point<T>& fxn = trace.points[n + 1];
  cert.iterations = n;
  cert.fixed_point = xn;
  cert.step_gap_at_stop = trace.step_gaps[n];
  cert.bound_at_stop = bounds[n];
  cert.residual = rho(T(b / T(2)) * (fxn - xn));
  if (status == SolveStatus::converged && cert.residual != T(0)) {
    if (auto snapped = snap_to_fixed_point(f, xn, fxn)) {
      cert.fixed_point = *snapped;
      cert.residual = rho(T(b / T(2)) * (f(*snapped) - *snapped));
      cert.snapped = true;
    }
  }
  if (status == SolveStatus::converged && exceeds(cert.residual, T(T(2) * opts.tol)))
    status = SolveStatus::residual_too_large;
  return {status, std::move(cert), std::move(trace), std::move(bounds)};
}

}  // namespace detail

/// Weak connectivity of G on W plus the computed fixed point.
template <Scalar T>
UniquenessEvidence banach_uniqueness_evidence(const SpaceGraph<T>& g, const WitnessSet<T>& w, const Point<T>& xstar) {
  const auto ws = w.with(xstar);
  bool connected = is_weakly_connected_on(g, ws);
  return {"path", connected,
          std::string(connected ? "weakly connected" : "not weakly connected") + " on " + std::to_string(ws.size()) +
              " witnesses"};
}

/// k < 1/2 and Condition (star) for every pair of W plus the fixed point,
/// with the same set as candidates.
template <Scalar T>
UniquenessEvidence kannan_uniqueness_evidence(const KannanConstants<T>& c, const SpaceGraph<T>& g,
                                              const WitnessSet<T>& w, const Point<T>& xstar) {
  if (!(c.k < T(1) / T(2))) return {"star", false, "k >= 1/2: uniqueness clause inapplicable"};
  const auto ws = w.with(xstar);
  for (std::size_t i = 0; i < ws.size(); ++i)
    for (std::size_t j = i + 1; j < ws.size(); ++j)
      if (!check_star_condition(g, ws[i], ws[j], ws))
        return {"star", false, "no common neighbour for " + to_string(ws[i]) + " and " + to_string(ws[j])};
  return {"star", true, "condition (star) holds on " + std::to_string(ws.size()) + " witnesses"};
}

/// Picard iteration for a Banach G~-rho-contraction. Stops when the
/// a-priori bound k^n r/(1-k) or the step gap rho(b(f x_n - x_n)) drops to
/// tol; the certificate's fixed point is x_n.
template <Scalar T>
SolveResult<T> solve_banach(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g,
                            const BanachConstants<T>& c, const Point<T>& x0, const SolveOptions<T>& opts) {
  const T r = banach_seed(c, rho, f, x0);
  ConvergenceCertificate<T> cert{ContractionMode::banach, c, r, c.alpha(), c.k, 0, x0, T(0), T(0), T(0),
                                 StopReason::max_iter, false, 0, false, std::nullopt};
  auto result = detail::run_picard(
      f, rho, g, x0, c.b, opts, [&](std::size_t n) { return banach_apriori_bound(c, r, n); }, std::move(cert));
  if (opts.witnesses)
    result.certificate.uniqueness = banach_uniqueness_evidence(g, *opts.witnesses, result.certificate.fixed_point);
  return result;
}

/// Picard iteration for a Kannan G~-rho-contraction. The a-priori bound at
/// n is k delta^{n+1} d0 + l delta^n d0, the sup of the two-index bound over m > n.
template <Scalar T>
SolveResult<T> solve_kannan(const SelfMap<T>& f, const Modular<T>& rho, const SpaceGraph<T>& g,
                            const KannanConstants<T>& c, const Point<T>& x0, const SolveOptions<T>& opts) {
  const T d0 = rho(c.b * (f(x0) - x0));
  ConvergenceCertificate<T> cert{ContractionMode::kannan, c, d0, std::nullopt, c.delta(), 0, x0, T(0), T(0), T(0),
                                 StopReason::max_iter, false, 0, false, std::nullopt};
  auto bound_at = [&](std::size_t n) {
    return n == 0 ? T(c.k * c.delta() * d0 + c.l * d0) : kannan_cauchy_bound(c, d0, n, n + 1);
  };
  auto result = detail::run_picard(f, rho, g, x0, c.b, opts, bound_at, std::move(cert));
  if (opts.witnesses)
    result.certificate.uniqueness = kannan_uniqueness_evidence(c, g, *opts.witnesses, result.certificate.fixed_point);
  return result;
}

// ---------------------------------------------------------------------------
// Uniqueness chains

template <Scalar T>
struct BanachUniquenessCheck {
  T bound;         // k^n sum_s rho(b(x_{s-1} - x_s))
  T pushed_sum;    // sum_s rho(b(f^n x_{s-1} - f^n x_s))
  T endpoint_gap;  // rho((b/N)(x* - y*)), 0 for N = 0
};

/// Evaluates the path chain used for Banach uniqueness between the path's
/// endpoints. For genuine fixed points endpoint_gap <= pushed_sum <= bound.
template <Scalar T>
BanachUniquenessCheck<T> verify_uniqueness_banach(const BanachConstants<T>& c, const Modular<T>& rho,
                                                  const SelfMap<T>& f, const Path<T>& path, std::size_t n) {
  const auto& v = path.vertices();
  const std::size_t edges = path.length();
  T original(0);
  T pushed(0);
  for (std::size_t s = 1; s <= edges; ++s) {
    original += rho(c.b * (v[s - 1] - v[s]));
    Point<T> p = v[s - 1];
    Point<T> q = v[s];
    for (std::size_t i = 0; i < n; ++i) {
      p = f(p);
      q = f(q);
    }
    pushed += rho(c.b * (p - q));
  }
  T endpoint = edges == 0 ? T(0) : rho(T(c.b / T(static_cast<long>(edges))) * (path.front() - path.back()));
  return {pow_int(c.k, static_cast<unsigned>(n)) * original, pushed, endpoint};
}

template <Scalar T>
struct KannanUniquenessCheck {
  T bound;   // lambda^n rho(b(z - x*))
  T actual;  // rho(b(f^n z - x*))
};

/// Needs k < 1/2 so that lambda = k/(1-k) < 1.
template <Scalar T>
KannanUniquenessCheck<T> verify_uniqueness_kannan(const KannanConstants<T>& c, const Modular<T>& rho,
                                                  const SelfMap<T>& f, const Point<T>& xstar, const Point<T>& z,
                                                  std::size_t n) {
  if (!(c.k < T(1) / T(2)))
    throw PreconditionError("Kannan uniqueness needs k < 1/2, got k = " + to_string(c.k));
  Point<T> fz = z;
  for (std::size_t i = 0; i < n; ++i) fz = f(fz);
  return {pow_int(c.lambda(), static_cast<unsigned>(n)) * rho(c.b * (z - xstar)), rho(c.b * (fz - xstar))};
}

}  // namespace modfix
