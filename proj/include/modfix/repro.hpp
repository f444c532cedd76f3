#pragma once

// Replays the worked examples on the exact backend with embedded fixtures:
//   - f(x) = x/3 under rho = |x|: the Banach identity and the (K2) failure at (x, 0)
//   - the piecewise map (f1 = 1/10, fx = 1/2 otherwise) under rho = x^2:
//     the three Kannan cases and the (B2) failure at (1, 3/5)
//   - rho = x^2 as a convex modular and both convex rescalings.
// Each check prints one line; the run fails if any check does.

#include <chrono>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "modfix/contraction.hpp"
#include "modfix/experiment.hpp"
#include "modfix/graph.hpp"
#include "modfix/modular.hpp"
#include "modfix/sampling.hpp"
#include "modfix/scalar.hpp"

namespace modfix {

struct ReproOptions {
  Rational kannan_k{64, 81};
  std::uint64_t seed = 20240611;
};

struct ReproCheck {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0;
};

struct ReproReport {
  std::vector<ReproCheck> checks;
  bool ok() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  const ReproCheck* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }
};

// ---------------------------------------------------------------------------
// Fixtures

inline SelfMap<Rational> third_map() { return affine_map<Rational>(Rational(1, 3), Rational(0)); }

/// f1 = 1/10, fx = 1/2 for x != 1.
inline SelfMap<Rational> kannan_example_map() {
  return {[](const Point<Rational>& x) {
            return Point<Rational>::scalar(x[0] == Rational(1) ? Rational(1, 10) : Rational(1, 2));
          },
          "piecewise(x = 1 -> 1/10, else -> 1/2)"};
}

/// Random admissible Kannan tuples: k + l < 1, a1 <= b/2, a2 <= b, b in (0, 4).
inline std::vector<KannanConstants<Rational>> random_kannan_tuples(SplitMix64& rng, std::size_t count) {
  constexpr std::uint64_t R = 1000;
  std::vector<KannanConstants<Rational>> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rational k = rng.uniform_open(0, 1, R);
    Rational l = rng.uniform_open(0, 1 - k, R);
    Rational b = rng.uniform_open(0, 4, R);
    Rational a1 = rng.uniform_open(0, b / 2, R);
    Rational a2 = rng.uniform_open(0, b, R);
    out.emplace_back(k, l, a1, a2, b);
  }
  return out;
}

/// Random admissible Banach triples: k in (0, 1), 0 < a < b < 4.
inline std::vector<BanachConstants<Rational>> random_banach_triples(SplitMix64& rng, std::size_t count) {
  constexpr std::uint64_t R = 1000;
  std::vector<BanachConstants<Rational>> out;
  for (std::size_t i = 0; i < count; ++i) {
    Rational k = rng.uniform_open(0, 1, R);
    Rational b = rng.uniform_open(0, 4, R);
    Rational a = rng.uniform_open(0, b, R);
    out.emplace_back(k, a, b);
  }
  return out;
}

namespace detail {

inline std::vector<Rational> repro_grid() {
  // 21 values in [-5, 5] including 1 and 3/5 neighbours: 441 ordered pairs
  return linear_grid(-5, 5, 21);
}

/// y values avoiding 1: 120 rationals spread over [-3, 3].
inline std::vector<Rational> repro_ys() {
  std::vector<Rational> out;
  for (const auto& v : linear_grid(-3, 3, 121))
    if (v != Rational(1)) out.push_back(v);
  return out;
}

inline Point<Rational> pt(const Rational& v) { return Point<Rational>::scalar(v); }

}  // namespace detail

inline ReproCheck repro_banach_identity() {
  const Modular<Rational> rho(ModularSpec::abs_norm(), 1);
  const auto f = third_map();
  const BanachConstants<Rational> c(Rational(2, 3), Rational(1, 2), 1);
  const auto grid = detail::repro_grid();
  std::size_t pairs = 0;
  for (const auto& x : grid)
    for (const auto& y : grid) {
      ++pairs;
      const auto px = detail::pt(x), py = detail::pt(y);
      Rational lhs = rho(c.b * (f(px) - f(py)));
      Rational third = abs_value(Rational(x - y)) / 3;
      Rational rhs = c.k * rho(c.a * (px - py));
      if (lhs != third || third != rhs)
        return {"banach identity", false,
                "rho(b(fx-fy)) = |x-y|/3 = k rho(a(x-y)) fails at x=" + to_string(x) + " y=" + to_string(y) +
                    ": " + to_string(lhs) + ", " + to_string(third) + ", " + to_string(rhs)};
    }
  return {"banach identity", true, std::to_string(pairs) + " pairs, exact equality with k=2/3 a=1/2 b=1"};
}

inline ReproCheck repro_kannan_fails_for_third(std::uint64_t seed) {
  const Modular<Rational> rho(ModularSpec::abs_norm(), 1);
  const auto f = third_map();
  SplitMix64 rng(seed);
  const auto tuples = random_kannan_tuples(rng, 50);
  const std::vector<Rational> xs{Rational(1), Rational(-2), Rational(7, 3), Rational(-1, 9)};
  std::size_t witnesses = 0;
  for (const auto& c : tuples)
    for (const auto& x : xs) {
      const auto px = detail::pt(x), zero = detail::pt(0);
      Rational lhs = rho(c.b * (f(px) - f(zero)));
      Rational rhs = c.k * rho(c.a1 * (f(px) - px)) + c.l * rho(c.a2 * (f(zero) - zero));
      const Rational ax = abs_value(x);
      if (lhs != c.b * ax / 3 || rhs != 2 * c.a1 * c.k * ax / 3 || !(lhs > rhs))
        return {"kannan fails for x/3", false, "no (K2) violation at x=" + to_string(x) + " y=0 for " +
                                                    describe_constants<Rational>(c)};
      ++witnesses;
    }
  return {"kannan fails for x/3", true,
          std::to_string(witnesses) + " witnesses: b|x|/3 > 2 a1 k |x|/3 at y=0 for 50 admissible tuples"};
}

inline ReproCheck repro_kannan_cases(const Rational& k) {
  const Modular<Rational> rho(ModularSpec::power(2), 1);
  const auto f = kannan_example_map();
  const Rational l(16, 81), a1(1, 2), a2(1), b(1);
  const std::string name = "kannan cases";
  if (!(k > 0 && k + l < 1)) return {name, false, "k=" + to_string(k) + " is not admissible with l=16/81"};
  if (Rational(64, 81) + l != Rational(80, 81)) return {name, false, "k + l != 80/81"};
  const auto ys = detail::repro_ys();
  auto k2 = [&](const Point<Rational>& x, const Point<Rational>& y, Rational& lhs, Rational& rhs) {
    lhs = rho(b * (f(x) - f(y)));
    rhs = k * rho(a1 * (f(x) - x)) + l * rho(a2 * (f(y) - y));
  };
  Rational lhs, rhs;
  std::size_t instances = 0;
  // Case 1: fx = fy.
  for (const auto& x : ys)
    for (const auto& y : {ys.front(), ys[ys.size() / 2], ys.back()}) {
      k2(detail::pt(x), detail::pt(y), lhs, rhs);
      if (lhs != 0 || lhs > rhs) return {name, false, "case 1 fails at x=" + to_string(x) + " y=" + to_string(y)};
      ++instances;
    }
  k2(detail::pt(1), detail::pt(1), lhs, rhs);
  if (lhs != 0 || lhs > rhs) return {name, false, "case 1 fails at x=y=1"};
  // Case 2: x = 1, y != 1.
  for (const auto& y : ys) {
    k2(detail::pt(1), detail::pt(y), lhs, rhs);
    const Rational half_gap = Rational(1, 2) - y;
    const Rational shown = Rational(4, 25) + Rational(16, 81) * half_gap * half_gap;
    if (lhs != Rational(4, 25) || rhs != shown || lhs > rhs)
      return {name, false, "case 2 fails at y=" + to_string(y) + ": lhs=" + to_string(lhs) + " rhs=" + to_string(rhs) +
                               " displayed=" + to_string(shown) + " (k=" + to_string(k) + ")"};
    ++instances;
  }
  // Case 3: x != 1, y = 1.
  for (const auto& x : ys) {
    k2(detail::pt(x), detail::pt(1), lhs, rhs);
    const Rational half_gap = Rational(1, 2) - x;
    const Rational shown = Rational(16, 81) * half_gap * half_gap + Rational(4, 25);
    if (lhs != Rational(4, 25) || rhs != shown || lhs > rhs)
      return {name, false, "case 3 fails at x=" + to_string(x) + ": lhs=" + to_string(lhs) + " rhs=" + to_string(rhs) +
                               " displayed=" + to_string(shown) + " (k=" + to_string(k) + ")"};
    ++instances;
  }
  return {name, true,
          std::to_string(instances) + " instances, 4/25 <= 4/25 + (16/81)(1/2 - y)^2 on " +
              std::to_string(ys.size()) + " values of y"};
}

inline ReproCheck repro_banach_fails_for_piecewise(std::uint64_t seed) {
  const Modular<Rational> rho(ModularSpec::power(2), 1);
  const auto f = kannan_example_map();
  SplitMix64 rng(seed ^ 0x5bd1e995u);
  const auto triples = random_banach_triples(rng, 50);
  const auto x = detail::pt(1), y = detail::pt(Rational(3, 5));
  for (const auto& c : triples) {
    Rational lhs = rho(c.b * (f(x) - f(y)));
    Rational rhs = c.k * rho(c.a * (x - y));
    if (lhs != 4 * c.b * c.b / 25 || rhs != 4 * c.a * c.a * c.k / 25 || !(lhs > rhs))
      return {"banach fails for piecewise", false, "no (B2) violation at (1, 3/5) for " + describe_constants<Rational>(c)};
  }
  return {"banach fails for piecewise", true, "4b^2/25 > 4a^2k/25 at (1, 3/5) for 50 admissible triples"};
}

inline ReproCheck repro_square_modular(std::uint64_t seed) {
  const Modular<Rational> rho(ModularSpec::power(2), 1);
  SplitMix64 rng(seed + 1);
  std::vector<Point<Rational>> sample;
  for (const auto& p : random_points(rng, -4, 4, 40, 1, 1000)) sample.push_back(point_from_rational<Rational>(p));
  sample.push_back(Point<Rational>::zero(1));
  const auto coeffs = default_coefficients<Rational>();
  auto axioms = check_modular_axioms(rho, sample, coeffs);
  auto convex = check_convexity(rho, sample, coeffs);
  bool ok = axioms.ok() && convex.ok();
  return {"rho = x^2 modular", ok,
          std::to_string(axioms.instances_checked + convex.instances_checked) + " instances, " +
              std::to_string(axioms.violations.size() + convex.violations.size()) + " violations of M1-M4 and M4'"};
}

inline ReproCheck repro_banach_rescale() {
  const std::string name = "convex banach rescaling";
  auto r = convex_rescale_banach<Rational>(Rational(4, 9), 1, 2);
  const auto& c = r.constants;
  if (c.k != Rational(8, 27) || c.a != Rational(3, 2) || c.b != 2)
    return {name, false, "(4/9, 1, 2) -> " + describe_constants<Rational>(c) + ", expected (8/27, 3/2, 2)"};
  const Modular<Rational> rho(ModularSpec::power(2), 1);
  PairSample<Rational> pairs;
  for (const auto& x : linear_grid(-2, 2, 10))
    for (const auto& y : linear_grid(-3, 3, 10)) pairs.emplace_back(detail::pt(x), detail::pt(y));
  auto report = check_banach_condition(third_map(), rho, make_complete<Rational>(), c, pairs);
  if (!report.ok()) return {name, false, "rescaled constants violate (B2) for x/3 under x^2"};
  return {name, true, "(4/9, 1, 2) -> (8/27, 3/2, 2), (B2) holds on " + std::to_string(pairs.size()) + " pairs"};
}

inline ReproCheck repro_kannan_rescale() {
  const std::string name = "convex kannan rescaling";
  auto r = convex_rescale_kannan<Rational>(Rational(64, 81), Rational(16, 81), Rational(1, 2), 1, 9);
  const auto& c = r.constants;
  if (c.k != Rational(64, 729) || c.l != Rational(32, 729) || c.a1 != Rational(9, 2) || c.a2 != Rational(9, 2) ||
      c.b != 9 || !r.uniqueness_gate)
    return {name, false,
            "(64/81, 16/81, 1/2, 1, 9) -> " + describe_constants<Rational>(c) + ", expected (64/729, 32/729, 9/2, 9/2, 9)"};
  // f = x/10 under x^2 meets (K2) with (1, 1, 1, 1, 5); the rescaled tuple must too.
  const Modular<Rational> rho(ModularSpec::power(2), 1);
  auto s = convex_rescale_kannan<Rational>(1, 1, 1, 1, 5);
  PairSample<Rational> pairs;
  for (const auto& x : linear_grid(-2, 2, 10))
    for (const auto& y : linear_grid(-3, 3, 10)) pairs.emplace_back(detail::pt(x), detail::pt(y));
  const auto f = affine_map<Rational>(Rational(1, 10), Rational(0));
  auto report = check_kannan_condition(f, rho, make_complete<Rational>(), s.constants, pairs);
  if (!report.ok()) return {name, false, "rescaled constants violate (K2) for x/10 under x^2"};
  return {name, true,
          "(64/81, 16/81, 1/2, 1, 9) -> (64/729, 32/729, 9/2, 9/2, 9), k' < 1/2; (K2) holds on " +
              std::to_string(pairs.size()) + " pairs"};
}

inline ReproReport repro_checks(const ReproOptions& opts = {}) {
  ReproReport report;
  auto timed = [&](const std::string& name, const std::function<ReproCheck()>& fn) {
    const auto start = std::chrono::steady_clock::now();
    ReproCheck c;
    try {
      c = fn();
    } catch (const Error& e) {
      c = {name, false, e.what()};
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.checks.push_back(std::move(c));
  };
  timed("banach identity", repro_banach_identity);
  timed("kannan fails for x/3", [&] { return repro_kannan_fails_for_third(opts.seed); });
  timed("kannan cases", [&] { return repro_kannan_cases(opts.kannan_k); });
  timed("banach fails for piecewise", [&] { return repro_banach_fails_for_piecewise(opts.seed); });
  timed("rho = x^2 modular", [&] { return repro_square_modular(opts.seed); });
  timed("convex banach rescaling", repro_banach_rescale);
  timed("convex kannan rescaling", repro_kannan_rescale);
  return report;
}

inline int run_repro(std::ostream& out, const ReproOptions& opts = {}) {
  const auto report = repro_checks(opts);
  for (const auto& c : report.checks)
    out << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << "\n";
  out << (report.ok() ? "result: all checks reproduce\n" : "result: mismatch\n");
  return report.ok() ? 0 : 1;
}

}  // namespace modfix
