#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"

using namespace modfix;
using modfix::testing::P;
using modfix::testing::Q;

namespace {

std::vector<Point<Rational>> points_1d(std::initializer_list<const char*> values) {
  std::vector<Point<Rational>> out;
  for (const char* v : values) out.push_back(P(v));
  return out;
}

std::vector<Point<Rational>> random_sample(std::uint64_t seed, std::size_t count, std::size_t dim) {
  SplitMix64 rng(seed);
  std::vector<Point<Rational>> out;
  for (const auto& p : random_points(rng, -3, 3, count, dim, 600)) out.push_back(point_from_rational<Rational>(p));
  return out;
}

}  // namespace

TEST(Modular, BuiltinValues) {
  Modular<Rational> abs(ModularSpec::abs_norm(), 1);
  EXPECT_EQ(abs(P(-3)), 3);
  Modular<Rational> sq(ModularSpec::power(2), 1);
  EXPECT_EQ(sq(P(0)), 0);
  EXPECT_EQ(sq(P("-1/3")), Q("1/9"));
  Modular<Rational> w(ModularSpec::weighted_power(2, {1, 2}), 2);
  EXPECT_EQ(w(Point<Rational>{1, 1}), 3);
  Modular<Rational> l1(ModularSpec::abs_norm(), 2);
  EXPECT_EQ(l1(Point<Rational>{Q("-1/2"), 2}), Q("5/2"));
}

TEST(Modular, FloatMatchesExact) {
  Modular<double> w(ModularSpec::weighted_power(3, {Q("1/2"), 4}), 2);
  EXPECT_DOUBLE_EQ(w(Point<double>{-2.0, 0.5}), 0.5 * 8 + 4 * 0.125);
  Modular<double> frac(ModularSpec::power(Q("3/2")), 1);
  EXPECT_NEAR(frac(Point<double>::scalar(4.0)), 8.0, 1e-12);
}

TEST(Modular, RhoGap) {
  Modular<Rational> abs(ModularSpec::abs_norm(), 1);
  Modular<Rational> sq(ModularSpec::power(2), 1);
  EXPECT_EQ(rho_gap(abs, Rational(1), P(1), P(0)), 1);
  EXPECT_EQ(rho_gap(sq, Rational(1), P("1/10"), P("1/2")), Q("4/25"));
  EXPECT_EQ(rho_gap(abs, Q("1/2"), P(3), P(0)), Q("3/2"));
  EXPECT_THROW(rho_gap(abs, Rational(0), P(3), P(0)), PreconditionError);
  EXPECT_THROW(rho_gap(abs, Rational(1), P(3), Point<Rational>{1, 2}), DimensionError);
}

TEST(Modular, RhoGapIsSymmetric) {
  Modular<Rational> w(ModularSpec::weighted_power(2, {3, Q("1/5")}), 2);
  auto pts = random_sample(5, 40, 2);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    EXPECT_EQ(rho_gap(w, Q("7/3"), pts[i], pts[i + 1]), rho_gap(w, Q("7/3"), pts[i + 1], pts[i]));
}

TEST(Modular, SpecValidation) {
  EXPECT_THROW(Modular<Rational>(ModularSpec::power(Q("1/2")), 1), PreconditionError);
  EXPECT_THROW(Modular<Rational>(ModularSpec::power(Q("3/2")), 1), PreconditionError);  // exact needs integer p
  EXPECT_THROW(Modular<Rational>(ModularSpec::weighted_power(2, {1}), 2), DimensionError);
  EXPECT_THROW(Modular<Rational>(ModularSpec::weighted_power(2, {1, 0}), 2), PreconditionError);
  Modular<Rational> abs(ModularSpec::abs_norm(), 1);
  EXPECT_THROW(abs(Point<Rational>{1, 2}), DimensionError);
}

TEST(Modular, SquareModularPassesAxiomsOnPaperSample) {
  Modular<Rational> sq(ModularSpec::power(2), 1);
  auto sample = points_1d({"-2", "-1", "0", "1", "2"});
  std::vector<Coefficients<Rational>> coeffs{{1, 0}, {Q("1/2"), Q("1/2")}};
  EXPECT_TRUE(check_modular_axioms(sq, sample, coeffs).ok());
  EXPECT_TRUE(check_convexity(sq, sample, coeffs).ok());
}

TEST(Modular, BuiltinsPassAxiomsOnRandomSamples) {
  const std::vector<std::pair<ModularSpec, std::size_t>> specs{
      {ModularSpec::abs_norm(), 1},      {ModularSpec::abs_norm(), 3},
      {ModularSpec::power(2), 1},        {ModularSpec::power(3), 2},
      {ModularSpec::weighted_power(2, {Q("1/2"), 3}), 2}};
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    for (const auto& [spec, dim] : specs) {
      Modular<Rational> rho(spec, dim);
      auto sample = random_sample(seed, 12, dim);
      auto report = check_modular_axioms(rho, sample, default_coefficients<Rational>());
      EXPECT_TRUE(report.ok()) << rho.description();
      EXPECT_GT(report.instances_checked, 0u);
      EXPECT_TRUE(check_convexity(rho, sample, default_coefficients<Rational>()).ok()) << rho.description();
    }
  }
}

TEST(Modular, BrokenFamilyIsCaughtAtOrigin) {
  auto broken = Modular<Rational>::custom([](const Point<Rational>& x) { return x[0] * x[0] - 1; }, 1, false, "x^2 - 1");
  auto report = check_modular_axioms(broken, points_1d({"1", "2"}), default_coefficients<Rational>());
  ASSERT_FALSE(report.ok());
  EXPECT_TRUE(report.violates(Axiom::m1_nonnegative));
  EXPECT_TRUE(report.violates(Axiom::m2_zero));
  bool origin_witness = false;
  for (const auto& v : report.violations)
    if (v.axiom == Axiom::m1_nonnegative && v.x.is_zero()) origin_witness = true;
  EXPECT_TRUE(origin_witness);
}

TEST(Modular, NonConvexModularFailsConvexityOnly) {
  // sqrt-like growth: rho(x) = |x| for |x| <= 1, else 1. A modular, but not convex.
  auto capped = Modular<Rational>::custom(
      [](const Point<Rational>& x) {
        Rational a = abs_value(x[0]);
        return a < 1 ? a : Rational(1);
      },
      1, false, "min(|x|, 1)");
  auto sample = points_1d({"-3", "-1", "-1/2", "0", "1/4", "2", "5"});
  EXPECT_TRUE(check_modular_axioms(capped, sample, default_coefficients<Rational>()).ok());
  auto convex = check_convexity(capped, sample, default_coefficients<Rational>());
  EXPECT_FALSE(convex.ok());
  EXPECT_TRUE(convex.violates(Axiom::m4_convex));
}

TEST(Modular, SubadditivityViolationHasWitness) {
  // A spike at 1/2 breaks rho(x/2 + y/2) <= rho(x) + rho(y) for x = 1, y = 0.
  auto spiked = Modular<Rational>::custom(
      [](const Point<Rational>& x) { return x[0] == Q("1/2") ? Rational(10) : abs_value(x[0]); }, 1, false, "spiked");
  auto report = check_modular_axioms(spiked, points_1d({"1", "0"}), {{Q("1/2"), Q("1/2")}});
  ASSERT_TRUE(report.violates(Axiom::m4_subadditive));
  bool found = false;
  for (const auto& v : report.violations)
    if (v.axiom == Axiom::m4_subadditive && v.x == P(1) && v.y && v.y->is_zero()) {
      found = true;
      EXPECT_EQ(v.lhs, 10);
      EXPECT_EQ(v.rhs, 1);
    }
  EXPECT_TRUE(found);
  EXPECT_TRUE(report.violates(Axiom::scaling_monotone));
}

TEST(Modular, ConvexityHoldsWithEqualityAtDegenerateCoefficients) {
  Modular<Rational> sq(ModularSpec::power(2), 1);
  for (const char* x : {"-2", "1/3", "5"})
    for (const char* y : {"0", "-7/2"}) EXPECT_EQ(sq(Rational(1) * P(x) + Rational(0) * P(y)), sq(P(x)));
  EXPECT_TRUE(check_convexity(sq, points_1d({"-2", "1/3", "5"}), {{1, 0}, {0, 1}}).ok());
}

TEST(Modular, CheckPreconditions) {
  Modular<Rational> abs(ModularSpec::abs_norm(), 1);
  EXPECT_THROW(check_modular_axioms(abs, {}, default_coefficients<Rational>()), PreconditionError);
  EXPECT_THROW(check_modular_axioms(abs, points_1d({"1"}), {{Q("1/2"), Q("1/3")}}), PreconditionError);
  EXPECT_THROW(check_convexity(abs, {}, default_coefficients<Rational>()), PreconditionError);
}

TEST(Modular, ScalingMonotonicityOracle) {
  // |a| <= |b| implies rho(ax) <= rho(bx), checked against a direct loop.
  Modular<double> w(ModularSpec::weighted_power(2, {1, 2}), 2);
  SplitMix64 rng(77);
  for (int i = 0; i < 2000; ++i) {
    double a = to_double(rng.uniform(-2, 2, 1000));
    double b = to_double(rng.uniform(-2, 2, 1000));
    if (std::fabs(a) > std::fabs(b)) std::swap(a, b);
    Point<double> x{to_double(rng.uniform(-5, 5, 1000)), to_double(rng.uniform(-5, 5, 1000))};
    EXPECT_FALSE(exceeds(w(a * x), w(b * x)));
  }
}
