#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace modfix;
using modfix::testing::P;
using modfix::testing::Q;

namespace {

PairSample<Rational> grid_pairs(const Rational& lo, const Rational& hi, std::size_t count) {
  PairSample<Rational> out;
  for (const auto& x : linear_grid(lo, hi, count))
    for (const auto& y : linear_grid(lo, hi, count)) out.emplace_back(Point<Rational>::scalar(x), Point<Rational>::scalar(y));
  return out;
}

const Modular<Rational> kAbs(ModularSpec::abs_norm(), 1);
const Modular<Rational> kSquare(ModularSpec::power(2), 1);

}  // namespace

TEST(Constants, Admissibility) {
  EXPECT_NO_THROW(BanachConstants<Rational>(Q("2/3"), Q("1/2"), 1));
  EXPECT_THROW(BanachConstants<Rational>(1, Q("1/2"), 1), AdmissibilityError);
  EXPECT_THROW(BanachConstants<Rational>(Q("1/2"), 1, 1), AdmissibilityError);
  EXPECT_THROW(BanachConstants<Rational>(Q("1/2"), 0, 1), AdmissibilityError);
  EXPECT_EQ(BanachConstants<Rational>(Q("2/3"), Q("1/2"), 1).alpha(), 2);

  KannanConstants<Rational> kc(Q("64/81"), Q("16/81"), Q("1/2"), 1, 1);
  EXPECT_EQ(kc.delta(), Q("16/17"));
  EXPECT_EQ(kc.lambda(), Q("64/17"));
  EXPECT_FALSE(kc.a2_within_half_b());
  EXPECT_THROW(KannanConstants<Rational>(Q("1/2"), Q("1/2"), Q("1/2"), 1, 1), AdmissibilityError);
  EXPECT_THROW(KannanConstants<Rational>(Q("1/4"), Q("1/4"), Q("3/4"), 1, 1), AdmissibilityError);
  EXPECT_THROW(KannanConstants<Rational>(Q("1/4"), Q("1/4"), Q("1/2"), 2, 1), AdmissibilityError);
  EXPECT_THROW(KannanConstants<Rational>(0, Q("1/4"), Q("1/2"), 1, 1), AdmissibilityError);
}

TEST(EdgePreservation, Examples) {
  auto third = affine_map<Rational>(Q("1/3"), 0);
  EXPECT_TRUE(check_edge_preservation(third, make_complete<Rational>(), grid_pairs(-2, 2, 9)).ok());
  EXPECT_TRUE(check_edge_preservation(third, make_coordinatewise_poset<Rational>(), grid_pairs(-2, 2, 9)).ok());
  auto neg = affine_map<Rational>(-1, 0);
  auto r = check_edge_preservation(neg, make_coordinatewise_poset<Rational>(), {{P(0), P(1)}});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].kind, ViolationKind::edge_not_preserved);
  EXPECT_NE(r.find(P(0), P(1)), nullptr);
}

TEST(BanachCondition, ThirdMapHoldsWithEquality) {
  auto third = affine_map<Rational>(Q("1/3"), 0);
  BanachConstants<Rational> c(Q("2/3"), Q("1/2"), 1);
  auto r = check_banach_condition(third, kAbs, make_complete<Rational>(), c, grid_pairs(-3, 3, 13));
  EXPECT_TRUE(r.ok());
  EXPECT_EQ(r.pairs_checked, 169u);
  ASSERT_TRUE(r.max_ratio);
  EXPECT_EQ(*r.max_ratio, 1);
}

TEST(BanachCondition, PiecewiseFailsAtOneAndThreeFifths) {
  auto f = affine_map<Rational>(0, Q("1/2"));
  auto piecewise = SelfMap<Rational>{[](const Point<Rational>& x) { return x == P(1) ? P("1/10") : P("1/2"); }, "pw"};
  for (const auto& c : {BanachConstants<Rational>(Q("1/2"), Q("1/2"), 1), BanachConstants<Rational>(Q("99/100"), Q("9/10"), 1),
                        BanachConstants<Rational>(Q("1/10"), 3, 7)}) {
    auto r = check_banach_condition(piecewise, kSquare, make_complete<Rational>(), c, {{P(1), P("3/5")}});
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].lhs, 4 * c.b * c.b / 25);
    EXPECT_EQ(r.violations[0].rhs, 4 * c.a * c.a * c.k / 25);
  }
  EXPECT_TRUE(check_banach_condition(f, kSquare, make_complete<Rational>(), BanachConstants<Rational>(Q("1/2"), Q("1/2"), 1),
                                     grid_pairs(-1, 1, 5))
                  .ok());
}

TEST(BanachCondition, ConstantMapNeverViolates) {
  auto c = constant_map(P(7));
  for (const auto& g : {make_complete<Rational>(), make_loops_only<Rational>()})
    EXPECT_TRUE(check_banach_condition(c, kAbs, g, BanachConstants<Rational>(Q("1/100"), Q("1/100"), 1), grid_pairs(-2, 2, 5)).ok());
}

TEST(KannanCondition, PiecewiseHoldsAndMatchesCaseTwo) {
  auto piecewise = SelfMap<Rational>{[](const Point<Rational>& x) { return x == P(1) ? P("1/10") : P("1/2"); }, "pw"};
  KannanConstants<Rational> c(Q("64/81"), Q("16/81"), Q("1/2"), 1, 1);
  auto sample = grid_pairs(-2, 2, 17);
  sample.emplace_back(P(1), P(0));
  auto r = check_kannan_condition(piecewise, kSquare, make_complete<Rational>(), c, sample);
  EXPECT_TRUE(r.ok());
  ASSERT_TRUE(r.a2_within_half_b);
  EXPECT_FALSE(*r.a2_within_half_b);
  // the (1, 0) pair, computed directly
  Rational lhs = kSquare(c.b * (P("1/10") - P("1/2")));
  Rational rhs = c.k * kSquare(c.a1 * (P("1/10") - P(1))) + c.l * kSquare(c.a2 * (P("1/2") - P(0)));
  EXPECT_EQ(lhs, Q("4/25"));
  EXPECT_EQ(rhs, Q("4/25") + Q("16/81") * Q("1/4"));
}

TEST(KannanCondition, ThirdMapFailsAtXZero) {
  auto third = affine_map<Rational>(Q("1/3"), 0);
  KannanConstants<Rational> c(Q("1/2"), Q("1/3"), Q("1/2"), 1, 1);
  auto r = check_kannan_condition(third, kAbs, make_complete<Rational>(), c, {{P(3), P(0)}, {P(0), P(0)}});
  ASSERT_EQ(r.violations.size(), 1u);
  EXPECT_EQ(r.violations[0].x, P(3));
  EXPECT_EQ(r.violations[0].lhs, 1);                  // b|x|/3
  EXPECT_EQ(r.violations[0].rhs, 2 * c.a1 * c.k * 3 / 3);  // 2 a1 k |x| / 3
}

TEST(KannanCondition, RoleInterchange) {
  // (k, l, a1, a2) on (x, y) and (l, k, a2, a1) on (y, x) give the same right-hand side.
  auto f = affine_map<Rational>(Q("-2/7"), Q("1/3"));
  SplitMix64 rng(31);
  for (int i = 0; i < 500; ++i) {
    auto x = P(rng.uniform(-4, 4, 80).str());
    auto y = P(rng.uniform(-4, 4, 80).str());
    Rational k = rng.uniform_open(0, Q("1/2"), 100), l = rng.uniform_open(0, Q("1/2"), 100);
    Rational a1 = rng.uniform_open(0, 1, 100), a2 = rng.uniform_open(0, 1, 100);
    Rational forward = k * kSquare(a1 * (f(x) - x)) + l * kSquare(a2 * (f(y) - y));
    Rational swapped = l * kSquare(a2 * (f(y) - y)) + k * kSquare(a1 * (f(x) - x));
    EXPECT_EQ(forward, swapped);
    EXPECT_EQ(kSquare(f(x) - f(y)), kSquare(f(y) - f(x)));
  }
}

TEST(Transfer, DirectedPassImpliesUndirectedPassOnSymmetricSample) {
  auto f = affine_map<Rational>(Q("1/4"), 1);
  auto g1 = make_coordinatewise_poset<Rational>();
  BanachConstants<Rational> c(Q("3/4"), Q("1/2"), 1);
  auto sample = grid_pairs(-2, 2, 9);  // closed under swapping
  ASSERT_TRUE(check_banach_condition(f, kSquare, g1, c, sample, false).ok());
  auto undirected = check_banach_condition(f, kSquare, g1, c, sample, true);
  EXPECT_TRUE(undirected.ok());
  EXPECT_GT(undirected.pairs_checked, check_banach_condition(f, kSquare, g1, c, sample, false).pairs_checked);
}

TEST(EstimateK, ThirdMapAndIdentity) {
  auto third = affine_map<Rational>(Q("1/3"), 0);
  auto sample = grid_pairs(-3, 3, 7);
  auto k = estimate_banach_k(third, kAbs, make_complete<Rational>(), Q("1/2"), Rational(1), sample);
  ASSERT_TRUE(k);
  EXPECT_EQ(*k, Q("2/3"));
  // brute-force oracle
  Rational sup = 0;
  for (const auto& [x, y] : sample)
    if (x != y) sup = std::max(sup, abs_value(Rational((x[0] - y[0]) / 3)) / abs_value(Rational((x[0] - y[0]) / 2)));
  EXPECT_EQ(*k, sup);

  auto id = affine_map<Rational>(1, 0);
  EXPECT_EQ(*estimate_banach_k(id, kAbs, make_complete<Rational>(), Q("1/2"), Rational(1), sample), 2);
  EXPECT_EQ(*estimate_banach_k(constant_map(P(1)), kAbs, make_complete<Rational>(), Q("1/2"), Rational(1), sample), 0);
  EXPECT_FALSE(estimate_banach_k(id, kAbs, make_complete<Rational>(), Q("1/2"), Rational(1), {{P(1), P(1)}}));
  EXPECT_THROW(estimate_banach_k(id, kAbs, make_complete<Rational>(), Rational(1), Rational(1), sample), PreconditionError);
}

TEST(EstimateK, BelowOneImpliesConditionHolds) {
  SplitMix64 rng(5);
  auto sample = grid_pairs(-2, 2, 9);
  for (int i = 0; i < 40; ++i) {
    Rational slope = rng.uniform(-1, 1, 40);
    auto f = affine_map<Rational>(slope, rng.uniform(-1, 1, 10));
    Rational a = rng.uniform_open(0, 1, 10);
    auto k = estimate_banach_k(f, kSquare, make_complete<Rational>(), a, Rational(1), sample);
    ASSERT_TRUE(k);
    if (*k > 0 && *k < 1) {
      EXPECT_TRUE(check_banach_condition(f, kSquare, make_complete<Rational>(), BanachConstants<Rational>(*k, a, 1), sample).ok());
    }
  }
}

TEST(Rescale, BanachPaperArithmetic) {
  auto r = convex_rescale_banach<Rational>(Q("4/9"), 1, 2);
  EXPECT_EQ(r.c, 1);
  EXPECT_EQ(r.constants.k, Q("8/27"));
  EXPECT_EQ(r.constants.a, Q("3/2"));
  EXPECT_EQ(r.constants.b, 2);
  EXPECT_FALSE(r.rationale.empty());
  EXPECT_THROW(convex_rescale_banach<Rational>(Q("1/2"), 1, 1), AdmissibilityError);
  auto near_one = convex_rescale_banach<Rational>(Q("999/1000"), 1, Q("21/20"));
  EXPECT_LT(near_one.constants.k, 1);
}

TEST(Rescale, KannanPaperArithmetic) {
  auto r = convex_rescale_kannan<Rational>(Q("64/81"), Q("16/81"), Q("1/2"), 1, 9);
  EXPECT_EQ(r.c, 2);
  EXPECT_EQ(r.constants.k, Q("64/729"));
  EXPECT_EQ(r.constants.l, Q("32/729"));
  EXPECT_EQ(r.constants.a1, Q("9/2"));
  EXPECT_EQ(r.constants.a2, Q("9/2"));
  EXPECT_TRUE(r.uniqueness_gate);
  EXPECT_THROW(convex_rescale_kannan<Rational>(Q("1/4"), Q("1/4"), 1, 1, 4), AdmissibilityError);
}

TEST(Rescale, RandomAdmissibleInputsStayAdmissible) {
  SplitMix64 rng(11);
  for (int i = 0; i < 500; ++i) {
    Rational k = rng.uniform_open(0, 1, 1000), a = rng.uniform_open(0, 3, 1000);
    Rational b = std::max(a, Rational(a * k)) * (1 + rng.uniform_open(0, 1, 1000));
    auto bc = convex_rescale_banach<Rational>(k, a, b);
    EXPECT_LT(bc.constants.k, 1);
    EXPECT_LT(bc.constants.a, b);

    Rational k2 = rng.uniform_open(0, 2, 1000), l2 = rng.uniform_open(0, 2, 1000);
    Rational a1 = rng.uniform_open(0, 2, 1000), a2 = rng.uniform_open(0, 2, 1000);
    Rational m = std::max({a1, a2, Rational(a1 * k2), Rational(a2 * l2)});
    auto kc = convex_rescale_kannan<Rational>(k2, l2, a1, a2, 4 * m * (1 + rng.uniform_open(0, 1, 1000)));
    EXPECT_LT(kc.constants.k + kc.constants.l, 1);
    EXPECT_LT(kc.constants.k, Q("1/2"));
    EXPECT_TRUE(kc.uniqueness_gate);
  }
}

TEST(Rescale, SoundnessOnConvexModular) {
  auto sample = grid_pairs(-2, 2, 11);
  auto third = affine_map<Rational>(Q("1/3"), 0);
  BanachConstants<Rational> orig(Q("4/9"), 1, 2);
  ASSERT_TRUE(check_banach_condition(third, kSquare, make_complete<Rational>(), orig, sample).ok());
  auto r = convex_rescale_banach<Rational>(orig.k, orig.a, orig.b);
  EXPECT_TRUE(check_banach_condition(third, kSquare, make_complete<Rational>(), r.constants, sample).ok());

  auto tenth = affine_map<Rational>(Q("1/10"), 0);
  auto rk = convex_rescale_kannan<Rational>(1, 1, 1, 1, 5);
  EXPECT_EQ(rk.constants.k, Q("2/5"));
  EXPECT_EQ(rk.constants.l, Q("2/5"));
  EXPECT_TRUE(check_kannan_condition(tenth, kSquare, make_complete<Rational>(), rk.constants, sample).ok());
}
