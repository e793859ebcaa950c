#include <gtest/gtest.h>

#include "klucas/algebraic.hpp"

using namespace klucas;

namespace {

// Exact rational bisection on x^3 - x^2 - x - 1 over [1, 2].
mpq_class bisect_tribonacci_root(int steps, mpq_class& hi_out) {
  mpq_class lo(1), hi(2);
  auto f = [](const mpq_class& x) -> mpq_class { return x * x * x - x * x - x - 1; };
  for (int i = 0; i < steps; ++i) {
    mpq_class mid = (lo + hi) / 2;
    if (f(mid) < 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  hi_out = hi;
  return lo;
}

}  // namespace

TEST(RootContext, GoldenRatioForOrderTwo) {
  auto rc = make_root_context(2, 60);
  Bits bits = rc.bits();
  Interval phi = (sqrt(Interval::exact(5, bits)) + 1) / 2;
  EXPECT_FALSE(certainly_less(rc.alpha, phi));
  EXPECT_FALSE(certainly_less(phi, rc.alpha));
  EXPECT_NEAR(rc.alpha.lower_double(), 1.6180339887498949, 1e-15);
}

TEST(RootContext, OrderFiveBracket) {
  auto rc = make_root_context(5, 60);
  EXPECT_TRUE(certainly_less(Interval::from_decimal("1.9375", rc.bits()), rc.alpha));
  EXPECT_TRUE(certainly_less(rc.alpha, Interval::exact(2, rc.bits())));
}

TEST(RootContext, TribonacciRootAgreesWithBisection) {
  auto rc = make_root_context(3, 60);
  mpq_class hi;
  mpq_class lo = bisect_tribonacci_root(150, hi);
  Interval oracle = Interval::from_reals(Interval::from_q(lo, rc.bits()).lower(),
                                         Interval::from_q(hi, rc.bits()).upper());
  EXPECT_NO_THROW(intersect(rc.alpha, oracle));
  EXPECT_NEAR(rc.alpha.lower_double(), 1.839286755214161, 1e-14);
}

TEST(RootContext, RejectsBadArguments) {
  EXPECT_THROW(make_root_context(1, 60), DomainError);
  EXPECT_THROW(make_root_context(3, 49), DomainError);
}

TEST(RootContext, DefaultPrecisionWidth) {
  auto rc = make_root_context(7);
  EXPECT_EQ(rc.precision, kDefaultPrecision);
  Interval allowed = pow(Interval::exact(10, rc.bits()), -990);
  EXPECT_TRUE(certainly_le(Interval::from_reals(rc.alpha.width(), rc.alpha.width()), allowed));
}

TEST(RootContext, InvariantsHoldAcrossOrders) {
  for (int k = 2; k <= 1000; ++k) {
    auto rc = make_root_context(k, 60);
    Bits bits = rc.bits();
    ASSERT_TRUE(psi_shifted(k, rc.alpha).contains_zero()) << k;
    ASSERT_TRUE(certainly_less(rc.alpha, Interval::exact(2, bits))) << k;
    ASSERT_TRUE(certainly_less(Interval::from_q(mpq_class(1, 2), bits), rc.fk_alpha)) << k;
    ASSERT_TRUE(certainly_less(rc.fk_alpha, Interval::from_q(mpq_class(3, 4), bits))) << k;
    ASSERT_TRUE(rc.log_alpha.is_positive()) << k;
  }
}

TEST(RootContext, HornerStraddlesZero) {
  for (int k : {2, 3, 10, 50, 200}) {
    auto rc = make_root_context(k, 100);
    EXPECT_TRUE(psi_horner(k, rc.alpha).contains_zero()) << k;
    // Horner at the endpoints agrees with the shifted form on the sign.
    Interval lo = Interval::from_reals(rc.alpha.lower(), rc.alpha.lower());
    Interval hi = Interval::from_reals(rc.alpha.upper(), rc.alpha.upper());
    EXPECT_TRUE(psi_horner(k, lo).is_negative()) << k;
    EXPECT_TRUE(psi_horner(k, hi).is_positive()) << k;
  }
}

TEST(RootContext, RefinementIsMonotone) {
  for (int k : {2, 3, 11, 97}) {
    auto coarse = make_root_context(k, 60);
    auto fine = refine(coarse, 120);
    auto finer = refine(fine, 240);
    EXPECT_TRUE(coarse.alpha.contains(fine.alpha)) << k;
    EXPECT_TRUE(fine.alpha.contains(finer.alpha)) << k;
  }
}

TEST(FkValue, OrderTwoValue) {
  auto rc = make_root_context(2, 60);
  // f_2(phi) = (phi - 1) / (3 phi - 4) = (5 + sqrt 5) / 10
  Interval expected = (sqrt(Interval::exact(5, rc.bits())) + 5) / 10;
  EXPECT_NO_THROW(intersect(fk_value(rc), expected));
  EXPECT_NEAR(fk_value(rc).lower_double(), 0.7236067977499790, 1e-15);
}

TEST(Binet, Examples) {
  {
    auto rc = make_root_context(3, 60);
    KLucasContext ctx(3);
    auto est = binet_estimate(rc, ctx, 5);
    EXPECT_TRUE(certainly_less(abs(est.residual), Interval::from_q(mpq_class(3, 2))));
  }
  {
    auto rc = make_root_context(2, 60);
    KLucasContext ctx(2);
    EXPECT_NO_THROW(binet_estimate(rc, ctx, 1));
  }
  {
    auto rc = make_root_context(4, 60);
    KLucasContext ctx(4);
    auto est = binet_estimate(rc, ctx, 11);
    EXPECT_NEAR(est.value.lower_double(), 1145.0, 1.5);
  }
}

TEST(Binet, ResidualBoundOverGrid) {
  for (int k = 2; k <= 30; ++k) {
    auto rc = make_root_context(k, 200);
    KLucasContext ctx(k);
    for (long n = 2 - k; n <= 300; ++n) {
      ASSERT_NO_THROW(binet_estimate(rc, ctx, n)) << "k=" << k << " n=" << n;
    }
  }
}

TEST(Binet, RejectsMismatchedContexts) {
  auto rc = make_root_context(3, 60);
  KLucasContext ctx(4);
  EXPECT_THROW(binet_estimate(rc, ctx, 5), DomainError);
}

TEST(SharpEstimate, Examples) {
  EXPECT_TRUE(sharp_estimate_check(make_root_context(20, 100), 100));
  EXPECT_TRUE(sharp_estimate_check(make_root_context(500, 100), 1000));
  EXPECT_THROW(sharp_estimate_check(make_root_context(20, 100), 2000), DomainError);
}

TEST(Heights, RationalExamples) {
  EXPECT_TRUE(intersect(log_height_rational(10, 1), log_of(10)).contains(log_of(10)));
  Interval zero = log_height_rational(1, 1);
  EXPECT_EQ(zero.lower_double(), 0.0);
  EXPECT_EQ(zero.upper_double(), 0.0);
  EXPECT_NO_THROW(intersect(log_height_rational(-7, 2), log_of(7)));
  EXPECT_THROW(log_height_rational(1, 0), DomainError);
  EXPECT_THROW(log_height_rational(4, 2), DomainError);
}

TEST(Heights, CombineRules) {
  Interval zero = Interval::exact(0);
  EXPECT_EQ(height_bound_combine({{zero, HeightKind::kProduct}, {zero, HeightKind::kProduct}}).upper_double(), 0.0);

  // Height of f_k(alpha)(2 alpha - 1)(1 - alpha^(p-n)) / L_m for k = 5, m = 7, n - p = 3.
  const int k = 5;
  const long m = 7, gap = 3;
  auto rc = make_root_context(k, 60);
  Interval la = rc.log_alpha / k;
  Interval log_lm = log(Interval::from_z(KLucasContext(k).term(m)));
  Interval bound = height_bound_combine({
      {log_of(k) * 3, HeightKind::kProduct},
      {la, HeightKind::kSum},
      {la * gap, HeightKind::kSum},
      {log_lm, HeightKind::kProduct},
  });
  Interval formula = log_of(k) * 3 + la + la * gap + log_lm + log_of(2) * 2;
  EXPECT_NO_THROW(intersect(bound, formula));
  EXPECT_TRUE(certainly_less(log_lm, rc.log_alpha * m + log_of(2)));

  Interval h = log_of(3);
  Interval sum = height_bound_combine({{h, HeightKind::kSum}});
  EXPECT_NO_THROW(intersect(sum, h + log_of(2)));
  Interval power = height_bound_combine({{h, HeightKind::kPower, -4}});
  EXPECT_NO_THROW(intersect(power, h * 4));
}
