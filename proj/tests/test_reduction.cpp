#include <gtest/gtest.h>

#include <cmath>

#include "klucas/reduction.hpp"

using namespace klucas;

namespace {

Interval N_of(long k) { return final_n_bound(Interval::exact(k, kBoundBits)); }

const ContinuedFraction& cf_log2_log10() {
  static const ContinuedFraction cf = cf_expand(log2_over_log10(), 520);
  return cf;
}

const ContinuedFraction& cf_tau() {
  static const ContinuedFraction cf = cf_expand(log10_over_log2(), 760);
  return cf;
}

}  // namespace

TEST(CfAmax, KThreeFixture) {
  auto r = cf_amax_reduction(3, N_of(3));
  EXPECT_EQ(r.index, 56u);
  EXPECT_EQ(r.a_max, 44);
  EXPECT_EQ(r.np_max, 127);
  EXPECT_EQ(r.threshold, 9);  // alpha(3)^9 > 210 > alpha(3)^8
}

TEST(CfAmax, SidesAgreeWithDoubles) {
  for (long k : {3L, 7L, 20L, 50L}) {
    auto r = cf_amax_reduction(k, N_of(k));
    double la = std::log(make_root_context(static_cast<int>(k), 60).alpha.lower_double());
    double N = ceil_upper(N_of(k)).get_d();
    double leg = std::log(106 * (r.a_max.get_d() + 2) * N / std::log(10.0)) / la;
    double plain = std::log(212 * N / std::log(10.0)) / la;
    EXPECT_NEAR(r.legendre_side.lower_double(), leg, 1e-9 * leg);
    EXPECT_NEAR(r.plain_side.lower_double(), plain, 1e-9 * plain);
    EXPECT_EQ(r.np_max, std::max({static_cast<long>(std::ceil(leg)) - 1, static_cast<long>(std::ceil(plain)) - 1,
                                  r.threshold - 1}));
  }
}

TEST(CfAmax, EveryDeskKBelowPublished) {
  for (long k = 3; k <= 50; ++k) {
    auto r = cf_amax_reduction(k, N_of(k));
    EXPECT_LT(r.np_max + 1, 181) << k;
    EXPECT_LT(r.np_max + 2, 183) << k;
    EXPECT_GE(r.threshold, 8) << k;  // alpha(k) < 2 so alpha^7 < 210
  }
  EXPECT_THROW(cf_amax_reduction(2, N_of(3)), DomainError);
}

TEST(A1, SingleInstanceIsReducedAndApplicable) {
  Interval X = N_of(3);
  mpz_class C = auto_lattice_constant(X);
  EXPECT_EQ(C, pow10(98));
  auto inst = lll_a1_instance(3, 5, 2, C, X);
  ASSERT_TRUE(inst.applicable) << inst.reason;
  EXPECT_TRUE(is_lll_reduced(inst.reduced));
  mpz_class d0 = determinant(inst.lattice.basis), d1 = determinant(inst.reduced);
  EXPECT_EQ(abs(d0), abs(d1));
  EXPECT_EQ(abs(d0), abs(inst.lattice.floors[2]));
  EXPECT_TRUE(certainly_less(inst.H, Interval::exact(343, kBoundBits)));
  // delta^2 >= T^2 + S, the Lemma blue hypothesis.
  EXPECT_TRUE(certainly_le(inst.T * inst.T + inst.S, inst.red.delta * inst.red.delta));
  EXPECT_THROW(lll_a1_instance(2, 5, 2, C, X), DomainError);
  EXPECT_THROW(lll_a1_instance(3, 0, 2, C, X), DomainError);
}

TEST(A1, SmallConstantIsInapplicable) {
  auto inst = lll_a1_instance(3, 5, 2, pow10(40), N_of(3));
  EXPECT_FALSE(inst.applicable);
  EXPECT_FALSE(inst.reason.empty());
}

TEST(A1, FullSweepAtKThree) {
  Interval N = N_of(3);
  auto amax = cf_amax_reduction(3, N);
  auto s = lll_a1_sweep(3, N, amax.np_max);
  EXPECT_EQ(s.lattices, 8382);  // sum over n - p = 1..127 of (n - p + 2)
  EXPECT_EQ(s.retries, 0);
  EXPECT_TRUE(certainly_less(s.H_max, Interval::exact(343, kBoundBits)));
  EXPECT_NEAR(s.H_max.upper_double(), 258.64, 0.01);
  EXPECT_EQ(s.n_cap, 259);
  EXPECT_EQ(s.small_n, 7);  // alpha(3)^7 > 54 > alpha(3)^6
}

TEST(Dichotomy, SecondRoundReproducesPublished) {
  auto r = gamma3_dichotomy(Interval::from_decimal("2e56", kBoundBits), cf_log2_log10());
  EXPECT_EQ(r.index, 122u);
  EXPECT_EQ(r.a_max, 119);
  EXPECT_TRUE(certainly_less(r.mu_bound, Interval::exact(194, kBoundBits)));
  EXPECT_EQ(r.k_max + 1, 402);
  EXPECT_EQ(r.np_max + 1, 195);
}

TEST(Dichotomy, FirstRoundFromLemmaBound) {
  auto lp = derive_lemma_p(500);
  auto r = gamma3_dichotomy(lp.n_bound, cf_log2_log10());
  EXPECT_EQ(r.index, 462u);
  EXPECT_EQ(r.a_max, 5393);
  EXPECT_NEAR(r.mu_bound.upper_double(), 763.96, 0.01);
  EXPECT_EQ(r.k_max, 1541);
  EXPECT_EQ(r.np_max, 764);
}

TEST(A2, DegenerateLatticeIsInapplicable) {
  auto lp = derive_lemma_p(500);
  auto a = lll_a2_attempt(parse_rational("4.1e690").get_num(), lp.n_bound);
  EXPECT_FALSE(a.applicable);
  // floor(C log 2) twice: the reduced basis contains a vector of length 1.
  EXPECT_EQ(a.lattice.floors[0], a.lattice.floors[2]);
  EXPECT_TRUE(certainly_le(a.red.delta, Interval::exact(1, kBoundBits)));
  EXPECT_TRUE(is_lll_reduced(a.reduced));
}

TEST(Gamma4, MuValues) {
  EXPECT_NEAR(gamma4_mu(1, kBoundBits).lower_double(), 1.0, 1e-15);
  EXPECT_NEAR(gamma4_mu(2, kBoundBits).lower_double(), -std::log(0.75) / std::log(2.0), 1e-15);
  EXPECT_NEAR(gamma4_mu(40, kBoundBits).lower_double(), std::pow(2.0, -40) / std::log(2.0), 1e-20);
}

TEST(Gamma4, FinalRoundReproducesPublished) {
  auto r = gamma4_bd_round(parse_rational("2e56").get_num(), 194, cf_tau());
  EXPECT_EQ(r.first_index, 124u);
  EXPECT_EQ(cf_tau().q[124], mpz_class("17974255294124444596871803224395333592038752850416569230287"));
  EXPECT_TRUE(certainly_less(r.w_max, Interval::exact(213, kBoundBits)));
  EXPECT_EQ(r.k_max, 425);
  EXPECT_NEAR(r.eps_max.lower_double(), 0.49693, 5e-6);
  EXPECT_TRUE(r.entries.front().legendre);
  for (const auto& e : r.entries) {
    if (!e.legendre) {
      EXPECT_TRUE(e.bd.epsilon.is_positive());
    }
  }
}

TEST(Gamma4, FirstRoundReplacesLattice) {
  auto lp = derive_lemma_p(500);
  auto r = gamma4_bd_round(ceil_upper(lp.n_bound), 764, cf_tau());
  EXPECT_TRUE(certainly_less(r.w_max, Interval::exact(1538, kBoundBits)));
  EXPECT_EQ(r.k_max, 1551);
}

TEST(Gamma4, ShortExpansionFails) {
  auto cf = cf_expand(log10_over_log2(), 40);
  EXPECT_THROW(gamma4_bd_round(parse_rational("2e56").get_num(), 5, cf), InsufficientExpansionError);
}
