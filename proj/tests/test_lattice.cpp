#include <gtest/gtest.h>

#include <random>

#include "klucas/algebraic.hpp"
#include "klucas/expr.hpp"
#include "klucas/lattice.hpp"

using namespace klucas;

namespace {

IntBasis random_basis(std::mt19937_64& rng, std::size_t n, long bound) {
  std::uniform_int_distribution<long> pick(-bound, bound);
  for (;;) {
    IntBasis b(n, IntVector(n));
    for (auto& col : b) {
      for (auto& x : col) x = pick(rng);
    }
    if (determinant(b) != 0) return b;
  }
}

mpq_class sq_norm(const IntVector& v) {
  mpz_class s = 0;
  for (const auto& x : v) s += x * x;
  return s;
}

// Shortest nonzero vector among small integer combinations of the columns.
mpz_class enumerate_shortest(const IntBasis& b, long box) {
  const std::size_t n = b.size();
  std::vector<long> c(n, -box);
  mpz_class best = -1;
  for (;;) {
    bool zero = std::all_of(c.begin(), c.end(), [](long x) { return x == 0; });
    if (!zero) {
      mpz_class s = 0;
      for (std::size_t r = 0; r < n; ++r) {
        mpz_class e = 0;
        for (std::size_t j = 0; j < n; ++j) e += c[j] * b[j][r];
        s += e * e;
      }
      if (best < 0 || s < best) best = s;
    }
    std::size_t i = 0;
    while (i < n && c[i] == box) c[i++] = -box;
    if (i == n) break;
    ++c[i];
  }
  return best;
}

}  // namespace

TEST(GramSchmidt, IdentityIsFixed) {
  IntBasis id = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto gs = gram_schmidt(id);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < i; ++j) EXPECT_EQ(gs.mu[i][j], 0);
    EXPECT_EQ(gs.norm2[i], 1);
  }
}

TEST(GramSchmidt, TwoDimensionalOrthogonality) {
  IntBasis b = {{1, 0}, {1, 1}};
  auto gs = gram_schmidt(b);
  EXPECT_EQ(gs.bstar[0][0] * gs.bstar[1][0] + gs.bstar[0][1] * gs.bstar[1][1], 0);
  EXPECT_EQ(gs.mu[1][0], 1);
}

TEST(GramSchmidt, ProductOfNormsIsDeterminant) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 30; ++t) {
    auto b = random_basis(rng, 3, 50);
    auto gs = gram_schmidt(b);
    mpq_class prod = 1;
    for (const auto& n2 : gs.norm2) prod *= n2;
    mpz_class det = determinant(b);
    EXPECT_EQ(prod, mpq_class(det * det));
  }
}

TEST(GramSchmidt, DependentColumnsThrow) {
  IntBasis b = {{1, 2}, {2, 4}};
  EXPECT_THROW(gram_schmidt(b), RankError);
  EXPECT_THROW(lll_reduce(b), RankError);
  EXPECT_EQ(determinant(b), 0);
}

TEST(LLL, IdentityUnchanged) {
  IntBasis id = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  EXPECT_EQ(lll_reduce(id).basis, id);
}

TEST(LLL, SkewedTwoDimensional) {
  IntBasis b = {{1, 1000000000}, {0, 1}};
  auto r = lll_reduce(b).basis;
  EXPECT_TRUE(is_lll_reduced(r));
  EXPECT_EQ(abs(determinant(r)), abs(determinant(b)));
}

TEST(LLL, RandomLatticesKeepDeterminantAndReduce) {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 200; ++t) {
    std::size_t n = 2 + static_cast<std::size_t>(t % 4);
    auto b = random_basis(rng, n, 1000000000);
    auto r = lll_reduce(b).basis;
    ASSERT_EQ(abs(determinant(r)), abs(determinant(b)));
    ASSERT_TRUE(is_lll_reduced(r));
  }
}

TEST(LLL, ShortVectorWithinApproximationFactor) {
  const int k = 3;
  auto rc = make_root_context(k, 100);
  mpz_class C = pow10(12);
  std::vector<Interval> eta = {rc.log_alpha, -log_of(10, rc.bits()),
                               log(rc.fk_alpha * (rc.alpha * 2 - 1) * (1 - pow(rc.alpha, -5)) / 6)};
  auto inst = deweger_lattice(C, eta);
  auto r = lll_reduce(inst.basis).basis;
  mpz_class shortest = enumerate_shortest(r, 3);
  // ||b_1||^2 <= 2^(n-1) * lambda_1^2
  EXPECT_LE(mpq_class(sq_norm(r[0])), mpq_class(shortest * 4));
}

TEST(DeWeger, ScalarExample) {
  auto inst = deweger_lattice(mpz_class(10), std::vector<Interval>{Interval::from_decimal("1.5")});
  ASSERT_EQ(inst.basis.size(), 1u);
  EXPECT_EQ(inst.basis[0][0], 15);
}

TEST(DeWeger, ShapeOfThreeTermLattice) {
  auto rc = make_root_context(3, 200);
  mpz_class C = 5 * pow10(150);
  std::vector<RealFn> eta = {
      [](Bits b) { return RealExpr("log(alpha(3))").eval(b); },
      [](Bits b) { return -log_of(10, b); },
      [](Bits b) { return RealExpr("log(fk(3)*(2*alpha(3)-1)*(1-alpha(3)^-4)/3)").eval(b); },
  };
  auto inst = deweger_lattice(C, eta);
  EXPECT_EQ(inst.basis[0][0], 1);
  EXPECT_EQ(inst.basis[0][1], 0);
  EXPECT_EQ(inst.basis[1][1], 1);
  EXPECT_EQ(inst.basis[2][0], 0);
  EXPECT_EQ(inst.basis[2][1], 0);
  EXPECT_EQ(inst.basis[0][2], inst.floors[0]);
  EXPECT_EQ(inst.basis[2][2], inst.floors[2]);
  EXPECT_GT(inst.floors[0].get_str().size(), 150u);
}

TEST(LemmaRed, TargetInLattice) {
  IntBasis b = lll_reduce({{3, 1}, {1, 4}}).basis;
  auto r = lemma_red(b, IntVector{0, 0});
  EXPECT_TRUE(r.y_in_lattice);
  EXPECT_EQ(r.lambda, 1);
}

TEST(LemmaRed, RejectsUnreducedBasis) {
  IntBasis b = {{1, 1000000000}, {0, 1}};
  EXPECT_THROW(lemma_red(b, IntVector{0, 0}), PreconditionError);
}

TEST(LemmaRed, BoundIsBelowTrueDistance) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<long> pick(-40, 40);
  for (int t = 0; t < 40; ++t) {
    IntBasis b = random_basis(rng, 2, 30);
    b = lll_reduce(b).basis;
    IntVector y = {pick(rng), pick(rng)};
    auto r = lemma_red(b, y);
    // True distance by enumeration over a generous coefficient box around z.
    RatVector z = solve(b, y);
    mpz_class best = -1;
    for (long i = -60; i <= 60; ++i) {
      for (long j = -60; j <= 60; ++j) {
        mpz_class c0 = mpz_class(z[0].get_num() / z[0].get_den()) + i;
        mpz_class c1 = mpz_class(z[1].get_num() / z[1].get_den()) + j;
        if (r.y_in_lattice && c0 * b[0][0] + c1 * b[1][0] == y[0] && c0 * b[0][1] + c1 * b[1][1] == y[1]) continue;
        mpz_class e0 = c0 * b[0][0] + c1 * b[1][0] - y[0];
        mpz_class e1 = c0 * b[0][1] + c1 * b[1][1] - y[1];
        mpz_class s = e0 * e0 + e1 * e1;
        if (best < 0 || s < best) best = s;
      }
    }
    EXPECT_LE(r.delta_squared, mpq_class(best)) << "trial " << t;
    EXPECT_TRUE(r.delta.contains(Interval::from_reals(r.delta.mid(), r.delta.mid())));
    EXPECT_FALSE(certainly_less(Interval::from_q(r.delta_squared), r.delta * r.delta));
  }
}

TEST(LemmaBlue, PrintedInstances) {
  const Bits bits = 512;
  auto D = [&](const char* s) { return Interval::from_decimal(s, bits); };
  // Order 8 lands exactly on 343.
  auto rc = make_root_context(8, 100);
  Interval h = lemma_blue(D("3.4e50"), D("5.1e100"), D("2.4e50"), D("5e150"), D("28"), rc.log_alpha.with_prec(bits));
  EXPECT_EQ(floor_upper(h), 343);
  Interval h2 = lemma_blue(D("3.3e230"), D("5.12e460"), D("2.4e230"), D("4.1e690"), D("108"), log_of(2, bits));
  EXPECT_NEAR(h2.lower_double(), 1545.78, 0.01);
}

TEST(LemmaBlue, BoundaryIsInapplicable) {
  Interval five = Interval::exact(5), three = Interval::exact(3), four = Interval::exact(4);
  // delta^2 = T^2 + S: 25 = 9 + 16
  EXPECT_THROW(lemma_blue(five, Interval::exact(16), three, Interval::exact(10), Interval::exact(1), four),
               InapplicableError);
  EXPECT_THROW(lemma_blue(three, Interval::exact(16), three, Interval::exact(10), Interval::exact(1), four),
               InapplicableError);
  EXPECT_NO_THROW(lemma_blue(Interval::exact(6), Interval::exact(16), three, Interval::exact(10),
                             Interval::exact(1), four));
}
