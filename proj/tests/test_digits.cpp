#include <gtest/gtest.h>

#include "klucas/digits.hpp"

using namespace klucas;

TEST(Digits, NumDigitsExamples) {
  EXPECT_EQ(num_digits(2), 1);
  EXPECT_EQ(num_digits(384), 3);
  EXPECT_EQ(num_digits(1145), 4);
  EXPECT_THROW(num_digits(0), DomainError);
  EXPECT_THROW(num_digits(-5), DomainError);
}

TEST(Digits, PowersOfTenBoundaries) {
  for (unsigned long e = 0; e <= 400; ++e) {
    mpz_class p = pow10(e);
    ASSERT_EQ(num_digits(p), static_cast<long>(e) + 1);
    if (e > 0) {
      ASSERT_EQ(num_digits(p - 1), static_cast<long>(e)) << e;
    }
    ASSERT_EQ(num_digits(p + 1), static_cast<long>(e) + 1);
  }
}

TEST(Digits, ConcatenationExamples) {
  KLucasContext k4(4), k5(5), k3(3);
  EXPECT_TRUE(is_concatenation(k4, 5, 0, 0));
  EXPECT_TRUE(is_concatenation(k5, 4, 1, 0));
  EXPECT_FALSE(is_concatenation(k3, 4, 1, 0));
  auto inst = make_concat_instance(k4, 5, 0, 0);
  EXPECT_EQ(inst.d, 1);
}

TEST(Digits, IndexWindowExamples) {
  EXPECT_EQ(index_window(1, 0), std::make_pair(-1L, 9L));
  EXPECT_EQ(index_window(0, 0), std::make_pair(-2L, 8L));
  EXPECT_EQ(index_window(250, 250), std::make_pair(498L, 508L));
  EXPECT_THROW(index_window(-1, 0), DomainError);
}

TEST(Digits, DigitCountBoundsAndPowerOfTenSandwich) {
  for (int k = 2; k <= 30; ++k) {
    KLucasContext ctx(k);
    for (long p = 1; p <= 300; ++p) {
      const mpz_class& lp = ctx.term(p);
      long d = num_digits(lp);
      ASSERT_TRUE(digit_bounds_hold(p, d)) << "k=" << k << " p=" << p;
      mpz_class t = pow10(static_cast<unsigned long>(d));
      ASSERT_LT(lp, t);
      ASSERT_LE(t, 10 * lp);
      ASSERT_EQ(static_cast<std::size_t>(d), lp.get_str().size());
    }
  }
}

TEST(Digits, ExactAndStringConcatenationAgree) {
  for (int k = 2; k <= 8; ++k) {
    KLucasContext ctx(k);
    for (long m = 0; m <= 25; ++m) {
      for (long p = 0; p <= 25; ++p) {
        for (long n = std::max(2L, m + p - 1); n < m + p + 8; ++n) {
          bool exact = is_concatenation(ctx, n, m, p);
          ASSERT_EQ(exact, is_string_concatenation(ctx.term(n), ctx.term(m), ctx.term(p)));
        }
      }
    }
  }
}
