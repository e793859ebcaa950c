#pragma once

// Decimal digit counts and the concatenation predicate
//   L_n = L_m * 10^d + L_p,  d = number of decimal digits of L_p.

#include <gmpxx.h>

#include <string>
#include <utility>

#include "klucas/error.hpp"
#include "klucas/mp.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

/// Exact number of base-10 digits of x >= 1.
inline long num_digits(const mpz_class& x) {
  if (x <= 0) throw DomainError("digit count needs a positive integer");
  // mpz_sizeinbase may overshoot by one; settle it against 10^(d-1).
  long d = static_cast<long>(mpz_sizeinbase(x.get_mpz_t(), 10));
  if (d > 1 && x < pow10(static_cast<unsigned long>(d - 1))) --d;
  return d;
}

struct ConcatInstance {
  int k = 0;
  long n = 0, m = 0, p = 0;
  long d = 0;
};

inline ConcatInstance make_concat_instance(KLucasContext& ctx, long n, long m, long p) {
  if (m < 0 || p < 0) throw DomainError("m and p must be non-negative");
  return ConcatInstance{ctx.order(), n, m, p, num_digits(ctx.term(p))};
}

/// L_n == L_m * 10^d + L_p with d = num_digits(L_p).
inline bool is_concatenation(KLucasContext& ctx, long n, long m, long p) {
  if (m < 0 || p < 0) throw DomainError("m and p must be non-negative");
  const mpz_class& lp = ctx.term(p);
  mpz_class rhs = ctx.term(m) * pow10(static_cast<unsigned long>(num_digits(lp))) + lp;
  return ctx.term(n) == rhs;
}

/// Decimal-string form of the same predicate.
inline bool is_string_concatenation(const mpz_class& ln, const mpz_class& lm, const mpz_class& lp) {
  return ln.get_str() == lm.get_str() + lp.get_str();
}

/// Open bounds (lo, hi) with lo < n < hi for any solution with these m, p.
inline std::pair<long, long> index_window(long m, long p) {
  if (m < 0 || p < 0) throw DomainError("m and p must be non-negative");
  return {m + p - 2, m + p + 8};
}

/// (p - 1)/5 < d < p + 2, checked in integers.
inline bool digit_bounds_hold(long p, long d) { return p - 1 < 5 * d && d < p + 2; }

}  // namespace klucas
