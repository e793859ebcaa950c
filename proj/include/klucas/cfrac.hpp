#pragma once

// Certified continued fractions, the Baker-Davenport reduction and
// Legendre's lower bound |m tau - n| > 1/((a_M + 2) m).

#include <gmpxx.h>

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "klucas/error.hpp"
#include "klucas/mp.hpp"

namespace klucas {

/// A real number as a function of working precision.
using RealFn = std::function<Interval(Bits)>;

struct ContinuedFraction {
  Interval value;
  std::vector<mpz_class> quotients;  // a_0, a_1, ...
  std::vector<mpz_class> p, q;       // convergents p_i / q_i

  std::size_t size() const { return quotients.size(); }
};

namespace detail {

struct EuclidState {
  mpz_class num, den;
  bool done = false;

  explicit EuclidState(const Real& r) {
    mpq_class v = r.to_rational();
    num = v.get_num();
    den = v.get_den();
  }

  /// Next partial quotient, or nothing when the expansion has ended.
  std::optional<mpz_class> next() {
    if (done) return std::nullopt;
    mpz_class a;
    mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    mpz_class rem = num - a * den;
    num = den;
    den = rem;
    if (rem == 0) done = true;
    return a;
  }
};

inline void push_convergent(ContinuedFraction& cf, const mpz_class& a) {
  const std::size_t i = cf.quotients.size();
  mpz_class p_prev1 = i >= 1 ? cf.p[i - 1] : mpz_class(1);
  mpz_class q_prev1 = i >= 1 ? cf.q[i - 1] : mpz_class(0);
  mpz_class p_prev2 = i >= 2 ? cf.p[i - 2] : (i == 1 ? mpz_class(1) : mpz_class(0));
  mpz_class q_prev2 = i >= 2 ? cf.q[i - 2] : (i == 1 ? mpz_class(0) : mpz_class(1));
  cf.quotients.push_back(a);
  cf.p.push_back(a * p_prev1 + p_prev2);
  cf.q.push_back(a * q_prev1 + q_prev2);
}

}  // namespace detail

/// Partial quotients on which both endpoints of `x` agree, up to `count`.
///
/// A quotient a_i counts only when both endpoint expansions continue past i;
/// every real in the enclosure then shares a_0 .. a_i.
inline ContinuedFraction cf_expand_partial(const Interval& x, std::size_t count) {
  ContinuedFraction cf;
  cf.value = x;
  detail::EuclidState lo(x.lower()), hi(x.upper());
  while (cf.size() < count) {
    auto a = lo.next();
    auto b = hi.next();
    if (!a || !b || *a != *b || lo.done || hi.done) break;
    detail::push_convergent(cf, *a);
  }
  return cf;
}

/// First `count` certified partial quotients of a fixed enclosure.
inline ContinuedFraction cf_expand(const Interval& x, std::size_t count) {
  ContinuedFraction cf = cf_expand_partial(x, count);
  if (cf.size() < count) {
    throw CertificationError("certified only " + std::to_string(cf.size()) + " of " + std::to_string(count) +
                                 " partial quotients",
                             cf.size());
  }
  return cf;
}

/// Working precision that usually certifies `count` quotients in one pass.
inline Bits cf_bits_for(std::size_t count) { return static_cast<Bits>(4 * count + 128); }

/// Expansion of a real given at any precision; doubles the precision up to
/// `cap_factor` times the starting value before giving up.
inline ContinuedFraction cf_expand(const RealFn& x, std::size_t count, Bits start = 0, int cap_factor = 4) {
  if (start <= 0) start = cf_bits_for(count);
  std::size_t best = 0;
  for (Bits bits = start; bits <= start * cap_factor; bits *= 2) {
    ContinuedFraction cf = cf_expand_partial(x(bits), count);
    if (cf.size() >= count) return cf;
    best = std::max(best, cf.size());
  }
  throw CertificationError("certified only " + std::to_string(best) + " of " + std::to_string(count) +
                               " partial quotients at the precision cap",
                           best);
}

/// max(a_0, ..., a_i_max).
inline mpz_class max_quotient(const ContinuedFraction& cf, std::size_t i_max) {
  if (cf.size() <= i_max) {
    throw InsufficientExpansionError("need " + std::to_string(i_max + 1) + " quotients, have " +
                                     std::to_string(cf.size()));
  }
  return *std::max_element(cf.quotients.begin(), cf.quotients.begin() + static_cast<long>(i_max) + 1);
}

/// Smallest index with q_i > bound, if certified.
inline std::optional<std::size_t> first_q_above(const ContinuedFraction& cf, const mpz_class& bound) {
  for (std::size_t i = 0; i < cf.size(); ++i) {
    if (cf.q[i] > bound) return i;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Baker-Davenport

/// No solutions of 0 < |u gamma - v + mu| < A B^-w with u <= M and w >= w_bound.
struct ReductionProblem {
  Interval gamma;
  Interval mu;
  Interval A;
  Interval B;
  mpz_class M;

  void validate() const {
    if (!A.is_positive()) throw DomainError("A must be positive");
    if (!certainly_greater(B, Interval::exact(1, B.prec()))) throw DomainError("B must exceed 1");
    if (M < 1) throw DomainError("M must be a positive integer");
  }
};

struct BakerDavenportAttempt {
  std::size_t index = 0;
  mpz_class q;
  Interval epsilon;  // ||mu q|| - M ||gamma q||
};

struct BakerDavenportResult {
  bool success = false;
  std::size_t index = 0;
  mpz_class q;
  Interval epsilon;
  Interval mu_q_distance;       // ||mu q||
  Interval m_gamma_q_distance;  // M ||gamma q||
  Interval w_bound;             // log(A q / epsilon) / log B
  std::vector<BakerDavenportAttempt> tried;
};

/// Scans convergents of gamma with q > 6M in order and stops at the first
/// with a certified epsilon > 0. On failure every tried q is listed.
inline BakerDavenportResult baker_davenport(const ReductionProblem& rp, const ContinuedFraction& cf,
                                            std::size_t max_tries = 0) {
  rp.validate();
  auto start = first_q_above(cf, rp.M * 6);
  if (!start) throw InsufficientExpansionError("no certified convergent with q > 6M");
  BakerDavenportResult res;
  const Bits bits = std::max({rp.gamma.prec(), rp.mu.prec(), rp.A.prec()});
  const Interval M = Interval::from_z(rp.M, bits);
  for (std::size_t i = *start; i < cf.size(); ++i) {
    if (max_tries > 0 && res.tried.size() >= max_tries) break;
    const Interval q = Interval::from_z(cf.q[i], bits);
    Interval mu_dist = dist_to_nearest_int(rp.mu * q);
    Interval gamma_dist = M * dist_to_nearest_int(rp.gamma * q);
    Interval eps = mu_dist - gamma_dist;
    res.tried.push_back({i, cf.q[i], eps});
    if (eps.is_positive()) {
      res.success = true;
      res.index = i;
      res.q = cf.q[i];
      res.epsilon = eps;
      res.mu_q_distance = mu_dist;
      res.m_gamma_q_distance = gamma_dist;
      res.w_bound = log(rp.A * q / eps) / log(rp.B);
      return res;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Legendre

struct LegendreBound {
  std::size_t N = 0;   // index with q_N > M
  mpz_class a_max;     // max(a_0, ..., a_N)

  /// 1 / ((a_max + 2) m), a lower bound for |m tau - n| when 0 < m < M.
  Interval lower_bound(const mpz_class& m, Bits bits = kDefaultBits) const {
    return Interval::exact(1, bits) / (Interval::from_z(a_max + 2, bits) * Interval::from_z(m, bits));
  }
};

inline LegendreBound legendre_bound(const ContinuedFraction& cf, const mpz_class& M) {
  auto n = first_q_above(cf, M);
  if (!n) throw InsufficientExpansionError("no certified convergent with q > M");
  return LegendreBound{*n, max_quotient(cf, *n)};
}

}  // namespace klucas
