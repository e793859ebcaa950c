#pragma once

// Certified enclosures of the dominant root alpha(k) of
//   Psi_k(x) = x^k - x^(k-1) - ... - x - 1,
// the constant f_k(alpha), the dominant-root estimate of L_n^(k), and
// logarithmic heights of the numbers entering the linear forms.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "klucas/error.hpp"
#include "klucas/mp.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

inline constexpr long kDefaultPrecision = 1000;  // decimal digits
inline constexpr long kMinPrecision = 50;

/// Immutable after construction; safe to share between threads.
struct RootContext {
  int k = 0;
  long precision = 0;  // decimal digits requested
  Interval alpha;
  Interval fk_alpha;
  Interval log_alpha;

  Bits bits() const { return alpha.prec(); }
};

/// Psi_k(x) by Horner's rule with its integer coefficients (1, -1, ..., -1).
inline Interval psi_horner(int k, const Interval& x) {
  Interval acc = Interval::exact(1, x.prec());
  for (int i = 0; i < k; ++i) acc = acc * x - 1;
  return acc;
}

/// (x - 1) Psi_k(x) = x^k (x - 2) + 1, same sign as Psi_k for x > 1 and O(log k) to evaluate.
inline Interval psi_shifted(int k, const Interval& x) { return pow(x, k) * (x - 2) + 1; }

/// f_k(x) = (x - 1) / (2 + (k + 1)(x - 2)) on an enclosure.
inline Interval fk_of(int k, const Interval& x) { return (x - 1) / ((x - 2) * (k + 1) + 2); }

namespace detail {

inline Interval point(const Real& v) { return Interval::from_reals(v, v); }

/// f_k is decreasing where its denominator is positive, which holds on the
/// certified bracket of alpha; evaluate at the endpoints for a tight enclosure.
inline Interval fk_monotone(int k, const Interval& alpha) {
  Interval at_hi = fk_of(k, point(alpha.upper()));
  Interval at_lo = fk_of(k, point(alpha.lower()));
  return Interval::from_reals(at_hi.lower(), at_lo.upper());
}

/// 2(1 - 2^-k), exact when bits > k + 2.
inline Interval alpha_lower_bound(int k, Bits bits) {
  Interval two = Interval::exact(2, bits);
  Interval tiny(bits);
  mpfr_set_ui_2exp(tiny.lo_ptr(), 1, -static_cast<mpfr_exp_t>(k) + 1, MPFR_RNDD);
  mpfr_set_ui_2exp(tiny.hi_ptr(), 1, -static_cast<mpfr_exp_t>(k) + 1, MPFR_RNDU);
  return two - tiny;
}

}  // namespace detail

/// Certified enclosure of alpha(k) at `precision` decimal digits.
///
/// Newton iteration on x^k (x - 2) + 1 from x = 2 (the function is convex and
/// increasing on the bracket [2(1 - 2^-k), 2], so the iterates decrease
/// monotonically onto the root), then certification by a strict sign change
/// at both endpoints. Working precision is at least k + 128 bits so the
/// bracket invariant 2(1 - 2^-k) < alpha can always be decided.
inline RootContext make_root_context(int k, long precision = kDefaultPrecision) {
  if (k < 2) throw DomainError("order k must be at least 2");
  if (precision < kMinPrecision) {
    throw DomainError("precision must be at least " + std::to_string(kMinPrecision) + " digits");
  }
  const Bits bits = std::max<Bits>(digits_to_bits(precision) + 64, static_cast<Bits>(k) + 128);

  Real x(bits), g(bits), gp(bits), t(bits), step(bits);
  mpfr_set_ui(x.get(), 2, MPFR_RNDN);
  for (int iter = 0; iter < 100000; ++iter) {
    // g = x^k (x - 2) + 1,  g' = x^(k-1) ((k + 1) x - 2k)
    mpfr_pow_ui(t.get(), x.get(), static_cast<unsigned long>(k - 1), MPFR_RNDN);
    mpfr_mul_ui(gp.get(), x.get(), static_cast<unsigned long>(k + 1), MPFR_RNDN);
    mpfr_sub_ui(gp.get(), gp.get(), 2UL * static_cast<unsigned long>(k), MPFR_RNDN);
    mpfr_mul(gp.get(), gp.get(), t.get(), MPFR_RNDN);
    mpfr_mul(t.get(), t.get(), x.get(), MPFR_RNDN);
    mpfr_sub_ui(g.get(), x.get(), 2, MPFR_RNDN);
    mpfr_mul(g.get(), g.get(), t.get(), MPFR_RNDN);
    mpfr_add_ui(g.get(), g.get(), 1, MPFR_RNDN);
    mpfr_div(step.get(), g.get(), gp.get(), MPFR_RNDN);
    if (mpfr_sgn(step.get()) <= 0) break;
    mpfr_sub(x.get(), x.get(), step.get(), MPFR_RNDN);
    if (mpfr_zero_p(step.get()) || mpfr_get_exp(step.get()) < -static_cast<mpfr_exp_t>(bits) + 4) break;
  }

  // Allowed enclosure width: 10^(10 - precision).
  Interval allowed = pow(Interval::exact(10, bits), 10 - precision);
  Real gap(bits);
  mpfr_set_ui_2exp(gap.get(), 1, -static_cast<mpfr_exp_t>(bits) + 24, MPFR_RNDN);
  for (;;) {
    Real lo(bits), hi(bits);
    mpfr_sub(lo.get(), x.get(), gap.get(), MPFR_RNDD);
    mpfr_add(hi.get(), x.get(), gap.get(), MPFR_RNDU);
    Interval enclosure = Interval::from_reals(lo, hi);
    if (!certainly_le(Interval::from_reals(enclosure.width(), enclosure.width()), allowed)) {
      throw RefinementError("could not certify alpha(" + std::to_string(k) + ") at " +
                            std::to_string(precision) + " digits");
    }
    bool below = psi_shifted(k, detail::point(lo)).is_negative();
    bool above = psi_shifted(k, detail::point(hi)).is_positive();
    if (below && above) {
      RootContext rc;
      rc.k = k;
      rc.precision = precision;
      rc.alpha = enclosure;
      if (!certainly_less(detail::alpha_lower_bound(k, bits), rc.alpha) ||
          !certainly_less(rc.alpha, Interval::exact(2, bits))) {
        throw ConsistencyError("alpha(" + std::to_string(k) + ") enclosure violates 2(1-2^-k) < alpha < 2");
      }
      rc.fk_alpha = detail::fk_monotone(k, rc.alpha);
      Interval half = Interval::from_q(mpq_class(1, 2), bits);
      Interval three_quarters = Interval::from_q(mpq_class(3, 4), bits);
      if (!certainly_less(half, rc.fk_alpha) || !certainly_less(rc.fk_alpha, three_quarters)) {
        throw ConsistencyError("f_k(alpha) enclosure not inside (1/2, 3/4)");
      }
      rc.log_alpha = log(rc.alpha);
      return rc;
    }
    mpfr_mul_2ui(gap.get(), gap.get(), 4, MPFR_RNDU);
  }
}

/// Same root at a higher precision, intersected with the coarser enclosure so
/// refinement is monotone.
inline RootContext refine(const RootContext& rc, long precision) {
  RootContext fine = make_root_context(rc.k, precision);
  fine.alpha = intersect(fine.alpha, rc.alpha.with_prec(fine.bits()));
  fine.fk_alpha = detail::fk_monotone(rc.k, fine.alpha);
  fine.log_alpha = log(fine.alpha);
  return fine;
}

inline const Interval& fk_value(const RootContext& rc) { return rc.fk_alpha; }

/// Dominant-root estimate  L_n = f_k(alpha)(2 alpha - 1) alpha^(n-1) + e_k(n).
struct BinetEstimate {
  long n = 0;
  Interval value;
  Interval residual;  // L_n - value, i.e. e_k(n)
};

inline Interval binet_value(const RootContext& rc, long n) {
  return rc.fk_alpha * (rc.alpha * 2 - 1) * pow(rc.alpha, n - 1);
}

/// Cap on automatic precision escalation, as a multiple of the starting precision.
inline constexpr long kEscalationFactor = 4;

inline BinetEstimate binet_estimate(const RootContext& rc, KLucasContext& ctx, long n) {
  if (ctx.order() != rc.k) throw DomainError("root and sequence contexts have different k");
  const mpz_class& exact = ctx.term(n);
  const Interval bound = Interval::from_q(mpq_class(3, 2));
  RootContext work = rc;
  for (;;) {
    BinetEstimate est{n, binet_value(work, n), Interval()};
    est.residual = Interval::from_z(exact, work.bits()) - est.value;
    Decision d = decide_less(abs(est.residual), bound);
    if (d == Decision::kTrue) return est;
    if (d == Decision::kFalse) {
      throw ConsistencyError("|e_k(n)| >= 1.5 at k=" + std::to_string(rc.k) + ", n=" + std::to_string(n));
    }
    if (work.precision * 2 > rc.precision * kEscalationFactor) {
      throw RefinementError("binet residual undecided at k=" + std::to_string(rc.k) + ", n=" + std::to_string(n));
    }
    work = refine(work, work.precision * 2);
  }
}

/// Checks |f_k(a)(2a - 1)a^(n-1) - 3*2^(n-2)| < 3*2^(n-2) * 36 / 2^(k/2), valid when n < 2^(k/2).
inline bool sharp_estimate_check(const RootContext& rc, long n) {
  if (n >= 1) {
    mpz_class nn = mpz_class(n) * n;
    if (nn >= pow2z(static_cast<unsigned long>(rc.k))) {
      throw DomainError("sharp estimate needs n < 2^(k/2); got n=" + std::to_string(n) +
                        ", k=" + std::to_string(rc.k));
    }
  }
  RootContext work = rc;
  for (;;) {
    const Bits bits = work.bits();
    Interval power_term(bits);  // 3 * 2^(n-2), exact
    mpfr_set_ui_2exp(power_term.lo_ptr(), 3, n - 2, MPFR_RNDD);
    mpfr_set_ui_2exp(power_term.hi_ptr(), 3, n - 2, MPFR_RNDU);
    Interval half_power(bits);  // 2^(floor(k/2))
    mpfr_set_ui_2exp(half_power.lo_ptr(), 1, rc.k / 2, MPFR_RNDD);
    mpfr_set_ui_2exp(half_power.hi_ptr(), 1, rc.k / 2, MPFR_RNDU);
    if (rc.k % 2 == 1) half_power = half_power * sqrt(Interval::exact(2, bits));
    Interval lhs = abs(binet_value(work, n) - power_term);
    Interval rhs = power_term * 36 / half_power;
    Decision d = decide_less(lhs, rhs);
    if (d != Decision::kUndecided) return d == Decision::kTrue;
    if (work.precision * 2 > rc.precision * kEscalationFactor) {
      throw RefinementError("sharp estimate undecided at k=" + std::to_string(rc.k));
    }
    work = refine(work, work.precision * 2);
  }
}

/// h(r/s) = log max(|r|, s) for coprime r and s > 0.
inline Interval log_height_rational(const mpz_class& r, const mpz_class& s, Bits bits = kDefaultBits) {
  if (s <= 0) throw DomainError("denominator must be positive");
  mpz_class g;
  mpz_gcd(g.get_mpz_t(), r.get_mpz_t(), s.get_mpz_t());
  if (g != 1) throw DomainError("numerator and denominator must be coprime");
  mpz_class m = abs(r);
  if (s > m) m = s;
  return log(Interval::from_z(m, bits));
}

enum class HeightKind {
  kSum,      // theta +- part:    adds h(part) + log 2
  kProduct,  // theta * part^+-1: adds h(part)
  kPower,    // theta * part^s:   adds |s| h(part)
};

struct HeightPart {
  Interval height;
  HeightKind kind = HeightKind::kProduct;
  long exponent = 1;  // used by kPower
};

/// Upper bound for the height of a number assembled left to right from `parts`,
/// starting from the number 1 (height 0).
inline Interval height_bound_combine(const std::vector<HeightPart>& parts, Bits bits = kDefaultBits) {
  Interval acc = Interval::exact(0, bits);
  const Interval log2 = log_of(2, bits);
  for (const auto& part : parts) {
    switch (part.kind) {
      case HeightKind::kSum:
        acc = acc + part.height + log2;
        break;
      case HeightKind::kProduct:
        acc = acc + part.height;
        break;
      case HeightKind::kPower:
        acc = acc + part.height * std::labs(part.exponent);
        break;
    }
  }
  return acc;
}

}  // namespace klucas
