#pragma once

// Reductions of the absolute bounds: the a_max dichotomy on log alpha / log 10
// (k small), LLL on the de Weger lattice A1, and for k > 500 the dichotomy on
// log 2 / log 10, the lattice A2 and Baker-Davenport on tau = log 10 / log 2.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "klucas/algebraic.hpp"
#include "klucas/cfrac.hpp"
#include "klucas/error.hpp"
#include "klucas/lattice.hpp"
#include "klucas/linforms.hpp"
#include "klucas/mp.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

// ---------------------------------------------------------------------------
// continued fractions of the constants involved

/// log alpha(k) / log 10 at any precision.
inline RealFn log_alpha_over_log10(int k) {
  return [k](Bits bits) {
    RootContext rc = make_root_context(k, std::max<long>(kMinPrecision, bits_to_digits(bits) + 10));
    Bits b = std::max(bits, rc.bits());
    return rc.log_alpha.with_prec(b) / log_of(10, b);
  };
}

inline RealFn log2_over_log10() {
  return [](Bits bits) { return log_of(2, bits) / log_of(10, bits); };
}

inline RealFn log10_over_log2() {
  return [](Bits bits) { return log_of(10, bits) / log_of(2, bits); };
}

/// Expansion reaching a convergent with q > bound.
inline ContinuedFraction cf_until_q_above(const RealFn& x, const mpz_class& bound, int attempts = 4) {
  std::size_t count = mpz_sizeinbase(bound.get_mpz_t(), 2) + 16;
  for (int a = 0; a < attempts; ++a, count *= 2) {
    ContinuedFraction cf = cf_expand_partial(x(cf_bits_for(count)), count);
    if (first_q_above(cf, bound)) return cf;
  }
  throw InsufficientExpansionError("no certified convergent with q > " + bound.get_str());
}

// ---------------------------------------------------------------------------
// k small: |log alpha / log 10 - d/(n-m)| < 106 / (alpha^(n-p) (n-m) log 10)

struct AmaxReduction {
  long k = 0;
  Interval n_bound;        // N: n - m <= n - 1 < N
  std::size_t index = 0;   // first i with q_i > N
  mpz_class a_max;         // max(a_0, ..., a_index)
  Interval legendre_side;  // n - p < this when d/(n-m) is a convergent
  Interval plain_side;     // n - p < this otherwise
  long threshold = 0;      // n - p < threshold unless alpha^(n-p) >= 210
  long np_max = 0;         // n - p <= np_max
};

/// Both branches: the Legendre side alpha^(n-p) < 106 (a_max + 2) N / log 10,
/// the other alpha^(n-p) <= 212 N / log 10. Below alpha^(n-p) = 210 the
/// constant 106 is not available and n - p is bounded directly.
inline AmaxReduction cf_amax_reduction(long k, const Interval& n_bound) {
  if (k < 3) throw DomainError("order must be at least 3");
  AmaxReduction r;
  r.k = k;
  r.n_bound = n_bound;
  mpz_class N = ceil_upper(n_bound);
  ContinuedFraction cf = cf_until_q_above(log_alpha_over_log10(static_cast<int>(k)), N);
  r.index = *first_q_above(cf, N);
  r.a_max = max_quotient(cf, r.index);

  const Bits bits = kBoundBits;
  RootContext rc = make_root_context(static_cast<int>(k), 60);
  Interval la = rc.log_alpha.with_prec(bits);
  Interval log10 = log_of(10, bits);
  Interval Nq = Interval::from_z(N, bits);
  r.legendre_side = log(Interval::exact(106, bits) * Interval::from_z(r.a_max + 2, bits) * Nq / log10) / la;
  r.plain_side = log(Interval::exact(212, bits) * Nq / log10) / la;
  Interval t = log_of(210, bits) / la;
  r.threshold = ceil_upper(t).get_si();
  long a = ceil_upper(r.legendre_side).get_si() - 1;
  long b = ceil_upper(r.plain_side).get_si() - 1;
  r.np_max = std::max({a, b, r.threshold - 1});
  return r;
}

// ---------------------------------------------------------------------------
// k small: the lattice A1 for the linear form
//   (n-1) log alpha - d log 10 + log(f_k(alpha)(2 alpha - 1)(1 - alpha^-j) / L_m),  j = n - p

struct A1Instance {
  long k = 0, j = 0, m = 0;
  LatticeInstance lattice;
  IntBasis reduced;
  LemmaRedResult red;
  Interval S, T, X;
  bool applicable = false;
  std::string reason;
  Interval H;  // n - 1 <= H when applicable
};

namespace detail {

/// Per-k constants shared by all A1 lattices at one C.
struct A1Context {
  long k;
  mpz_class C;
  Bits bits;
  Interval log_alpha, minus_log10, log_fk_2a;  // log(f_k(alpha)(2 alpha - 1))
  Interval alpha;
  mpz_class floor_alpha, floor_10;

  A1Context(long k_in, const mpz_class& C_in) : k(k_in), C(C_in) {
    bits = static_cast<Bits>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 192;
    RootContext rc = make_root_context(static_cast<int>(k), std::max<long>(kMinPrecision, bits_to_digits(bits) + 20));
    bits = std::max(bits, rc.bits());
    alpha = rc.alpha.with_prec(bits);
    log_alpha = rc.log_alpha.with_prec(bits);
    minus_log10 = -log_of(10, bits);
    log_fk_2a = log(rc.fk_alpha.with_prec(bits) * (2 * alpha - 1));
    Interval Ci = Interval::from_z(C, bits);
    auto fa = certified_floor(Ci * log_alpha);
    auto ft = certified_floor(Ci * minus_log10);
    if (!fa || !ft) throw CertificationError("floor(C log alpha) ambiguous", 0);
    floor_alpha = *fa;
    floor_10 = *ft;
  }

  Interval eta3(long j, const mpz_class& L_m) const {
    return log_fk_2a + log(1 - pow(alpha, -j)) - log(Interval::from_z(L_m, bits));
  }
};

inline A1Instance a1_solve(const A1Context& ctx, long j, long m, const mpz_class& L_m, const Interval& X) {
  A1Instance inst;
  inst.k = ctx.k;
  inst.j = j;
  inst.m = m;
  inst.X = X;
  Interval e3 = ctx.eta3(j, L_m);
  auto f3 = certified_floor(Interval::from_z(ctx.C, ctx.bits) * e3);
  if (!f3) throw CertificationError("floor(C eta_0) ambiguous", 0);
  LatticeInstance& L = inst.lattice;
  L.C = ctx.C;
  L.eta = {ctx.log_alpha, ctx.minus_log10, e3};
  L.floors = {ctx.floor_alpha, ctx.floor_10, *f3};
  L.basis = {{1, 0, ctx.floor_alpha}, {0, 1, ctx.floor_10}, {0, 0, *f3}};
  inst.reduced = lll_reduce(L.basis).basis;
  inst.red = lemma_red(inst.reduced, IntVector(3, 0), kBoundBits);
  // x = (n - 1, d, 1): S = X1^2 + X2^2, T = (1 + X1 + X2 + X3) / 2 with X3 = 1.
  inst.S = 2 * X * X;
  inst.T = (X * 2 + 2) / 2;
  try {
    inst.H = lemma_blue(inst.red.delta, inst.S, inst.T, Interval::from_z(ctx.C, kBoundBits),
                        Interval::exact(28, kBoundBits), ctx.log_alpha.with_prec(kBoundBits));
    inst.applicable = true;
  } catch (const InapplicableError& e) {
    inst.reason = e.what();
  }
  return inst;
}

}  // namespace detail

/// One A1 lattice, for the command line and tests.
inline A1Instance lll_a1_instance(long k, long j, long m, const mpz_class& C, const Interval& X) {
  if (k < 3 || j < 1 || m < 0) throw DomainError("need k >= 3, n - p >= 1, m >= 0");
  KLucasContext seq(static_cast<int>(k));
  detail::A1Context ctx(k, C);
  return detail::a1_solve(ctx, j, m, seq.term(m), X);
}

/// 10^(ceil(3 log10 N) + 6): large enough that delta^2 > T^2 + S typically.
inline mpz_class auto_lattice_constant(const Interval& N) {
  long e = ceil_upper(log(N) / log_of(10, N.prec()) * 3).get_si() + 6;
  return pow10(static_cast<unsigned long>(e));
}

struct A1Sweep {
  long k = 0;
  mpz_class C;          // constant that made every lattice applicable
  Interval X;           // coefficient bound
  long np_max = 0;
  long lattices = 0;
  long retries = 0;     // times C had to be enlarged
  Interval H_max;       // n - 1 <= H_max
  long worst_j = 0, worst_m = 0;
  Interval delta_min;
  long small_n = 0;     // n - 1 below this is outside the lattice argument
  long n_cap = 0;       // every solution with p > mp_bound has n <= n_cap
};

/// All (n - p, m) with 1 <= n - p <= np_max and 0 <= m <= n - p + 1 (from
/// m + p - 2 < n). C is enlarged by 10^10 whenever Lemma blue is inapplicable.
inline A1Sweep lll_a1_sweep(long k, const Interval& N, long np_max, mpz_class C = 0) {
  A1Sweep s;
  s.k = k;
  s.X = N;
  s.np_max = np_max;
  if (C <= 0) C = auto_lattice_constant(N);
  KLucasContext seq(static_cast<int>(k));
  std::vector<mpz_class> L;
  for (long m = 0; m <= np_max + 1; ++m) L.push_back(seq.term(m));
  for (int attempt = 0;; ++attempt) {
    detail::A1Context ctx(k, C);
    bool ok = true;
    s.lattices = 0;
    s.H_max = Interval::exact(0, kBoundBits);
    for (long j = 1; j <= np_max && ok; ++j) {
      for (long m = 0; m <= j + 1; ++m) {
        A1Instance inst = detail::a1_solve(ctx, j, m, L[static_cast<std::size_t>(m)], N);
        ++s.lattices;
        if (!inst.applicable) {
          ok = false;
          break;
        }
        if (s.lattices == 1 || certainly_less(inst.red.delta, s.delta_min)) s.delta_min = inst.red.delta;
        if (!certainly_le(inst.H, s.H_max)) {
          s.H_max = max(s.H_max, inst.H);
          s.worst_j = j;
          s.worst_m = m;
        }
      }
    }
    if (ok) break;
    if (attempt >= 4) throw InapplicableError("A1 lattice inapplicable after enlarging C four times");
    C *= pow10(10);
    ++s.retries;
  }
  s.C = C;
  RootContext rc = make_root_context(static_cast<int>(k), 60);
  // |Gamma_2| <= 1/3 needs alpha^(n-1) >= 54.
  s.small_n = ceil_upper(log_of(54, kBoundBits) / rc.log_alpha.with_prec(kBoundBits)).get_si();
  s.n_cap = std::max(floor_upper(s.H_max).get_si() + 1, s.small_n);
  return s;
}

// ---------------------------------------------------------------------------
// k > 500: |log 2 / log 10 - d/(n-m)| < 2 / ((n-m) 2^mu log 10), mu = min{k/2 - 7, n - p - 1}

struct DichotomyRound {
  Interval N;
  std::size_t index = 0;  // first i with q_i > N
  mpz_class a_max;
  Interval legendre_side;  // mu < this on the convergent branch
  Interval plain_side;     // mu < this otherwise
  Interval mu_bound;       // max of both and 2
  long k_max = 0;          // case mu = k/2 - 7: k <= k_max
  long np_max = 0;         // case mu = n - p - 1: n - p <= np_max
};

inline DichotomyRound gamma3_dichotomy(const Interval& N, const ContinuedFraction& cf) {
  DichotomyRound r;
  r.N = N;
  mpz_class Nz = ceil_upper(N);
  auto idx = first_q_above(cf, Nz);
  if (!idx) throw InsufficientExpansionError("log 2 / log 10 expansion too short for N = " + N.upper_str());
  r.index = *idx;
  r.a_max = max_quotient(cf, r.index);
  const Bits bits = kBoundBits;
  Interval log2 = log_of(2, bits), log10 = log_of(10, bits);
  Interval Nq = Interval::from_z(Nz, bits);
  r.legendre_side = log(2 * Interval::from_z(r.a_max + 2, bits) * Nq / log10) / log2;
  r.plain_side = log(4 * Nq / log10) / log2;
  r.mu_bound = max(max(r.legendre_side, r.plain_side), Interval::exact(2, bits));
  // k/2 - 7 < mu_bound and n - p - 1 < mu_bound.
  r.k_max = ceil_upper(2 * r.mu_bound + 14).get_si() - 1;
  r.np_max = ceil_upper(r.mu_bound + 1).get_si() - 1;
  return r;
}

struct A2Attempt {
  LatticeInstance lattice;
  IntBasis reduced;
  LemmaRedResult red;
  Interval S, T, X;
  bool applicable = false;
  std::string reason;
  Interval H;  // k/2 < H when applicable
};

/// The lattice with bottom row floor(C log 2), floor(C log(1/10)), floor(C log 2)
/// and y = 0, fed to Lemma red and Lemma blue with c3 = 108, c4 = log 2.
inline A2Attempt lll_a2_attempt(const mpz_class& C, const Interval& X) {
  A2Attempt a;
  a.X = X;
  Bits start = static_cast<Bits>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 128;
  RealFn l2 = [](Bits b) { return log_of(2, b); };
  RealFn l10 = [](Bits b) { return -log_of(10, b); };
  a.lattice = deweger_lattice(C, {l2, l10, l2}, start, 4);
  a.reduced = lll_reduce(a.lattice.basis).basis;
  a.red = lemma_red(a.reduced, IntVector(3, 0), kBoundBits);
  a.S = 2 * X * X;
  a.T = (X * 3 + 1) / 2;
  try {
    a.H = lemma_blue(a.red.delta, a.S, a.T, Interval::from_z(C, kBoundBits), Interval::exact(108, kBoundBits),
                     log_of(2, kBoundBits));
    a.applicable = true;
  } catch (const InapplicableError& e) {
    a.reason = e.what();
  }
  return a;
}

/// mu_j = -log(1 - 2^-j) / log 2.
inline Interval gamma4_mu(long j, Bits bits) {
  Interval two = Interval::exact(2, bits);
  return -log(1 - pow(two, -j)) / log(two);
}

struct BDEntry {
  long j = 0;
  bool legendre = false;    // mu_j is an integer (j = 1)
  BakerDavenportResult bd;  // when !legendre
  mpz_class a_max;          // when legendre
  Interval w_bound;         // k/2 < w_bound
};

struct BDRound {
  mpz_class M;
  long j_max = 0;
  std::vector<BDEntry> entries;
  Interval w_max;
  long worst_j = 0;
  Interval eps_max;  // over the successful Baker-Davenport entries
  std::size_t first_index = 0;
  long k_max = 0;    // k <= k_max
};

/// |d tau - (n - m) - mu_j| < (108 / log 2) 2^(-k/2) for j = n - p in [1, j_max], d < M.
inline BDRound gamma4_bd_round(const mpz_class& M, long j_max, const ContinuedFraction& cf_tau) {
  BDRound r;
  r.M = M;
  r.j_max = j_max;
  const Bits bits = cf_tau.value.prec();
  Interval log2 = log_of(2, bits);
  Interval A = Interval::exact(108, bits) / log2;
  Interval B = Interval::exact(2, bits);
  bool first = true;
  for (long j = 1; j <= j_max; ++j) {
    BDEntry e;
    e.j = j;
    if (j == 1) {
      // mu_1 = 1: |d tau - v| > 1/((a_M + 2) d) > 1/((a_M + 2) M).
      LegendreBound lb = legendre_bound(cf_tau, M);
      e.legendre = true;
      e.a_max = lb.a_max;
      e.w_bound = log(A * Interval::from_z((lb.a_max + 2) * M, bits)) / log2;
    } else {
      ReductionProblem rp{cf_tau.value, gamma4_mu(j, bits), A, B, M};
      e.bd = baker_davenport(rp, cf_tau);
      if (!e.bd.success) {
        throw InsufficientExpansionError("Baker-Davenport found no epsilon > 0 for n - p = " + std::to_string(j));
      }
      e.w_bound = e.bd.w_bound;
      r.eps_max = first ? e.bd.epsilon : max(r.eps_max, e.bd.epsilon);
      r.first_index = first ? e.bd.index : std::min(r.first_index, e.bd.index);
      first = false;
    }
    if (r.entries.empty() || !certainly_le(e.w_bound, r.w_max)) {
      r.w_max = r.entries.empty() ? e.w_bound : max(r.w_max, e.w_bound);
      r.worst_j = j;
    }
    r.entries.push_back(std::move(e));
  }
  // k/2 < w_max.
  r.k_max = ceil_upper(2 * r.w_max).get_si() - 1;
  return r;
}

}  // namespace klucas
