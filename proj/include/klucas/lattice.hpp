#pragma once

// Exact lattice tools: Gram-Schmidt over Q, integral LLL (Lovasz constant 3/4),
// the de Weger lattice of floor-scaled logarithms, and the two lemmas that turn
// a reduced basis into a lower bound for l(L, y) and then into a bound on H.
//
// A basis is a list of column vectors b_1, ..., b_n, all of length n.

#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <string>
#include <utility>
#include <vector>

#include "klucas/cfrac.hpp"
#include "klucas/error.hpp"
#include "klucas/mp.hpp"

namespace klucas {

using IntVector = std::vector<mpz_class>;
using IntBasis = std::vector<IntVector>;  // columns
using RatVector = std::vector<mpq_class>;

namespace detail {

inline void check_square(const IntBasis& b) {
  if (b.empty()) throw DomainError("empty basis");
  for (const auto& col : b) {
    if (col.size() != b.size()) throw DomainError("basis must be square (n columns of length n)");
  }
}

template <class V>
auto dot(const V& a, const V& b) {
  typename V::value_type s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

struct GramSchmidt {
  std::vector<RatVector> bstar;   // orthogonal vectors b*_i
  std::vector<RatVector> mu;      // mu[i][j] for j < i
  RatVector norm2;                // ||b*_i||^2
};

/// Exact Gram-Schmidt; throws RankError on dependent columns.
inline GramSchmidt gram_schmidt(const IntBasis& basis) {
  detail::check_square(basis);
  const std::size_t n = basis.size();
  GramSchmidt gs;
  gs.bstar.resize(n);
  gs.mu.assign(n, RatVector(n, 0));
  gs.norm2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    RatVector v(n);
    for (std::size_t r = 0; r < n; ++r) v[r] = basis[i][r];
    for (std::size_t j = 0; j < i; ++j) {
      mpq_class num = 0;
      for (std::size_t r = 0; r < n; ++r) num += mpq_class(basis[i][r]) * gs.bstar[j][r];
      mpq_class m = num / gs.norm2[j];
      gs.mu[i][j] = m;
      for (std::size_t r = 0; r < n; ++r) v[r] -= m * gs.bstar[j][r];
    }
    mpq_class nn = detail::dot(v, v);
    if (nn == 0) throw RankError("basis columns are linearly dependent");
    gs.bstar[i] = std::move(v);
    gs.norm2[i] = nn;
  }
  return gs;
}

/// Exact determinant (Bareiss fraction-free elimination).
inline mpz_class determinant(const IntBasis& basis) {
  detail::check_square(basis);
  const std::size_t n = basis.size();
  std::vector<IntVector> a(n, IntVector(n));
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) a[r][c] = basis[c][r];
  }
  int sign = 1;
  mpz_class prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      std::size_t s = k + 1;
      while (s < n && a[s][k] == 0) ++s;
      if (s == n) return 0;
      std::swap(a[k], a[s]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        mpz_class t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
      }
    }
    prev = a[k][k];
  }
  return sign * a[n - 1][n - 1];
}

/// Both LLL conditions, checked exactly: |mu_ij| <= 1/2 and
/// ||b*_i||^2 >= (3/4 - mu_{i,i-1}^2) ||b*_{i-1}||^2.
inline bool is_lll_reduced(const GramSchmidt& gs) {
  const std::size_t n = gs.norm2.size();
  const mpq_class half(1, 2), three_quarters(3, 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (abs(gs.mu[i][j]) > half) return false;
    }
    if (i > 0) {
      mpq_class m = gs.mu[i][i - 1];
      if (gs.norm2[i] < (three_quarters - m * m) * gs.norm2[i - 1]) return false;
    }
  }
  return true;
}

inline bool is_lll_reduced(const IntBasis& basis) { return is_lll_reduced(gram_schmidt(basis)); }

struct LLLResult {
  IntBasis basis;
  std::size_t swaps = 0;
};

/// Integral LLL with Lovasz constant 3/4; all arithmetic in integers.
inline LLLResult lll_reduce(IntBasis b) {
  detail::check_square(b);
  const std::size_t n = b.size();
  LLLResult res;
  // 1-based bookkeeping: d[0] = 1, d[i] = Gram determinant of b_1..b_i,
  // lambda[i][j] = d[j] * mu_ij.
  std::vector<mpz_class> d(n + 1, 0);
  std::vector<std::vector<mpz_class>> lambda(n + 1, std::vector<mpz_class>(n + 1, 0));
  auto col = [&](std::size_t i) -> IntVector& { return b[i - 1]; };
  d[0] = 1;
  d[1] = detail::dot(col(1), col(1));
  if (d[1] == 0) throw RankError("basis columns are linearly dependent");
  if (n == 1) {
    res.basis = std::move(b);
    return res;
  }

  mpz_class q, num, den, t, lhs, rhs, big_b, l;
  auto red = [&](std::size_t k, std::size_t l) {
    mpz_mul_2exp(num.get_mpz_t(), lambda[k][l].get_mpz_t(), 1);
    if (mpz_cmpabs(num.get_mpz_t(), d[l].get_mpz_t()) <= 0) return;
    // q = nearest integer to lambda / d_l
    mpz_add(num.get_mpz_t(), num.get_mpz_t(), d[l].get_mpz_t());
    mpz_mul_2exp(den.get_mpz_t(), d[l].get_mpz_t(), 1);
    mpz_fdiv_q(q.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    for (std::size_t r = 0; r < n; ++r) mpz_submul(col(k)[r].get_mpz_t(), q.get_mpz_t(), col(l)[r].get_mpz_t());
    mpz_submul(lambda[k][l].get_mpz_t(), q.get_mpz_t(), d[l].get_mpz_t());
    for (std::size_t i = 1; i < l; ++i) mpz_submul(lambda[k][i].get_mpz_t(), q.get_mpz_t(), lambda[l][i].get_mpz_t());
  };

  std::size_t k = 2, kmax = 1;
  while (k <= n) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 1; j <= k; ++j) {
        mpz_class u = detail::dot(col(k), col(j));
        for (std::size_t i = 1; i < j; ++i) {
          t = d[i] * u - lambda[k][i] * lambda[j][i];
          mpz_divexact(u.get_mpz_t(), t.get_mpz_t(), d[i - 1].get_mpz_t());
        }
        if (j < k) {
          lambda[k][j] = u;
        } else {
          d[k] = u;
          if (d[k] == 0) throw RankError("basis columns are linearly dependent");
        }
      }
    }
    red(k, k - 1);
    // Lovasz test: 4 d_k d_{k-2} < 3 d_{k-1}^2 - 4 lambda^2
    mpz_mul(lhs.get_mpz_t(), d[k].get_mpz_t(), d[k - 2].get_mpz_t());
    mpz_mul_2exp(lhs.get_mpz_t(), lhs.get_mpz_t(), 2);
    mpz_mul(rhs.get_mpz_t(), d[k - 1].get_mpz_t(), d[k - 1].get_mpz_t());
    mpz_mul_ui(rhs.get_mpz_t(), rhs.get_mpz_t(), 3);
    mpz_mul(t.get_mpz_t(), lambda[k][k - 1].get_mpz_t(), lambda[k][k - 1].get_mpz_t());
    mpz_submul_ui(rhs.get_mpz_t(), t.get_mpz_t(), 4);
    if (mpz_cmp(lhs.get_mpz_t(), rhs.get_mpz_t()) < 0) {
      // SWAP(k)
      std::swap(col(k), col(k - 1));
      for (std::size_t j = 1; j + 2 <= k; ++j) std::swap(lambda[k][j], lambda[k - 1][j]);
      l = lambda[k][k - 1];
      mpz_mul(big_b.get_mpz_t(), d[k - 2].get_mpz_t(), d[k].get_mpz_t());
      mpz_addmul(big_b.get_mpz_t(), l.get_mpz_t(), l.get_mpz_t());
      mpz_divexact(big_b.get_mpz_t(), big_b.get_mpz_t(), d[k - 1].get_mpz_t());
      for (std::size_t i = k + 1; i <= kmax; ++i) {
        t = lambda[i][k];
        mpz_mul(num.get_mpz_t(), d[k].get_mpz_t(), lambda[i][k - 1].get_mpz_t());
        mpz_submul(num.get_mpz_t(), l.get_mpz_t(), t.get_mpz_t());
        mpz_divexact(lambda[i][k].get_mpz_t(), num.get_mpz_t(), d[k - 1].get_mpz_t());
        mpz_mul(num.get_mpz_t(), big_b.get_mpz_t(), t.get_mpz_t());
        mpz_addmul(num.get_mpz_t(), l.get_mpz_t(), lambda[i][k].get_mpz_t());
        mpz_divexact(lambda[i][k - 1].get_mpz_t(), num.get_mpz_t(), d[k].get_mpz_t());
      }
      d[k - 1] = big_b;
      ++res.swaps;
      if (k > 2) --k;
    } else {
      for (std::size_t l = k - 1; l-- > 1;) red(k, l);
      ++k;
    }
  }
  res.basis = std::move(b);
  return res;
}

/// Lattice spanned by the columns of
///   [ 1 0 ... 0 0 ; 0 1 ... 0 0 ; ... ; floor(C eta_1) ... floor(C eta_k) ].
struct LatticeInstance {
  IntBasis basis;
  mpz_class C;
  std::vector<Interval> eta;       // eta_1 .. eta_k as used
  std::vector<mpz_class> floors;   // floor(C eta_i)
};

namespace detail {

inline mpz_class certified_scaled_floor(const mpz_class& C, const RealFn& eta, Bits start, int cap_factor,
                                        Interval* used) {
  for (Bits bits = start; bits <= start * cap_factor; bits *= 2) {
    Interval v = eta(bits);
    auto f = certified_floor(v * Interval::from_z(C, bits));
    if (f) {
      if (used) *used = v;
      return *f;
    }
  }
  throw CertificationError("floor(C * eta) ambiguous at the precision cap");
}

}  // namespace detail

/// Builds the lattice, certifying each floor(C eta_i) (precision doubles up to `cap_factor`).
inline LatticeInstance deweger_lattice(const mpz_class& C, const std::vector<RealFn>& eta, Bits start = 0,
                                       int cap_factor = 4) {
  if (eta.empty()) throw DomainError("need at least one eta");
  if (C <= 0) throw DomainError("C must be positive");
  if (start <= 0) start = static_cast<Bits>(mpz_sizeinbase(C.get_mpz_t(), 2)) + 128;
  const std::size_t k = eta.size();
  LatticeInstance inst;
  inst.C = C;
  inst.eta.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    inst.floors.push_back(detail::certified_scaled_floor(C, eta[i], start, cap_factor, &inst.eta[i]));
  }
  inst.basis.assign(k, IntVector(k, 0));
  for (std::size_t j = 0; j < k; ++j) {
    if (j + 1 < k) inst.basis[j][j] = 1;
    inst.basis[j][k - 1] = inst.floors[j];
  }
  return inst;
}

inline LatticeInstance deweger_lattice(const mpz_class& C, const std::vector<Interval>& eta) {
  std::vector<RealFn> fns;
  for (const auto& e : eta) fns.push_back([e](Bits) { return e; });
  return deweger_lattice(C, fns, eta.front().prec(), 1);
}

/// Exact solution z of B z = y.
inline RatVector solve(const IntBasis& basis, const IntVector& y) {
  detail::check_square(basis);
  const std::size_t n = basis.size();
  if (y.size() != n) throw DomainError("target has the wrong dimension");
  std::vector<RatVector> a(n, RatVector(n + 1));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) a[r][c] = basis[c][r];
    a[r][n] = y[r];
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] == 0) ++piv;
    if (piv == n) throw RankError("basis columns are linearly dependent");
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      mpq_class f = a[r][c] / a[c][c];
      for (std::size_t j = c; j <= n; ++j) a[r][j] -= f * a[c][j];
    }
  }
  RatVector z(n);
  for (std::size_t i = 0; i < n; ++i) z[i] = a[i][n] / a[i][i];
  return z;
}

struct LemmaRedResult {
  bool y_in_lattice = false;
  std::size_t i0 = 0;   // 1-based index used for lambda (0 when y is in L)
  mpq_class lambda;     // distance of z_i0 to the nearest integer, or 1
  Interval c1;          // max_j ||b_1|| / ||b*_j||
  Interval delta;       // lambda ||b_1|| / c1, a lower bound for l(L, y)
  mpq_class delta_squared;  // lambda^2 min_j ||b*_j||^2, exact
  Interval b1_norm;
};

/// Lower bound l(L, y) >= delta from a reduced basis. i0 is the largest index
/// with z_i0 not an integer, lambda its distance to the nearest integer.
inline LemmaRedResult lemma_red(const IntBasis& reduced, const IntVector& y, Bits bits = kDefaultBits) {
  GramSchmidt gs = gram_schmidt(reduced);
  if (!is_lll_reduced(gs)) throw PreconditionError("basis is not LLL-reduced");
  bool zero = std::all_of(y.begin(), y.end(), [](const mpz_class& v) { return v == 0; });
  RatVector z = zero ? RatVector(y.size(), 0) : solve(reduced, y);
  LemmaRedResult res;
  res.y_in_lattice = true;
  for (std::size_t i = z.size(); i-- > 0;) {
    if (z[i].get_den() != 1) {
      res.y_in_lattice = false;
      res.i0 = i + 1;
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), z[i].get_num_mpz_t(), z[i].get_den_mpz_t());
      mpq_class frac = z[i] - fl;
      res.lambda = frac <= mpq_class(1, 2) ? frac : mpq_class(1) - frac;
      break;
    }
  }
  if (res.y_in_lattice) res.lambda = 1;

  res.b1_norm = sqrt(Interval::from_q(gs.norm2[0], bits));
  Interval c1 = Interval::exact(1, bits);
  Interval min_bstar = res.b1_norm;
  for (const auto& nn : gs.norm2) {
    Interval norm = sqrt(Interval::from_q(nn, bits));
    c1 = max(c1, res.b1_norm / norm);
    min_bstar = min(min_bstar, norm);
  }
  res.c1 = c1;
  res.delta_squared = res.lambda * res.lambda * *std::min_element(gs.norm2.begin(), gs.norm2.end());
  res.delta = Interval::from_q(res.lambda, bits) * min_bstar;
  return res;
}

/// H <= (log(C c3) - log(sqrt(delta^2 - S) - T)) / c4, valid when delta^2 > T^2 + S.
inline Interval lemma_blue(const Interval& delta, const Interval& S, const Interval& T, const Interval& C,
                           const Interval& c3, const Interval& c4) {
  Interval slack = delta * delta - S;
  if (!slack.is_positive()) throw InapplicableError("delta^2 <= S; enlarge C");
  Interval gap = sqrt(slack) - T;
  if (!gap.is_positive()) throw InapplicableError("delta^2 < T^2 + S (or undecided); enlarge C");
  return (log(C * c3) - log(gap)) / c4;
}

}  // namespace klucas
