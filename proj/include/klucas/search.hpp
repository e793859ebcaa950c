#pragma once

// Exhaustive searches for L_n = L_m * 10^d + L_p.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "klucas/digits.hpp"
#include "klucas/error.hpp"
#include "klucas/parallel.hpp"
#include "klucas/sequence.hpp"

namespace klucas {

struct SolutionRecord {
  int k = 0;
  long n = 0, m = 0, p = 0, d = 0;
  mpz_class l_n, l_m, l_p;

  auto key() const { return std::tuple(k, n, m, p); }
  friend bool operator<(const SolutionRecord& a, const SolutionRecord& b) { return a.key() < b.key(); }
  friend bool operator==(const SolutionRecord& a, const SolutionRecord& b) {
    return a.key() == b.key() && a.d == b.d && a.l_n == b.l_n && a.l_m == b.l_m && a.l_p == b.l_p;
  }
};

struct SearchFilters {
  bool digit_count = true;  // digits(L_n) == digits(L_m) + digits(L_p)
  bool modular = true;      // residue test modulo 2^61 - 1
};

struct SearchSpec {
  int k_min = 3;
  int k_max = 50;
  long mp_bound = 500;          // 0 <= m, p <= mp_bound
  bool enforce_window = true;   // m + p - 2 < n < m + p + 8
  bool require_n_gt_k = false;
  long n_min = 4;
  long n_max = 0;               // 0: no cap beyond the window (or 2 mp_bound + 8 without it)
  SearchFilters filters;

  void validate() const {
    if (k_min < 2 || k_max < k_min) throw DomainError("bad k range");
    if (mp_bound < 0) throw DomainError("mp bound must be non-negative");
    if (n_max < 0) throw DomainError("n cap must be non-negative");
  }
};

struct SearchStats {
  std::uint64_t candidates = 0;
  std::uint64_t pruned_digits = 0;
  std::uint64_t pruned_modular = 0;
  std::uint64_t exact_checks = 0;

  SearchStats& operator+=(const SearchStats& o) {
    candidates += o.candidates;
    pruned_digits += o.pruned_digits;
    pruned_modular += o.pruned_modular;
    exact_checks += o.exact_checks;
    return *this;
  }
};

inline SolutionRecord make_solution(KLucasContext& ctx, long n, long m, long p) {
  SolutionRecord r;
  r.k = ctx.order();
  r.n = n;
  r.m = m;
  r.p = p;
  r.l_n = ctx.term(n);
  r.l_m = ctx.term(m);
  r.l_p = ctx.term(p);
  r.d = num_digits(r.l_p);
  return r;
}

namespace detail {

inline constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

inline std::uint64_t mulmod61(std::uint64_t a, std::uint64_t b) {
  unsigned __int128 t = static_cast<unsigned __int128>(a) * b;
  std::uint64_t lo = static_cast<std::uint64_t>(t & kMersenne61);
  std::uint64_t hi = static_cast<std::uint64_t>(t >> 61);
  std::uint64_t s = lo + hi;
  return s >= kMersenne61 ? s - kMersenne61 : s;
}

inline std::uint64_t addmod61(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a + b;
  return s >= kMersenne61 ? s - kMersenne61 : s;
}

inline std::uint64_t mod61(const mpz_class& x) {
  return mpz_fdiv_ui(x.get_mpz_t(), kMersenne61);
}

}  // namespace detail

/// All solutions for a single order k under `spec` (k range ignored).
inline std::vector<SolutionRecord> search_k(int k, const SearchSpec& spec, SearchStats* stats = nullptr) {
  KLucasContext ctx(k);
  const long n_hi_limit = spec.n_max > 0 ? spec.n_max : 2 * spec.mp_bound + 8;
  const long top = std::max(n_hi_limit, spec.mp_bound);
  ctx.extend_to(top);

  std::vector<long> digits(static_cast<std::size_t>(top + 1));
  std::vector<std::uint64_t> residues(static_cast<std::size_t>(top + 1));
  long max_digits = 1;
  for (long i = 0; i <= top; ++i) {
    digits[i] = num_digits(ctx.term(i));
    residues[i] = detail::mod61(ctx.term(i));
    max_digits = std::max(max_digits, digits[i]);
  }
  std::vector<std::uint64_t> pow10_mod(static_cast<std::size_t>(max_digits + 1));
  pow10_mod[0] = 1;
  for (long i = 1; i <= max_digits; ++i) pow10_mod[i] = detail::mulmod61(pow10_mod[i - 1], 10);

  long n_floor = std::max(spec.n_min, 2L);
  if (spec.require_n_gt_k) n_floor = std::max<long>(n_floor, k + 1);

  SearchStats local;
  std::vector<SolutionRecord> out;
  for (long m = 0; m <= spec.mp_bound; ++m) {
    for (long p = 0; p <= spec.mp_bound; ++p) {
      long lo = n_floor, hi = n_hi_limit;
      if (spec.enforce_window) {
        auto [wlo, whi] = index_window(m, p);
        lo = std::max(lo, wlo + 1);
        hi = std::min(hi, whi - 1);
      }
      const long d = digits[p];
      for (long n = lo; n <= hi; ++n) {
        ++local.candidates;
        if (spec.filters.digit_count && digits[n] != digits[m] + d) {
          ++local.pruned_digits;
          continue;
        }
        if (spec.filters.modular &&
            residues[n] != detail::addmod61(detail::mulmod61(residues[m], pow10_mod[d]), residues[p])) {
          ++local.pruned_modular;
          continue;
        }
        ++local.exact_checks;
        if (is_concatenation(ctx, n, m, p)) out.push_back(make_solution(ctx, n, m, p));
      }
    }
  }
  if (stats) *stats += local;
  std::sort(out.begin(), out.end());
  return out;
}

/// Every (k, n, m, p) in range with L_n = L_m * 10^d + L_p, sorted by (k, n, m, p).
inline std::vector<SolutionRecord> search(const SearchSpec& spec, SearchStats* stats = nullptr) {
  spec.validate();
  const std::size_t count = static_cast<std::size_t>(spec.k_max - spec.k_min + 1);
  std::vector<std::vector<SolutionRecord>> per_k(count);
  std::vector<SearchStats> per_stats(count);
  parallel_for(count, [&](std::size_t i) {
    per_k[i] = search_k(spec.k_min + static_cast<int>(i), spec, &per_stats[i]);
  });
  std::vector<SolutionRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.insert(out.end(), per_k[i].begin(), per_k[i].end());
    if (stats) *stats += per_stats[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Solutions of 2^a - 1 = 5^d with 1 <= a <= a_max, 1 <= d <= d_max.
inline std::vector<std::pair<long, long>> verify_case_n_le_k(long a_max, long d_max) {
  if (a_max < 1 || d_max < 1) throw DomainError("bounds must be positive");
  std::vector<std::pair<long, long>> out;
  // 2^a - 1 is odd and 5^d grows monotonically, so walk both sides in step.
  mpz_class lhs = 1;  // 2^a - 1 at a = 1
  mpz_class rhs = 5;  // 5^d at d = 1
  long a = 1, d = 1;
  while (a <= a_max && d <= d_max) {
    if (lhs == rhs) {
      out.emplace_back(a, d);
      ++a;
      lhs = 2 * lhs + 1;
    } else if (lhs < rhs) {
      ++a;
      lhs = 2 * lhs + 1;
    } else {
      ++d;
      rhs *= 5;
    }
  }
  return out;
}

/// Number of (k, n, m, p) with 5 <= n <= k <= k_max, m, p >= 0 satisfying the equation.
inline long count_power_regime_solutions(int k_max) {
  long count = 0;
  for (int k = 5; k <= k_max; ++k) {
    KLucasContext ctx(k);
    for (long n = 5; n <= k; ++n) {
      for (long p = 0; p < n; ++p) {
        for (long m = 0; m < n; ++m) {
          if (is_concatenation(ctx, n, m, p)) ++count;
        }
      }
    }
  }
  return count;
}

struct VerifySpec {
  int k_min = 3;
  int k_max = 30;
  long n_min = 4;
  long n_max = 600;
  std::map<int, long> n_cap;   // per-k override of n_max
  bool require_n_gt_k = false;
  bool digit_bound_filter = true;

  long cap_for(int k) const {
    auto it = n_cap.find(k);
    return it == n_cap.end() ? n_max : it->second;
  }
};

struct VerifyReport {
  std::vector<SolutionRecord> solutions;
  std::uint64_t pairs = 0;             // (n, p) pairs visited
  std::uint64_t pruned_digit_bound = 0;
  std::uint64_t pruned_divisibility = 0;
  std::uint64_t pruned_lookup = 0;

  VerifyReport& operator+=(const VerifyReport& o) {
    solutions.insert(solutions.end(), o.solutions.begin(), o.solutions.end());
    pairs += o.pairs;
    pruned_digit_bound += o.pruned_digit_bound;
    pruned_divisibility += o.pruned_divisibility;
    pruned_lookup += o.pruned_lookup;
    return *this;
  }
};

/// Final verification for one order: for each n and p < n, recover L_m from
/// (L_n - L_p) / 10^d and look it up among L_0 .. L_(n-p+4).
inline VerifyReport verify_theorem_k(int k, const VerifySpec& spec) {
  VerifyReport rep;
  const long cap = spec.cap_for(k);
  long n_lo = std::max(spec.n_min, 2L);
  if (spec.require_n_gt_k) n_lo = std::max<long>(n_lo, k + 1);
  if (cap < n_lo) return rep;

  KLucasContext ctx(k);
  ctx.extend_to(cap + 5);
  const std::vector<mpz_class> terms = ctx.term_range(0, cap + 5);
  std::vector<long> digits(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) digits[i] = num_digits(terms[i]);

  // L_1 < L_2 < ... is strictly increasing; L_0 = 2 is the only other value.
  auto lookup = [&](const mpz_class& v, long m_max) -> long {
    if (v == 2) return 0;
    auto first = terms.begin() + 1;
    auto last = terms.begin() + std::min<long>(m_max, static_cast<long>(terms.size()) - 1) + 1;
    if (last <= first) return -1;
    auto it = std::lower_bound(first, last, v);
    if (it != last && *it == v) return static_cast<long>(it - terms.begin());
    return -1;
  };

  const unsigned long ten18 = 1000000000000000000UL;
  mpz_class diff, q, p10;
  for (long n = n_lo; n <= cap; ++n) {
    for (long p = 0; p < n; ++p) {
      ++rep.pairs;
      const long d = digits[p];
      if (spec.digit_bound_filter && (!digit_bounds_hold(p, d) || d >= digits[n])) {
        ++rep.pruned_digit_bound;
        continue;
      }
      if (terms[p] >= terms[n]) {
        ++rep.pruned_divisibility;
        continue;
      }
      diff = terms[n] - terms[p];
      unsigned long low = d >= 18 ? ten18 : static_cast<unsigned long>(pow10(static_cast<unsigned long>(d)).get_ui());
      if (mpz_fdiv_ui(diff.get_mpz_t(), low) != 0) {
        ++rep.pruned_divisibility;
        continue;
      }
      p10 = pow10(static_cast<unsigned long>(d));
      if (!mpz_divisible_p(diff.get_mpz_t(), p10.get_mpz_t())) {
        ++rep.pruned_divisibility;
        continue;
      }
      mpz_divexact(q.get_mpz_t(), diff.get_mpz_t(), p10.get_mpz_t());
      long m = lookup(q, n - p + 4);
      if (m < 0) {
        ++rep.pruned_lookup;
        continue;
      }
      rep.solutions.push_back(make_solution(ctx, n, m, p));
    }
  }
  return rep;
}

inline VerifyReport verify_theorem(const VerifySpec& spec) {
  if (spec.k_min < 2 || spec.k_max < spec.k_min) throw DomainError("bad k range");
  const std::size_t count = static_cast<std::size_t>(spec.k_max - spec.k_min + 1);
  std::vector<VerifyReport> parts(count);
  parallel_for(count, [&](std::size_t i) { parts[i] = verify_theorem_k(spec.k_min + static_cast<int>(i), spec); });
  VerifyReport total;
  for (auto& part : parts) total += part;
  std::sort(total.solutions.begin(), total.solutions.end());
  return total;
}

}  // namespace klucas
