#pragma once

// k-generalized Lucas numbers L_n^(k):
//   L_n = L_{n-1} + ... + L_{n-k}  (n >= 2),  L_0 = 2, L_1 = 1,
//   L_{2-k} = ... = L_{-1} = 0     (k >= 3).

#include <gmpxx.h>

#include <deque>
#include <string>
#include <vector>

#include "klucas/error.hpp"

namespace klucas {

/// Append-only cache of exact terms for one order k.
///
/// A context has a single writer; once filled to the needed index it may be
/// read concurrently. Searches keep one context per worker.
class KLucasContext {
 public:
  explicit KLucasContext(int k) : k_(k) {
    if (k < 2) throw DomainError("order k must be at least 2, got " + std::to_string(k));
    for (int i = 0; i < k - 2; ++i) terms_.emplace_back(0);
    terms_.emplace_back(2);
    terms_.emplace_back(1);
    window_sum_ = 3;
  }

  int order() const noexcept { return k_; }

  /// Smallest valid index, 2 - k.
  long min_index() const noexcept { return 2L - k_; }

  /// Largest index currently cached.
  long max_cached() const noexcept { return min_index() + static_cast<long>(terms_.size()) - 1; }

  /// L_n exactly. References stay valid for the lifetime of the context.
  const mpz_class& term(long n) {
    if (n < min_index()) {
      throw DomainError("index " + std::to_string(n) + " below 2-k = " + std::to_string(min_index()));
    }
    extend_to(n);
    return terms_[static_cast<std::size_t>(n - min_index())];
  }

  std::vector<mpz_class> term_range(long lo, long hi) {
    if (lo > hi) throw DomainError("empty range");
    if (lo < min_index()) {
      throw DomainError("index " + std::to_string(lo) + " below 2-k = " + std::to_string(min_index()));
    }
    extend_to(hi);
    std::vector<mpz_class> out;
    out.reserve(static_cast<std::size_t>(hi - lo + 1));
    for (long n = lo; n <= hi; ++n) out.push_back(terms_[static_cast<std::size_t>(n - min_index())]);
    return out;
  }

  void extend_to(long n) {
    // Sliding window: window_sum_ always holds the sum of the last k cached terms.
    while (max_cached() < n) {
      mpz_class next = window_sum_;
      window_sum_ += next;
      window_sum_ -= terms_[terms_.size() - static_cast<std::size_t>(k_)];
      terms_.push_back(std::move(next));
    }
  }

 private:
  int k_;
  std::deque<mpz_class> terms_;
  mpz_class window_sum_;
};

/// True iff n <= k and L_n = 3 * 2^(n-2). Indices below 2 are never in the regime.
inline bool check_power_regime(KLucasContext& ctx, long n) {
  if (n < 2 || n > ctx.order()) return false;
  mpz_class expected = 3;
  expected <<= static_cast<mp_bitcnt_t>(n - 2);
  return ctx.term(n) == expected;
}

}  // namespace klucas
