#pragma once

// Matveev's lower bound for linear forms in logarithms and the chain of
// explicit bounds it feeds: an absolute bound on n for each k >= 3, and the
// k > 500 bounds on k and n. Every constant is an upward-rounded enclosure.

#include <gmpxx.h>

#include <map>
#include <string>
#include <vector>

#include "klucas/algebraic.hpp"
#include "klucas/certificate.hpp"
#include "klucas/error.hpp"
#include "klucas/mp.hpp"

namespace klucas {

inline constexpr Bits kBoundBits = 256;

// ---------------------------------------------------------------------------
// Matveev

/// log|Gamma| > -c(t) D^2 (1 + log D)(1 + log B) A_1 ... A_t.
struct LinearFormInstance {
  std::string label;
  int t = 2;
  long D = 1;
  Interval B;
  std::vector<Interval> A;

  void validate() const {
    if (t < 2) throw DomainError(label + ": t must be at least 2");
    if (D < 1) throw DomainError(label + ": D must be positive");
    if (static_cast<int>(A.size()) != t) throw DomainError(label + ": need exactly t heights");
    if (!certainly_le(Interval::exact(3, B.prec()), B)) throw DomainError(label + ": B must be at least 3");
    for (const auto& a : A) {
      if (!a.is_positive()) throw DomainError(label + ": heights must be positive");
    }
  }
};

/// 1.4 * 30^(t+3) * t^4.5.
inline Interval matveev_constant(int t, Bits bits = kBoundBits) {
  if (t < 1) throw DomainError("t must be positive");
  Interval tt = Interval::exact(t, bits);
  return Interval::from_q(mpq_class(7, 5), bits) * pow(Interval::exact(30, bits), t + 3) * pow(tt, 4) * sqrt(tt);
}

/// The (negative) lower bound for log|Gamma|.
inline Interval matveev_lower_bound(const LinearFormInstance& lf) {
  lf.validate();
  Bits bits = lf.B.prec();
  for (const auto& a : lf.A) bits = std::max(bits, a.prec());
  Interval D = Interval::exact(lf.D, bits);
  Interval prod = matveev_constant(lf.t, bits) * D * D * (log(D) + 1) * (log(lf.B.with_prec(bits)) + 1);
  for (const auto& a : lf.A) prod = prod * a;
  return -prod;
}

/// Lemma: f / (log f)^e < H with H > (4e^2)^e forces f < 2^e H (log H)^e.
inline Interval resolve_log_bound(const Interval& H, int e) {
  if (e < 1) throw DomainError("e must be positive");
  Interval threshold = pow(Interval::exact(4L * e * e, H.prec()), e);
  if (!certainly_greater(H, threshold)) throw DomainError("H must exceed (4e^2)^e = " + threshold.upper_str());
  return pow(Interval::exact(2, H.prec()), e) * H * pow(log(H), e);
}

// ---------------------------------------------------------------------------
// alpha for a (possibly huge, possibly non-integral) order k

struct AlphaBounds {
  Interval alpha;
  Interval log_alpha;
  Interval fk;
  bool from_root = false;  // false: bracket [2(1 - 2^-4096), 2]
};

inline constexpr long kRootOrderLimit = 4096;

/// Certified alpha(k) for integral k up to 4096; above that the monotone
/// bracket alpha(4096) < alpha(k) < 2 and the range 1/2 < f_k(alpha) < 3/4.
inline AlphaBounds alpha_bounds(const Interval& k, Bits bits = kBoundBits) {
  if (certainly_less(k, Interval::exact(3, k.prec()))) throw DomainError("order must be at least 3");
  AlphaBounds ab;
  auto floor_k = certified_floor(k);
  bool integral = floor_k && mpfr_equal_p(k.lower().get(), k.upper().get()) && mpfr_integer_p(k.lower().get());
  if (integral && *floor_k <= kRootOrderLimit) {
    RootContext rc = make_root_context(static_cast<int>(floor_k->get_si()), 60);
    ab.alpha = rc.alpha.with_prec(bits);
    ab.log_alpha = rc.log_alpha.with_prec(bits);
    ab.fk = rc.fk_alpha.with_prec(bits);
    ab.from_root = true;
    return ab;
  }
  Interval two = Interval::exact(2, bits);
  Interval lo = two * (1 - pow(two, -kRootOrderLimit));
  ab.alpha = hull(lo, two);
  ab.log_alpha = log(ab.alpha);
  ab.fk = hull(Interval::from_q(mpq_class(1, 2), bits), Interval::from_q(mpq_class(3, 4), bits));
  return ab;
}

// ---------------------------------------------------------------------------
// Chain for fixed k

/// Coefficients of the chain at order k (any real k >= 3). Names follow the
/// certificates emitted by derive_bound_chain.
struct ChainCoefficients {
  Interval k, log_k;
  AlphaBounds ab;
  Interval C1;   // n - p < C1 k^3 log k log(n - m + 6)
  Interval C2;   // case p <= m: n - p < C2 k^3 log k log(n - p)
  Interval C3;   // n - p < C3 k^3 (log k)^2
  Interval C4;   // case p <= m: n < C4 k^3 (log k)^2
  Interval C5;   // n - 1 < C5 k^3 log k log(n - 1) A3
  Interval cA;   // A3 < cA |p - n| k log k when n - p >= 2
  Interval cA1;  // A3 < cA1 k log k when n - p = 1
  Interval C6;   // n - 1 < C6 k^4 (log k)^2 log(n - 1) |p - n|
  Interval C7;   // n - 1 < C7 k^7 (log k)^3 (log(n - 1))^2
  Interval C8;   // n - 1 < C8 k^7 (log k)^5
  Interval C9;   // n < C9 k^7 (log k)^5
  Interval case1_n;
  Interval n_bound;
  std::map<std::string, std::vector<Guard>> guards;
};

namespace detail {

inline Guard guard(std::string statement, bool holds) { return Guard{std::move(statement), holds}; }

/// Modified height A3 of eta_3 over the degree-k field, as a multiple of k log k,
/// for gap x = n - p:  ((k+1)(x+1) log alpha + k(4 log 2 + 3 log k)) / (x k log k).
inline Interval eta3_ratio(const Interval& k, const Interval& log_k, const Interval& log_alpha, long x) {
  const Bits bits = k.prec();
  Interval log2 = log_of(2, bits);
  Interval xx = Interval::exact(x, bits);
  return ((k + 1) * (xx + 1) * log_alpha + k * (4 * log2 + 3 * log_k)) / (xx * k * log_k);
}

}  // namespace detail

inline ChainCoefficients compute_chain(const Interval& k_in, const AlphaBounds& ab) {
  const Bits bits = kBoundBits;
  ChainCoefficients c;
  c.k = k_in.with_prec(bits);
  c.ab = ab;
  const Interval& k = c.k;
  const Interval& la = ab.log_alpha;
  Interval lk = c.log_k = log(k);
  Interval log2 = log_of(2, bits), log10 = log_of(10, bits);
  Interval k3 = pow(k, 3), k7 = pow(k, 7);
  Interval three = Interval::exact(3, bits);

  // Gamma_1: t = 2, D = k, A = (log alpha, k log 10), B = n - m + 6, |Gamma_1| < 70 / alpha^(n-p).
  auto& g1 = c.guards["gamma1"];
  g1.push_back(detail::guard("k >= 3", certainly_le(three, k)));
  g1.push_back(detail::guard("1 + log k < 2 log k for k >= 3", certainly_less(lk + 1, 2 * lk)));
  g1.push_back(detail::guard("1 + log B < 2 log B for B = n - m + 6 >= 7",
                             certainly_less(log_of(7, bits) + 1, 2 * log_of(7, bits))));
  g1.push_back(detail::guard("log alpha >= 0.16", certainly_le(Interval::from_q(mpq_class(4, 25), bits), la)));
  c.C1 = 4 * matveev_constant(2, bits) * log10 + log_of(70, bits) / (la * k3 * lk * log_of(7, bits));

  // Case p <= m: n - m + 6 <= 7(n - p) and log 7x <= 4 log x for x >= 2.
  auto& g2 = c.guards["case1"];
  g2.push_back(detail::guard("log(7x) <= 4 log x for x = n - p >= 2", certainly_le(log_of(7, bits), 3 * log2)));
  c.C2 = 4 * c.C1;
  Interval H3 = c.C2 * k3 * lk;
  c.C3 = resolve_log_bound(H3, 1) / (k3 * lk * lk);
  c.C4 = 2 * c.C3 + 12 / (k3 * lk * lk);
  c.case1_n = c.C4 * k3 * lk * lk;

  // Gamma_2: t = 3, D = k, B = n - 1, |Gamma_2| < 18 / alpha^(n-1).
  auto& g3 = c.guards["gamma2"];
  g3.push_back(detail::guard("1/f_k(alpha) <= 2", certainly_le(1 / ab.fk, Interval::exact(2, bits))));
  g3.push_back(detail::guard("1/(1 - alpha^(p-n)) < 3 for n - p >= 1",
                             certainly_less(ab.alpha / (ab.alpha - 1), three)));
  g3.push_back(detail::guard("2 alpha - 1 > 1", certainly_greater(2 * ab.alpha - 1, Interval::exact(1, bits))));
  g3.push_back(detail::guard("1 + log(n - 1) < 2 log(n - 1) for n >= 5",
                             certainly_less(log_of(4, bits) + 1, 2 * log_of(4, bits))));
  Interval A3_min = 3 * k * lk;
  c.C5 = 4 * matveev_constant(3, bits) * log10 + log_of(18, bits) / (la * k3 * lk * log_of(4, bits) * A3_min);

  c.cA = detail::eta3_ratio(k, lk, la, 2);
  c.cA1 = detail::eta3_ratio(k, lk, la, 1);
  c.C6 = c.C5 * c.cA;

  // |p - n| < C1 k^3 log k log(n - m + 6) and n - m + 6 < 3(n - 1), log 3x < 2 log x for x >= 4.
  auto& g4 = c.guards["case2"];
  g4.push_back(detail::guard("n - m + 6 <= n + 6 < 3(n - 1) for n >= 5", true));
  g4.push_back(detail::guard("log(3x) < 2 log x for x = n - 1 >= 4", certainly_less(log_of(3, bits), log_of(4, bits))));
  c.C7 = 2 * c.C1 * c.C6;
  g4.push_back(detail::guard("n - p = 1: C5 cA1 k^4 (log k)^2 log(n-1) below the n - p >= 2 bound",
                             certainly_le(c.C5 * c.cA1, c.C7 * k3 * lk * log_of(4, bits))));

  Interval lk5 = pow(lk, 5);
  Interval H8 = c.C7 * k7 * pow(lk, 3);
  c.C8 = resolve_log_bound(H8, 2) / (k7 * lk5);
  c.C9 = c.C8 + 1 / (k7 * lk5);
  c.n_bound = c.C9 * k7 * lk5;
  c.guards["final"].push_back(detail::guard("case p <= m bound below the case m < p bound", certainly_le(c.case1_n, c.n_bound)));
  return c;
}

inline ChainCoefficients compute_chain(const Interval& k) { return compute_chain(k, alpha_bounds(k)); }

/// n < final_n_bound(k) for every solution with n >= 5 at order k.
inline Interval final_n_bound(const Interval& k) { return compute_chain(k).n_bound; }

namespace detail {

inline BoundCertificate chain_cert(const ChainCoefficients& c, std::string name, std::string statement,
                                   const Interval& value, std::string paper, std::vector<std::string> chain,
                                   const std::string& guard_key = "") {
  BoundCertificate cert = make_certificate(std::move(name), std::move(statement), value, std::move(paper), std::move(chain));
  cert.inputs["k"] = c.k.upper_str(20);
  cert.inputs["log_alpha"] = c.ab.log_alpha.str(15);
  cert.inputs["alpha_source"] = c.ab.from_root ? "root" : "bracket";
  if (!guard_key.empty() && c.guards.count(guard_key)) cert.guards = c.guards.at(guard_key);
  return cert;
}

}  // namespace detail

/// Certificates of the absolute bound on n at order k, in derivation order.
inline std::vector<BoundCertificate> derive_bound_chain(const Interval& k) {
  ChainCoefficients c = compute_chain(k);
  std::vector<BoundCertificate> out;

  auto g1 = detail::chain_cert(c, "gamma1_n_minus_p", "n - p < C k^3 log k log(n - m + 6)", c.C1, "7.2e9", {}, "gamma1");
  g1.inputs["t"] = "2";
  g1.inputs["D"] = "k";
  g1.inputs["A"] = "log alpha, k log 10";
  g1.inputs["B"] = "n - m + 6";
  g1.inputs["upper"] = "|Gamma_1| < 70 / alpha^(n-p)";
  g1.notes.push_back("Gamma_1 != 0: unit versus non-unit argument (recorded, not re-proved)");
  out.push_back(std::move(g1));

  auto c1 = detail::chain_cert(c, "case1_log_absorb", "p <= m: n - p < C k^3 log k log(n - p)", c.C2, "2.9e10",
                               {"gamma1_n_minus_p"}, "case1");
  c1.notes.push_back("n - m + 6 <= 7(n - p) when p <= m and n - p >= 1; n - p = 1 is trivially below every bound");
  out.push_back(std::move(c1));

  out.push_back(detail::chain_cert(c, "case1_n_minus_p", "p <= m: n - p < C k^3 (log k)^2", c.C3, "1.7e12",
                                   {"case1_log_absorb"}));
  auto c4 = detail::chain_cert(c, "case1_n", "p <= m: n < C k^3 (log k)^2", c.C4, "3.5e12", {"case1_n_minus_p"});
  c4.inputs["n_bound"] = c.case1_n.upper_str(12);
  c4.notes.push_back("n < m + p + 8 and m < n - p + 2 give n < 2(n - p) + 12");
  out.push_back(std::move(c4));

  auto g2 = detail::chain_cert(c, "gamma2_n_minus_1", "n - 1 < C k^3 log k log(n - 1) A3", c.C5, "1.4e12", {}, "gamma2");
  g2.inputs["t"] = "3";
  g2.inputs["D"] = "k";
  g2.inputs["B"] = "n - 1";
  g2.inputs["upper"] = "|Gamma_2| < 18 / alpha^(n-1)";
  g2.notes.push_back("Gamma_2 != 0: conjugation bound contradiction (recorded, not re-proved)");
  out.push_back(std::move(g2));

  auto h = detail::chain_cert(c, "eta3_modified_height", "n - p >= 2: A3 < C |p - n| k log k", c.cA, "7",
                              {"gamma2_n_minus_1"});
  h.inputs["A3"] = "(k+1)(n-p+1) log alpha + k(4 log 2 + 3 log k)";
  h.inputs["cA_gap_1"] = c.cA1.upper_str(12);
  h.notes.push_back(
      "h(L_m) = log L_m <= m log alpha + log 2 for the rational integer L_m (the published step uses (m/k) log alpha), "
      "h(f_k(alpha)) < 3 log k, m <= n - p + 1");
  out.push_back(std::move(h));

  out.push_back(detail::chain_cert(c, "case2_intermediate", "m < p: n - 1 < C k^4 (log k)^2 log(n - 1) |p - n|", c.C6,
                                   "9.9e12", {"eta3_modified_height"}));
  out.push_back(detail::chain_cert(c, "case2_n_minus_1", "m < p: n - 1 < C k^7 (log k)^3 (log(n - 1))^2", c.C7,
                                   "1.5e23", {"gamma1_n_minus_p", "case2_intermediate"}, "case2"));
  out.push_back(detail::chain_cert(c, "case2_resolved", "m < p: n - 1 < C k^7 (log k)^5", c.C8, "2.1e27",
                                   {"case2_n_minus_1"}));
  auto fin = detail::chain_cert(c, "final_n", "n < C k^7 (log k)^5", c.C9, "2.2e27", {"case1_n", "case2_resolved"}, "final");
  fin.inputs["n_bound"] = c.n_bound.upper_str(12);
  fin.inputs["log2_n_bound"] = (log(c.n_bound) / log_of(2, kBoundBits)).upper_str(12);
  out.push_back(std::move(fin));
  check_chain(out);
  return out;
}

inline std::vector<BoundCertificate> derive_bound_chain(long k) {
  if (k < 3) throw DomainError("bound chain needs k >= 3");
  return derive_bound_chain(Interval::exact(k, kBoundBits));
}

// ---------------------------------------------------------------------------
// k > k_floor (at least 500)

struct LemmaPResult {
  std::vector<BoundCertificate> certificates;
  Interval k_bound;  // k < k_bound
  Interval n_bound;  // n < n_bound
};

/// (1 + log(N(k) + 6)) / log k with N the final bound on n.
inline Interval log_ratio(const Interval& k) { return (log(final_n_bound(k) + 6) + 1) / log(k.with_prec(kBoundBits)); }

inline LemmaPResult derive_lemma_p(long k_floor) {
  if (k_floor < 500) throw DomainError("k_floor must be at least 500");
  const Bits bits = kBoundBits;
  Interval kf = Interval::exact(k_floor, bits);
  Interval lkf = log(kf);
  Interval log2 = log_of(2, bits), log10 = log_of(10, bits), log72 = log_of(72, bits);
  Interval R = log_ratio(kf);

  std::vector<Guard> ratio_guards;
  for (const char* s : {"2", "10", "1e6", "1e9", "1e15", "1e27", "1e28"}) {
    Interval kk = Interval::from_decimal(s, bits) * kf;
    ratio_guards.push_back(detail::guard("(1 + log(N(k)+6))/log k at k = " + kk.upper_str(6) + " <= value at k_floor",
                                         certainly_le(log_ratio(kk), R)));
  }
  std::vector<Guard> power_guards;
  for (const char* s : {"1", "2", "10", "1e6"}) {
    Interval kk = Interval::from_decimal(s, bits) * kf;
    power_guards.push_back(detail::guard("N(k) < 2^(k/2) at k = " + kk.upper_str(6),
                                         certainly_less(log(final_n_bound(kk)), kk / 2 * log2)));
  }

  LemmaPResult res;
  auto& out = res.certificates;
  auto cert = [&](std::string name, std::string statement, const Interval& v, std::string paper,
                  std::vector<std::string> chain) -> BoundCertificate& {
    out.push_back(make_certificate(std::move(name), std::move(statement), v, std::move(paper), std::move(chain)));
    out.back().inputs["k_floor"] = std::to_string(k_floor);
    return out.back();
  };

  Interval L1 = matveev_constant(2, bits) * log10 * log2;
  auto& c1 = cert("gamma3_matveev", "min{k/2 - 7, n - p - 1} log 2 < C (1 + log(n - m + 6))", L1, "1.24e9", {});
  c1.inputs["t"] = "2";
  c1.inputs["D"] = "1";
  c1.inputs["A"] = "log 10, log 2";
  c1.inputs["B"] = "n - m + 6";
  c1.guards.push_back(detail::guard("36/2^(k/2) + 2^(p-n) <= (0.29 + 0.5) 2^-min{k/2 - 7, n - p - 1}", true));
  c1.notes.push_back("Gamma_3 != 0: divisibility by 5 (recorded, not re-proved)");
  c1.notes.push_back("the intermediate exponent k/6 step is unverified prose; the min{k/2 - 7, n - p - 1} form is used");

  Interval L2 = L1 * R;
  auto& c2 = cert("gamma3_log_k", "min{k/2 - 7, n - p - 1} log 2 < C log k", L2, "3.8e10", {"gamma3_matveev"});
  c2.inputs["ratio"] = R.upper_str(12);
  c2.guards = ratio_guards;
  c2.notes.push_back("n - m + 6 <= N(k) + 6 with N the final bound on n");

  Interval L3 = 2 * L2 / log2 + 14 / lkf;
  cert("case_a_k_over_log_k", "case k/2 - 7 <= n - p - 1: k < C log k", L3, "7.7e10", {"gamma3_log_k"});
  Interval L4 = resolve_log_bound(L3, 1);
  cert("case_a_k", "case k/2 - 7 <= n - p - 1: k < C", L4, "3.9e12", {"case_a_k_over_log_k"});
  Interval L5 = L2 / log2 + 1 / lkf;
  cert("case_b_n_minus_p", "case n - p - 1 < k/2 - 7: n - p < C log k", L5, "3.9e10", {"gamma3_log_k"});
  Interval L6 = (L5 + 1 / lkf) * log2;
  auto& c6 = cert("eta3_height_gamma4", "h(1 - 2^(p-n)) <= (n - p + 1) log 2 < C log k", L6, "2.7e10", {"case_b_n_minus_p"});
  c6.notes.push_back("Gamma_4 != 0 (recorded, not re-proved)");

  Interval L7 = matveev_constant(3, bits) * log10 * log2 * L6 * R;
  auto& c7 = cert("gamma4_matveev", "(k/2) log 2 - log 72 < C (log k)^2", L7, "1.4e23", {"gamma3_log_k", "eta3_height_gamma4"});
  c7.inputs["t"] = "3";
  c7.inputs["D"] = "1";
  c7.inputs["B"] = "n - m + 6";
  c7.inputs["upper"] = "|Gamma_4| < 72 / 2^(k/2)";
  c7.guards = power_guards;
  c7.notes.push_back("B := n - m + 6 (printed as b - m + 6)");

  Interval L8 = 2 * L7 / log2 + 2 * log72 / (log2 * lkf * lkf);
  cert("gamma4_k_over_log2", "k < C (log k)^2", L8, "4.1e23", {"gamma4_matveev"});
  Interval L9 = resolve_log_bound(L8, 2);
  cert("lemma_p_k", "k < C", L9, "4.9e27", {"case_a_k", "gamma4_k_over_log2"});

  res.k_bound = max(L4, L9);
  Interval k_top = Interval::from_reals(res.k_bound.upper(), res.k_bound.upper());
  res.n_bound = final_n_bound(k_top);
  auto& c10 = cert("lemma_p_n", "n < C", res.n_bound, "1.6e230", {"lemma_p_k"});
  c10.guards.push_back(detail::guard("N(k) increasing: N(k_bound) >= N(k_floor)",
                                     certainly_le(final_n_bound(kf), res.n_bound)));
  c10.inputs["k_bound"] = res.k_bound.upper_str(12);
  check_chain(out);
  return res;
}

}  // namespace klucas
