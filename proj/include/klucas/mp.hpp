#pragma once

// Multiprecision plumbing: an RAII wrapper over mpfr_t and a closed interval
// type with outward (directed) rounding on every operation. Every enclosure
// produced here contains the exact real result.

#include <gmpxx.h>
#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "klucas/error.hpp"

namespace klucas {

using Bits = mpfr_prec_t;

inline constexpr Bits kDefaultBits = 256;

/// Binary precision carrying `digits` decimal digits plus a small guard.
inline Bits digits_to_bits(long digits) {
  return static_cast<Bits>(std::ceil(static_cast<double>(digits) * 3.3219280948873623)) + 16;
}

inline long bits_to_digits(Bits bits) {
  return std::max<long>(1, static_cast<long>(std::floor(static_cast<double>(bits - 16) / 3.3219280948873623)));
}

/// Exact rational from "123", "-4.5", "1.6e230", "7/3".
inline mpq_class parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  if (s.empty()) throw DomainError("empty number");
  if (auto slash = s.find('/'); slash != std::string::npos) {
    mpq_class num = parse_rational(s.substr(0, slash));
    mpq_class den = parse_rational(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    mpq_class r = num / den;
    r.canonicalize();
    return r;
  }
  std::size_t i = 0;
  bool negative = false;
  if (s[i] == '+' || s[i] == '-') negative = s[i++] == '-';
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false;
  for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
    if (s[i] == '.') {
      if (seen_dot) throw DomainError("malformed number '" + s + "'");
      seen_dot = true;
    } else {
      digits.push_back(s[i]);
      if (seen_dot) ++frac_digits;
    }
  }
  if (digits.empty()) throw DomainError("malformed number '" + s + "'");
  long exponent = 0;
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    std::size_t used = 0;
    try {
      exponent = std::stol(s.substr(i), &used);
    } catch (const std::exception&) {
      throw DomainError("malformed exponent in '" + s + "'");
    }
    i += used;
  }
  if (i != s.size()) throw DomainError("trailing characters in '" + s + "'");
  mpz_class mant(digits, 10);
  if (negative) mant = -mant;
  long shift = exponent - frac_digits;
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(shift)));
  mpq_class r = shift >= 0 ? mpq_class(mant * p) : mpq_class(mant, p);
  r.canonicalize();
  return r;
}

/// Owning wrapper around an mpfr_t.
class Real {
 public:
  explicit Real(Bits prec = kDefaultBits) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Real(Real&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  Real& operator=(const Real& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  Real& operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~Real() { mpfr_clear(v_); }

  mpfr_ptr get() noexcept { return v_; }
  mpfr_srcptr get() const noexcept { return v_; }
  Bits prec() const noexcept { return mpfr_get_prec(v_); }

  double to_double(mpfr_rnd_t rnd = MPFR_RNDN) const { return mpfr_get_d(v_, rnd); }

  /// The exact dyadic rational held by this number.
  mpq_class to_rational() const {
    if (!mpfr_number_p(v_)) throw DomainError("non-finite value has no rational form");
    if (mpfr_zero_p(v_)) return mpq_class(0);
    mpz_class z;
    mpfr_exp_t e = mpfr_get_z_2exp(z.get_mpz_t(), v_);
    mpq_class r(z);
    if (e >= 0) {
      mpq_mul_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
    } else {
      mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
    }
    return r;
  }

  /// Scientific notation with `sig` significant digits, rounded in direction `rnd`.
  std::string to_scientific(int sig, mpfr_rnd_t rnd) const {
    if (mpfr_nan_p(v_)) return "nan";
    if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
    if (mpfr_zero_p(v_)) return "0";
    mpfr_exp_t exp10 = 0;
    char* raw = mpfr_get_str(nullptr, &exp10, 10, static_cast<std::size_t>(sig), v_, rnd);
    std::string digits(raw);
    mpfr_free_str(raw);
    std::string sign;
    if (digits[0] == '-') {
      sign = "-";
      digits.erase(0, 1);
    }
    while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
    std::string out = sign + digits.substr(0, 1);
    if (digits.size() > 1) out += "." + digits.substr(1);
    long e = static_cast<long>(exp10) - 1;
    if (e != 0) out += "e" + std::to_string(e);
    return out;
  }

 private:
  mpfr_t v_;
};

/// Closed real interval [lower, upper] with outward rounding.
class Interval {
 public:
  explicit Interval(Bits prec = kDefaultBits) : lo_(prec), hi_(prec) {}

  static Interval exact(long v, Bits prec = kDefaultBits) {
    Interval r(prec);
    mpfr_set_si(r.lo_.get(), v, MPFR_RNDD);
    mpfr_set_si(r.hi_.get(), v, MPFR_RNDU);
    return r;
  }

  static Interval from_z(const mpz_class& v, Bits prec = kDefaultBits) {
    Interval r(prec);
    mpfr_set_z(r.lo_.get(), v.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), v.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static Interval from_q(const mpq_class& v, Bits prec = kDefaultBits) {
    Interval r(prec);
    mpfr_set_q(r.lo_.get(), v.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), v.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  static Interval from_decimal(std::string_view text, Bits prec = kDefaultBits) {
    return from_q(parse_rational(text), prec);
  }

  static Interval from_reals(const Real& lo, const Real& hi) {
    if (mpfr_cmp(lo.get(), hi.get()) > 0) throw DomainError("interval endpoints out of order");
    Interval r(std::max(lo.prec(), hi.prec()));
    mpfr_set(r.lo_.get(), lo.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi.get(), MPFR_RNDU);
    return r;
  }

  const Real& lower() const noexcept { return lo_; }
  const Real& upper() const noexcept { return hi_; }
  Bits prec() const noexcept { return std::max(lo_.prec(), hi_.prec()); }

  /// Same enclosure re-rounded outward to `prec` bits.
  Interval with_prec(Bits prec) const {
    Interval r(prec);
    mpfr_set(r.lo_.get(), lo_.get(), MPFR_RNDD);
    mpfr_set(r.hi_.get(), hi_.get(), MPFR_RNDU);
    return r;
  }

  bool contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }
  bool is_positive() const { return mpfr_sgn(lo_.get()) > 0; }
  bool is_negative() const { return mpfr_sgn(hi_.get()) < 0; }
  bool contains(const Interval& o) const {
    return mpfr_lessequal_p(lo_.get(), o.lo_.get()) && mpfr_lessequal_p(o.hi_.get(), hi_.get());
  }

  Real width() const {
    Real w(prec());
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    return w;
  }

  Real mid() const {
    Real m(prec() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return m;
  }

  /// Upper bound on the distance from the midpoint to either endpoint.
  Real radius() const {
    Real m = mid();
    Real a(prec()), b(prec());
    mpfr_sub(a.get(), hi_.get(), m.get(), MPFR_RNDU);
    mpfr_sub(b.get(), m.get(), lo_.get(), MPFR_RNDU);
    if (mpfr_cmp(a.get(), b.get()) < 0) return b;
    return a;
  }

  Interval operator-() const {
    Interval r(prec());
    mpfr_neg(r.lo_.get(), hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), lo_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    if (mpfr_sgn(a.lo_.get()) >= 0 && mpfr_sgn(b.lo_.get()) >= 0) {
      mpfr_mul(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
      mpfr_mul(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
      return r;
    }
    const mpfr_srcptr xs[2] = {a.lo_.get(), a.hi_.get()};
    const mpfr_srcptr ys[2] = {b.lo_.get(), b.hi_.get()};
    Real t(r.prec());
    bool first = true;
    for (auto x : xs) {
      for (auto y : ys) {
        mpfr_mul(t.get(), x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_mul(t.get(), x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw DomainError("interval division by an enclosure containing zero");
    Interval r(std::max(a.prec(), b.prec()));
    if (mpfr_sgn(a.lo_.get()) >= 0 && b.is_positive()) {
      mpfr_div(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
      mpfr_div(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
      return r;
    }
    const mpfr_srcptr xs[2] = {a.lo_.get(), a.hi_.get()};
    const mpfr_srcptr ys[2] = {b.lo_.get(), b.hi_.get()};
    Real t(r.prec());
    bool first = true;
    for (auto x : xs) {
      for (auto y : ys) {
        mpfr_div(t.get(), x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t.get(), r.lo_.get())) mpfr_set(r.lo_.get(), t.get(), MPFR_RNDD);
        mpfr_div(t.get(), x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t.get(), r.hi_.get())) mpfr_set(r.hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
    return r;
  }

  friend Interval operator*(const Interval& a, long s) {
    Interval r(a.prec());
    if (s >= 0) {
      mpfr_mul_si(r.lo_.get(), a.lo_.get(), s, MPFR_RNDD);
      mpfr_mul_si(r.hi_.get(), a.hi_.get(), s, MPFR_RNDU);
    } else {
      mpfr_mul_si(r.lo_.get(), a.hi_.get(), s, MPFR_RNDD);
      mpfr_mul_si(r.hi_.get(), a.lo_.get(), s, MPFR_RNDU);
    }
    return r;
  }
  friend Interval operator*(long s, const Interval& a) { return a * s; }
  friend Interval operator+(const Interval& a, long s) { return a + exact(s, a.prec()); }
  friend Interval operator-(const Interval& a, long s) { return a - exact(s, a.prec()); }
  friend Interval operator-(long s, const Interval& a) { return exact(s, a.prec()) - a; }
  friend Interval operator/(const Interval& a, long s) { return a / exact(s, a.prec()); }
  friend Interval operator/(long s, const Interval& a) { return exact(s, a.prec()) / a; }

  Interval& operator+=(const Interval& o) { return *this = *this + o; }
  Interval& operator-=(const Interval& o) { return *this = *this - o; }
  Interval& operator*=(const Interval& o) { return *this = *this * o; }
  Interval& operator/=(const Interval& o) { return *this = *this / o; }

  friend Interval log(const Interval& x) {
    if (!x.is_positive()) throw DomainError("log of an enclosure that is not strictly positive");
    Interval r(x.prec());
    mpfr_log(r.lo_.get(), x.lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), x.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval exp(const Interval& x) {
    Interval r(x.prec());
    mpfr_exp(r.lo_.get(), x.lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), x.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval sqrt(const Interval& x) {
    if (x.is_negative()) throw DomainError("sqrt of a negative enclosure");
    Interval r(x.prec());
    if (mpfr_sgn(x.lo_.get()) < 0) {
      mpfr_set_zero(r.lo_.get(), 1);
    } else {
      mpfr_sqrt(r.lo_.get(), x.lo_.get(), MPFR_RNDD);
    }
    mpfr_sqrt(r.hi_.get(), x.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend Interval abs(const Interval& x) {
    if (mpfr_sgn(x.lo_.get()) >= 0) return x;
    if (x.is_negative()) return -x;
    Interval r(x.prec());
    mpfr_set_zero(r.lo_.get(), 1);
    mpfr_neg(r.hi_.get(), x.lo_.get(), MPFR_RNDU);
    if (mpfr_greater_p(x.hi_.get(), r.hi_.get())) mpfr_set(r.hi_.get(), x.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// x^n for a non-negative enclosure (strictly positive when n < 0).
  friend Interval pow(const Interval& x, long n) {
    if (n == 0) return exact(1, x.prec());
    if (mpfr_sgn(x.lo_.get()) < 0 || (n < 0 && !x.is_positive())) {
      throw DomainError("integer power of an enclosure that is not positive");
    }
    Interval r(x.prec());
    if (n > 0) {
      mpfr_pow_si(r.lo_.get(), x.lo_.get(), n, MPFR_RNDD);
      mpfr_pow_si(r.hi_.get(), x.hi_.get(), n, MPFR_RNDU);
    } else {
      mpfr_pow_si(r.lo_.get(), x.hi_.get(), n, MPFR_RNDD);
      mpfr_pow_si(r.hi_.get(), x.lo_.get(), n, MPFR_RNDU);
    }
    return r;
  }

  /// Intersection of two enclosures of the same quantity.
  friend Interval intersect(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    if (mpfr_greater_p(r.lo_.get(), r.hi_.get())) {
      throw ConsistencyError("disjoint enclosures of the same quantity");
    }
    return r;
  }

  friend Interval hull(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Enclosures of max(a, b) and min(a, b).
  friend Interval max(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }
  friend Interval min(const Interval& a, const Interval& b) {
    Interval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// "[lo, hi]" with `sig` significant digits, rounded outward.
  std::string str(int sig = 20) const {
    return "[" + lo_.to_scientific(sig, MPFR_RNDD) + ", " + hi_.to_scientific(sig, MPFR_RNDU) + "]";
  }

  std::string upper_str(int sig = 12) const { return hi_.to_scientific(sig, MPFR_RNDU); }
  std::string lower_str(int sig = 12) const { return lo_.to_scientific(sig, MPFR_RNDD); }

  double upper_double() const { return hi_.to_double(MPFR_RNDU); }
  double lower_double() const { return lo_.to_double(MPFR_RNDD); }

  mpfr_ptr lo_ptr() noexcept { return lo_.get(); }
  mpfr_ptr hi_ptr() noexcept { return hi_.get(); }

 private:
  Real lo_;
  Real hi_;
};

inline bool certainly_less(const Interval& a, const Interval& b) {
  return mpfr_less_p(a.upper().get(), b.lower().get());
}
inline bool certainly_le(const Interval& a, const Interval& b) {
  return mpfr_lessequal_p(a.upper().get(), b.lower().get());
}
inline bool certainly_greater(const Interval& a, const Interval& b) { return certainly_less(b, a); }

/// Three-valued comparison outcome of two enclosures.
enum class Decision { kTrue, kFalse, kUndecided };

inline Decision decide_less(const Interval& a, const Interval& b) {
  if (certainly_less(a, b)) return Decision::kTrue;
  if (certainly_le(b, a)) return Decision::kFalse;
  return Decision::kUndecided;
}

inline Interval log_of(long v, Bits prec = kDefaultBits) { return log(Interval::exact(v, prec)); }

/// 2^e for a real enclosure e.
inline Interval pow2(const Interval& e) { return exp(e * log_of(2, e.prec())); }

/// floor(x) if both endpoints agree, otherwise nothing.
inline std::optional<mpz_class> certified_floor(const Interval& x) {
  mpz_class a, b;
  mpfr_get_z(a.get_mpz_t(), x.lower().get(), MPFR_RNDD);
  mpfr_get_z(b.get_mpz_t(), x.upper().get(), MPFR_RNDD);
  if (a != b) return std::nullopt;
  return a;
}

/// Smallest integer not below the upper endpoint.
inline mpz_class ceil_upper(const Interval& x) {
  mpz_class c;
  mpfr_get_z(c.get_mpz_t(), x.upper().get(), MPFR_RNDU);
  return c;
}

inline mpz_class floor_upper(const Interval& x) {
  mpz_class f;
  mpfr_get_z(f.get_mpz_t(), x.upper().get(), MPFR_RNDD);
  return f;
}

/// Enclosure of the distance from x to the nearest integer.
inline Interval dist_to_nearest_int(const Interval& x) {
  Real m = x.mid();
  mpz_class n;
  mpfr_get_z(n.get_mpz_t(), m.get(), MPFR_RNDN);
  Interval y = x - Interval::from_z(n, x.prec());
  Interval half = Interval::from_q(mpq_class(1, 2), x.prec());
  Interval d = abs(y);
  if (!certainly_le(d, half)) {
    // Too wide to pin the nearest integer; fall back to the trivial range.
    Interval r(x.prec());
    mpfr_set_d(r.hi_ptr(), 0.5, MPFR_RNDU);
    return r;
  }
  return d;
}

/// The exact integer 10^e.
inline mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

inline mpz_class pow2z(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 2, e);
  return r;
}

}  // namespace klucas
