#pragma once

// Rigorous real arithmetic: closed intervals with MPFR endpoints and outward
// rounding on every operation.

#include <mpfr.h>
#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace covol {

/// A documented precondition of an operation was violated.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A comparison between enclosures could not be decided at the working
/// precision (after any escalation the caller allowed).
class UndecidableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Working precision, in decimal digits.
struct Precision {
  long digits = 40;

  mpfr_prec_t bits() const {
    return static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(digits) * 3.321928094887362)) + 16;
  }
  Precision doubled() const { return Precision{digits * 2}; }

  /// Reads COVOLUME_PRECISION, falling back to `fallback` when unset or invalid.
  static Precision from_env(long fallback = 40) {
    if (const char* env = std::getenv("COVOLUME_PRECISION")) {
      char* end = nullptr;
      long v = std::strtol(env, &end, 10);
      if (end != env && *end == '\0' && v > 0) return Precision{v};
    }
    return Precision{fallback};
  }

  friend bool operator==(const Precision&, const Precision&) = default;
};

namespace detail {

class Mpfr {
 public:
  explicit Mpfr(mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_zero(v_, 1);
  }
  Mpfr(const Mpfr& other) {
    mpfr_init2(v_, mpfr_get_prec(other.v_));
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  Mpfr(Mpfr&& other) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, other.v_);
  }
  Mpfr& operator=(const Mpfr& other) {
    if (this != &other) {
      mpfr_set_prec(v_, mpfr_get_prec(other.v_));
      mpfr_set(v_, other.v_, MPFR_RNDN);
    }
    return *this;
  }
  Mpfr& operator=(Mpfr&& other) noexcept {
    mpfr_swap(v_, other.v_);
    return *this;
  }
  ~Mpfr() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

inline std::string scientific(mpfr_srcptr x, int digits, mpfr_rnd_t rnd) {
  if (mpfr_zero_p(x)) return "0";
  if (mpfr_inf_p(x)) return mpfr_sgn(x) > 0 ? "inf" : "-inf";
  if (mpfr_nan_p(x)) return "nan";
  mpfr_exp_t e = 0;
  char* raw = mpfr_get_str(nullptr, &e, 10, static_cast<size_t>(digits), x, rnd);
  std::string s(raw);
  mpfr_free_str(raw);
  std::string sign;
  if (!s.empty() && s[0] == '-') {
    sign = "-";
    s.erase(0, 1);
  }
  std::string out = sign + s.substr(0, 1);
  if (s.size() > 1) out += "." + s.substr(1);
  out += "e" + std::to_string(static_cast<long>(e) - 1);
  return out;
}

}  // namespace detail

/// Decimal rendering of an enclosure: the closed ball mid ± rad contains the
/// represented interval.
struct DecimalBall {
  std::string mid;
  std::string rad;
};

/// A real number known to lie in [lower, upper].
///
/// All arithmetic rounds the lower endpoint toward -inf and the upper toward
/// +inf, so an output contains the exact result whenever the inputs contain
/// theirs. Binary operations run at the larger of the operand precisions.
class PrecisionValue {
 public:
  explicit PrecisionValue(Precision prec = {}) : lo_(prec.bits()), hi_(prec.bits()) {}

  PrecisionValue(long value, Precision prec) : PrecisionValue(prec) {
    mpfr_set_si(lo_.get(), value, MPFR_RNDD);
    mpfr_set_si(hi_.get(), value, MPFR_RNDU);
  }

  static PrecisionValue from_int(const mpz_class& value, Precision prec) {
    PrecisionValue r(prec);
    mpfr_set_z(r.lo_.get(), value.get_mpz_t(), MPFR_RNDD);
    mpfr_set_z(r.hi_.get(), value.get_mpz_t(), MPFR_RNDU);
    return r;
  }

  static PrecisionValue from_rational(const mpq_class& value, Precision prec) {
    PrecisionValue r(prec);
    mpfr_set_q(r.lo_.get(), value.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.get(), value.get_mpq_t(), MPFR_RNDU);
    return r;
  }

  /// Parses a decimal literal such as "1e-5" or "0.415"; the result encloses it.
  static PrecisionValue from_decimal(std::string_view text, Precision prec) {
    PrecisionValue r(prec);
    std::string s(text);
    if (mpfr_set_str(r.lo_.get(), s.c_str(), 10, MPFR_RNDD) != 0 ||
        mpfr_set_str(r.hi_.get(), s.c_str(), 10, MPFR_RNDU) != 0) {
      throw PreconditionError("not a decimal number: " + s);
    }
    return r;
  }

  static PrecisionValue from_bounds(const PrecisionValue& lower, const PrecisionValue& upper) {
    PrecisionValue r(Precision{});
    r.lo_ = lower.lo_;
    r.hi_ = upper.hi_;
    if (mpfr_cmp(r.lo_.get(), r.hi_.get()) > 0) throw std::logic_error("inverted interval bounds");
    return r;
  }

  static PrecisionValue pi(Precision prec) {
    PrecisionValue r(prec);
    mpfr_const_pi(r.lo_.get(), MPFR_RNDD);
    mpfr_const_pi(r.hi_.get(), MPFR_RNDU);
    return r;
  }

  mpfr_prec_t bits() const { return std::max(lo_.prec(), hi_.prec()); }
  Precision precision() const {
    return Precision{static_cast<long>(std::floor(static_cast<double>(bits() - 16) / 3.321928094887362))};
  }

  mpfr_srcptr lower() const { return lo_.get(); }
  mpfr_srcptr upper() const { return hi_.get(); }
  double lower_double() const { return mpfr_get_d(lo_.get(), MPFR_RNDD); }
  double upper_double() const { return mpfr_get_d(hi_.get(), MPFR_RNDU); }
  double mid_double() const {
    detail::Mpfr m(bits() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    return mpfr_get_d(m.get(), MPFR_RNDN);
  }

  /// The midpoint as a point interval. Not an enclosure of the value; used
  /// to restart iterations.
  PrecisionValue midpoint() const {
    PrecisionValue r(precision_of());
    detail::Mpfr m(bits() + 1);
    mpfr_add(m.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(m.get(), m.get(), 1, MPFR_RNDN);
    mpfr_set(r.lo_.get(), m.get(), MPFR_RNDN);
    mpfr_set(r.hi_.get(), r.lo_.get(), MPFR_RNDN);
    return r;
  }

  /// Upper bound on the radius (half-width) of the enclosure.
  double radius_upper() const {
    detail::Mpfr w(64);
    mpfr_sub(w.get(), hi_.get(), lo_.get(), MPFR_RNDU);
    mpfr_div_2ui(w.get(), w.get(), 1, MPFR_RNDU);
    return mpfr_get_d(w.get(), MPFR_RNDU);
  }

  bool is_finite() const { return mpfr_number_p(lo_.get()) && mpfr_number_p(hi_.get()); }
  bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }
  bool contains_zero() const { return mpfr_sgn(lo_.get()) <= 0 && mpfr_sgn(hi_.get()) >= 0; }

  bool contains(const mpq_class& q) const {
    return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
  }
  /// True when `inner` is a subset of this enclosure.
  bool contains(const PrecisionValue& inner) const {
    return mpfr_lessequal_p(lo_.get(), inner.lo_.get()) && mpfr_greaterequal_p(hi_.get(), inner.hi_.get());
  }
  bool overlaps(const PrecisionValue& other) const {
    return mpfr_lessequal_p(lo_.get(), other.hi_.get()) && mpfr_lessequal_p(other.lo_.get(), hi_.get());
  }

  /// Midpoint and radius as decimal strings; mid ± rad encloses the interval.
  DecimalBall decimal(int digits = 20) const {
    if (!is_finite()) return {detail::scientific(lo_.get(), digits, MPFR_RNDN), "inf"};
    const mpfr_prec_t wide = bits() + 64;
    detail::Mpfr mid(wide);
    mpfr_add(mid.get(), lo_.get(), hi_.get(), MPFR_RNDN);
    mpfr_div_2ui(mid.get(), mid.get(), 1, MPFR_RNDN);
    std::string mid_text = detail::scientific(mid.get(), digits, MPFR_RNDN);
    detail::Mpfr mlo(wide), mhi(wide);
    mpfr_set_str(mlo.get(), mid_text.c_str(), 10, MPFR_RNDD);
    mpfr_set_str(mhi.get(), mid_text.c_str(), 10, MPFR_RNDU);
    detail::Mpfr a(64), b(64);
    mpfr_sub(a.get(), hi_.get(), mlo.get(), MPFR_RNDU);
    mpfr_sub(b.get(), mhi.get(), lo_.get(), MPFR_RNDU);
    mpfr_max(a.get(), a.get(), b.get(), MPFR_RNDU);
    if (mpfr_sgn(a.get()) < 0) mpfr_set_zero(a.get(), 1);
    return {mid_text, detail::scientific(a.get(), 3, MPFR_RNDU)};
  }

  std::string to_string(int digits = 12) const {
    auto d = decimal(digits);
    return d.mid + " +/- " + d.rad;
  }

  PrecisionValue& operator+=(const PrecisionValue& o) { return *this = *this + o; }
  PrecisionValue& operator-=(const PrecisionValue& o) { return *this = *this - o; }
  PrecisionValue& operator*=(const PrecisionValue& o) { return *this = *this * o; }
  PrecisionValue& operator/=(const PrecisionValue& o) { return *this = *this / o; }

  friend PrecisionValue operator-(const PrecisionValue& a) {
    PrecisionValue r(a.precision_of());
    mpfr_neg(r.lo_.get(), a.hi_.get(), MPFR_RNDD);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue operator+(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    mpfr_add(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_add(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue operator-(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    mpfr_sub(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
    mpfr_sub(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue operator*(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    if (mpfr_sgn(a.lo_.get()) >= 0 && mpfr_sgn(b.lo_.get()) >= 0) {
      mpfr_mul(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
      mpfr_mul(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
      return r;
    }
    r.corners(a, b, mpfr_mul);
    return r;
  }

  friend PrecisionValue operator/(const PrecisionValue& a, const PrecisionValue& b) {
    if (b.contains_zero()) throw PreconditionError("division by an enclosure containing zero");
    PrecisionValue r(joint(a, b));
    if (mpfr_sgn(a.lo_.get()) >= 0 && mpfr_sgn(b.lo_.get()) > 0) {
      mpfr_div(r.lo_.get(), a.lo_.get(), b.hi_.get(), MPFR_RNDD);
      mpfr_div(r.hi_.get(), a.hi_.get(), b.lo_.get(), MPFR_RNDU);
      return r;
    }
    r.corners(a, b, mpfr_div);
    return r;
  }

  friend PrecisionValue operator+(const PrecisionValue& a, long b) { return a + PrecisionValue(b, a.precision_of()); }
  friend PrecisionValue operator-(const PrecisionValue& a, long b) { return a - PrecisionValue(b, a.precision_of()); }
  friend PrecisionValue operator*(const PrecisionValue& a, long b) { return a * PrecisionValue(b, a.precision_of()); }
  friend PrecisionValue operator/(const PrecisionValue& a, long b) { return a / PrecisionValue(b, a.precision_of()); }
  friend PrecisionValue operator+(long a, const PrecisionValue& b) { return PrecisionValue(a, b.precision_of()) + b; }
  friend PrecisionValue operator-(long a, const PrecisionValue& b) { return PrecisionValue(a, b.precision_of()) - b; }
  friend PrecisionValue operator*(long a, const PrecisionValue& b) { return PrecisionValue(a, b.precision_of()) * b; }
  friend PrecisionValue operator/(long a, const PrecisionValue& b) { return PrecisionValue(a, b.precision_of()) / b; }

  friend PrecisionValue sqrt(const PrecisionValue& a) {
    if (mpfr_sgn(a.lo_.get()) < 0) throw PreconditionError("sqrt of an enclosure reaching below zero");
    PrecisionValue r(a.precision_of());
    mpfr_sqrt(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_sqrt(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Natural logarithm.
  friend PrecisionValue log(const PrecisionValue& a) {
    if (mpfr_sgn(a.lo_.get()) <= 0) throw PreconditionError("log of a non-positive enclosure");
    PrecisionValue r(a.precision_of());
    mpfr_log(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_log(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue log2(const PrecisionValue& a) {
    if (mpfr_sgn(a.lo_.get()) <= 0) throw PreconditionError("log2 of a non-positive enclosure");
    PrecisionValue r(a.precision_of());
    mpfr_log2(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_log2(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue exp(const PrecisionValue& a) {
    PrecisionValue r(a.precision_of());
    mpfr_exp(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_exp(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue exp2(const PrecisionValue& a) {
    PrecisionValue r(a.precision_of());
    mpfr_exp2(r.lo_.get(), a.lo_.get(), MPFR_RNDD);
    mpfr_exp2(r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue abs(const PrecisionValue& a) {
    if (mpfr_sgn(a.lo_.get()) >= 0) return a;
    if (mpfr_sgn(a.hi_.get()) <= 0) return -a;
    PrecisionValue r(a.precision_of());
    mpfr_set_zero(r.lo_.get(), 1);
    mpfr_neg(r.hi_.get(), a.lo_.get(), MPFR_RNDU);
    mpfr_max(r.hi_.get(), r.hi_.get(), a.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Integer power; negative exponents require an enclosure away from zero.
  friend PrecisionValue pow(const PrecisionValue& a, long n) {
    if (n == 0) return PrecisionValue(1, a.precision_of());
    if (n < 0) return PrecisionValue(1, a.precision_of()) / pow(a, -n);
    PrecisionValue r(a.precision_of());
    const bool even = (n % 2) == 0;
    if (mpfr_sgn(a.lo_.get()) >= 0 || !even) {
      mpfr_pow_ui(r.lo_.get(), a.lo_.get(), static_cast<unsigned long>(n), MPFR_RNDD);
      mpfr_pow_ui(r.hi_.get(), a.hi_.get(), static_cast<unsigned long>(n), MPFR_RNDU);
      return r;
    }
    PrecisionValue m = abs(a);
    mpfr_pow_ui(r.lo_.get(), m.lo_.get(), static_cast<unsigned long>(n), MPFR_RNDD);
    mpfr_pow_ui(r.hi_.get(), m.hi_.get(), static_cast<unsigned long>(n), MPFR_RNDU);
    return r;
  }

  /// Real power of a positive base.
  friend PrecisionValue pow(const PrecisionValue& base, const PrecisionValue& expo) {
    if (mpfr_sgn(base.lo_.get()) <= 0) throw PreconditionError("real power of a non-positive base");
    PrecisionValue r(joint(base, expo));
    r.corners(base, expo, mpfr_pow);
    return r;
  }

  friend PrecisionValue hull(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Enclosure of max(a, b).
  friend PrecisionValue max(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    mpfr_max(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_max(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  friend PrecisionValue min(const PrecisionValue& a, const PrecisionValue& b) {
    PrecisionValue r(joint(a, b));
    mpfr_min(r.lo_.get(), a.lo_.get(), b.lo_.get(), MPFR_RNDD);
    mpfr_min(r.hi_.get(), a.hi_.get(), b.hi_.get(), MPFR_RNDU);
    return r;
  }

  /// Widens the enclosure by `r` on both sides (r >= 0).
  PrecisionValue widened(const PrecisionValue& r) const {
    PrecisionValue out(joint(*this, r));
    mpfr_sub(out.lo_.get(), lo_.get(), r.hi_.get(), MPFR_RNDD);
    mpfr_add(out.hi_.get(), hi_.get(), r.hi_.get(), MPFR_RNDU);
    return out;
  }

  friend bool certainly_less(const PrecisionValue& a, const PrecisionValue& b) {
    return mpfr_less_p(a.hi_.get(), b.lo_.get()) != 0;
  }
  friend bool certainly_less_equal(const PrecisionValue& a, const PrecisionValue& b) {
    return mpfr_lessequal_p(a.hi_.get(), b.lo_.get()) != 0;
  }
  friend bool certainly_positive(const PrecisionValue& a) { return mpfr_sgn(a.lo_.get()) > 0; }

  /// Floor of the value when it is determined by the enclosure.
  std::optional<mpz_class> floor_if_decided() const {
    mpz_class a, b;
    mpfr_get_z(a.get_mpz_t(), lo_.get(), MPFR_RNDD);
    mpfr_get_z(b.get_mpz_t(), hi_.get(), MPFR_RNDD);
    if (a != b) return std::nullopt;
    return a;
  }

  /// Largest integer that is certainly <= the value (floor of the lower end).
  mpz_class floor_lower() const {
    mpz_class a;
    mpfr_get_z(a.get_mpz_t(), lo_.get(), MPFR_RNDD);
    return a;
  }
  /// Smallest integer that is certainly >= the value.
  mpz_class ceil_upper() const {
    mpz_class a;
    mpfr_get_z(a.get_mpz_t(), hi_.get(), MPFR_RNDU);
    return a;
  }

 private:
  Precision precision_of() const { return precision_for_bits(bits()); }

  static Precision precision_for_bits(mpfr_prec_t bits) {
    // Inverse of Precision::bits(), rounded so that bits() >= `bits`.
    long digits = static_cast<long>(std::ceil(static_cast<double>(bits - 16) / 3.321928094887362));
    return Precision{std::max(1L, digits)};
  }

  static Precision joint(const PrecisionValue& a, const PrecisionValue& b) {
    return precision_for_bits(std::max(a.bits(), b.bits()));
  }

  using Op = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

  void corners(const PrecisionValue& a, const PrecisionValue& b, Op op) {
    const mpfr_srcptr xs[2] = {a.lo_.get(), a.hi_.get()};
    const mpfr_srcptr ys[2] = {b.lo_.get(), b.hi_.get()};
    detail::Mpfr t(bits());
    bool first = true;
    for (auto x : xs) {
      for (auto y : ys) {
        op(t.get(), x, y, MPFR_RNDD);
        if (first || mpfr_less_p(t.get(), lo_.get())) mpfr_set(lo_.get(), t.get(), MPFR_RNDD);
        op(t.get(), x, y, MPFR_RNDU);
        if (first || mpfr_greater_p(t.get(), hi_.get())) mpfr_set(hi_.get(), t.get(), MPFR_RNDU);
        first = false;
      }
    }
  }

  detail::Mpfr lo_;
  detail::Mpfr hi_;
};

inline PrecisionValue operator+(const PrecisionValue& a, const mpq_class& q) {
  return a + PrecisionValue::from_rational(q, a.precision());
}
inline PrecisionValue operator*(const PrecisionValue& a, const mpq_class& q) {
  return a * PrecisionValue::from_rational(q, a.precision());
}

/// Three-way comparison of enclosures; nullopt when they overlap.
inline std::optional<int> compare(const PrecisionValue& a, const PrecisionValue& b) {
  if (certainly_less(a, b)) return -1;
  if (certainly_less(b, a)) return 1;
  if (a.is_point() && b.is_point()) return 0;
  return std::nullopt;
}

/// Decides `lhs <= rhs` by recomputing at doubled precision up to
/// `max_doublings` times. Throws UndecidableError if the enclosures still overlap.
template <typename Fn>
bool decide_less_equal(Fn&& evaluate, Precision start, int max_doublings = 4) {
  Precision prec = start;
  for (int i = 0; i <= max_doublings; ++i) {
    auto [lhs, rhs] = evaluate(prec);
    if (certainly_less_equal(lhs, rhs)) return true;
    if (certainly_less(rhs, lhs)) return false;
    prec = prec.doubled();
  }
  throw UndecidableError("comparison undecided after " + std::to_string(max_doublings) +
                         " precision doublings");
}

}  // namespace covol
