#pragma once

// Rigorous enclosures of zeta(s), Hurwitz zeta, and L(s, chi_D) for
// quadratic characters.

#include <gmpxx.h>

#include <cstdint>
#include <cstdlib>
#include <stdexcept>

#include "arith.hpp"
#include "numeric.hpp"

namespace covol::zeta {

namespace detail {

inline long em_terms(Precision prec) { return static_cast<long>(prec.bits() / 5 + 5); }

// Rising factorial s (s+1) ... (s+k-1).
inline mpz_class rising(long s, long k) {
  mpz_class r = 1;
  for (long i = 0; i < k; ++i) r *= s + i;
  return r;
}

inline Precision guarded(Precision prec) { return Precision{prec.digits + 10}; }

}  // namespace detail

/// zeta(s, a) for integer s >= 2 and rational a > 0, by Euler-Maclaurin
/// summation with the standard remainder bound
///   |R| <= 4 |(s)_{2M}| / (2 pi)^{2M} * (a + N)^{-s-2M+1} / (s + 2M - 1).
inline PrecisionValue hurwitz(long s, const mpq_class& a, Precision prec) {
  if (s < 2) throw PreconditionError("hurwitz zeta needs s >= 2");
  if (a <= 0) throw PreconditionError("hurwitz zeta needs a > 0");
  const Precision wp = detail::guarded(prec);
  const long N = detail::em_terms(prec);
  const long M = N;

  PrecisionValue sum(0, wp);
  for (long n = 0; n < N; ++n) {
    mpq_class x = a + n;
    mpq_class t;
    mpz_class num, den;
    mpz_pow_ui(num.get_mpz_t(), x.get_den_mpz_t(), static_cast<unsigned long>(s));
    mpz_pow_ui(den.get_mpz_t(), x.get_num_mpz_t(), static_cast<unsigned long>(s));
    t = mpq_class(num, den);
    t.canonicalize();
    sum += PrecisionValue::from_rational(t, wp);
  }

  const mpq_class xN = a + N;
  const PrecisionValue X = PrecisionValue::from_rational(xN, wp);
  sum += pow(X, 1 - s) / (s - 1);
  sum += pow(X, -s) / 2;
  for (long k = 1; k <= M; ++k) {
    mpq_class c = arith::bernoulli(static_cast<std::size_t>(2 * k)) / mpq_class(arith::factorial(static_cast<unsigned long>(2 * k)));
    c *= mpq_class(detail::rising(s, 2 * k - 1));
    c.canonicalize();
    sum += PrecisionValue::from_rational(c, wp) * pow(X, -s - 2 * k + 1);
  }

  PrecisionValue two_pi = PrecisionValue::pi(wp) * 2;
  PrecisionValue bound = PrecisionValue::from_int(detail::rising(s, 2 * M), wp) * 4 / pow(two_pi, 2 * M) *
                         pow(X, -s - 2 * M + 1) / (s + 2 * M - 1);
  return sum.widened(bound);
}

inline PrecisionValue riemann(long s, Precision prec) {
  if (s == 1) throw PreconditionError("zeta has a pole at s = 1");
  return hurwitz(s, mpq_class(1), prec);
}

/// chi_D(n) = (D | n), the Kronecker character of the discriminant D.
/// D = 1 is the trivial character.
inline int chi(long D, long n) { return arith::kronecker(D, n); }

/// L(s, chi_D) for s >= 2, via Hurwitz zeta over residues mod |D|.
inline PrecisionValue dirichlet_l(long D, long s, Precision prec) {
  if (s < 2) throw PreconditionError("dirichlet_l needs s >= 2 (use l_at_one for s = 1)");
  if (D == 1) return riemann(s, prec);
  const long q = std::labs(D);
  const Precision wp = detail::guarded(prec);
  PrecisionValue acc(0, wp);
  for (long a = 1; a < q; ++a) {
    int c = chi(D, a);
    if (c == 0) continue;
    PrecisionValue h = hurwitz(s, mpq_class(a, q), wp);
    acc += c > 0 ? h : -h;
  }
  return acc / pow(PrecisionValue(q, wp), s);
}

/// Direct truncation: sum_{n <= N} chi(n) n^{-s} with tail bound N^{1-s}/(s-1).
/// Slow to converge; kept as an independent cross-check.
inline PrecisionValue dirichlet_l_direct(long D, long s, long N, Precision prec) {
  if (s < 2) throw PreconditionError("direct series needs s >= 2");
  PrecisionValue acc(0, prec);
  for (long n = 1; n <= N; ++n) {
    int c = D == 1 ? 1 : chi(D, n);
    if (c == 0) continue;
    mpz_class den;
    mpz_ui_pow_ui(den.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(s));
    PrecisionValue t = PrecisionValue::from_rational(mpq_class(mpz_class(c), den), prec);
    acc += t;
  }
  PrecisionValue tail = pow(PrecisionValue(N, prec), 1 - s) / (s - 1);
  return acc.widened(tail);
}

/// L(1, chi_D) for D != 1 by the truncated character series. The tail is
/// bounded by partial summation: |sum_{n>N} chi(n)/n| <= B/(N+1), B the
/// oscillation of the partial sums over one period.
inline PrecisionValue l_at_one_series(long D, long N, Precision prec) {
  if (D == 1) throw PreconditionError("zeta has a pole at s = 1");
  const long q = std::labs(D);
  long A = 0, lo = 0, hi = 0;
  for (long n = 1; n <= q; ++n) {
    A += chi(D, n);
    lo = std::min(lo, A);
    hi = std::max(hi, A);
  }
  PrecisionValue acc(0, prec);
  for (long n = 1; n <= N; ++n) {
    int c = chi(D, n);
    if (c == 0) continue;
    acc += PrecisionValue::from_rational(mpq_class(c, n), prec);
  }
  PrecisionValue tail = PrecisionValue::from_rational(mpq_class(hi - lo, N + 1), prec);
  return acc.widened(tail);
}

/// 2 pi h / (w sqrt|D|) for D < 0.
inline PrecisionValue l_at_one_class_number(long D, long h, Precision prec) {
  if (D >= 0) throw PreconditionError("class number formula route needs D < 0");
  const long w = D == -3 ? 6 : (D == -4 ? 4 : 2);
  return PrecisionValue::pi(prec) * (2 * h) / (sqrt(PrecisionValue(-D, prec)) * w);
}

}  // namespace covol::zeta
