#pragma once

// Field-counting appendix made executable: fields given by a monic integer
// polynomial, reduced integral bases with sup-norm certificates, trace-form
// matrices, the y-search and the closed-form count bounds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "arith.hpp"
#include "fields.hpp"
#include "numeric.hpp"

namespace covol::appendix {

using Coeffs = std::vector<mpz_class>;  // low degree first
using Elem = std::vector<mpq_class>;    // coordinates in 1, theta, ..., theta^{d-1}
using Matrix = std::vector<std::vector<mpq_class>>;
using Tuple = std::vector<int>;

// Exact linear algebra

inline Matrix mat_mul(const Matrix& a, const Matrix& b) {
  const std::size_t n = a.size(), m = b[0].size(), k = b.size();
  Matrix c(n, std::vector<mpq_class>(m, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

inline Matrix identity(std::size_t n) {
  Matrix m(n, std::vector<mpq_class>(n, 0));
  for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

/// Row rank over Q.
inline int rank(Matrix m) {
  int r = 0;
  const std::size_t rows = m.size(), cols = rows ? m[0].size() : 0;
  for (std::size_t c = 0; c < cols && static_cast<std::size_t>(r) < rows; ++c) {
    std::size_t p = static_cast<std::size_t>(r);
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[static_cast<std::size_t>(r)]);
    auto& pr = m[static_cast<std::size_t>(r)];
    for (std::size_t i = static_cast<std::size_t>(r) + 1; i < rows; ++i) {
      if (m[i][c] == 0) continue;
      mpq_class f = m[i][c] / pr[c];
      for (std::size_t j = c; j < cols; ++j) m[i][j] -= f * pr[j];
    }
    ++r;
  }
  return r;
}

/// Inverse by Gauss-Jordan; nullopt when singular.
inline std::optional<Matrix> inverse(Matrix a) {
  const std::size_t n = a.size();
  Matrix inv = identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a[p][c] == 0) ++p;
    if (p == n) return std::nullopt;
    std::swap(a[p], a[c]);
    std::swap(inv[p], inv[c]);
    mpq_class piv = a[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      a[c][j] /= piv;
      inv[c][j] /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == 0) continue;
      mpq_class f = a[i][c];
      for (std::size_t j = 0; j < n; ++j) {
        a[i][j] -= f * a[c][j];
        inv[i][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

/// Determinant of an integer matrix (Bareiss).
inline mpz_class determinant(std::vector<std::vector<mpz_class>> m) {
  const std::size_t n = m.size();
  if (n == 0) return 1;
  mpz_class prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[p], m[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
      }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// Polynomials

/// Parses "1 0 0 -1 -1" (leading coefficient first, constant last).
inline Coeffs parse_polynomial(const std::string& line) {
  std::istringstream in(line);
  std::vector<mpz_class> hi_first;
  std::string tok;
  while (in >> tok) {
    mpz_class v;
    if (v.set_str(tok, 10) != 0) throw PreconditionError("bad coefficient '" + tok + "'");
    hi_first.push_back(v);
  }
  if (hi_first.size() < 2) throw PreconditionError("polynomial must have degree at least 1");
  if (hi_first[0] != 1) throw PreconditionError("polynomial must be monic");
  return Coeffs(hi_first.rbegin(), hi_first.rend());
}

inline std::string format_polynomial(const Coeffs& f) {
  std::string s;
  for (auto it = f.rbegin(); it != f.rend(); ++it) s += (s.empty() ? "" : " ") + it->get_str();
  return s;
}

/// Non-empty, non-comment lines of a corpus file.
inline std::vector<Coeffs> read_corpus(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::vector<Coeffs> out;
  std::string line;
  while (std::getline(in, line)) {
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    out.push_back(parse_polynomial(line));
  }
  return out;
}

inline int degree(const Coeffs& f) { return static_cast<int>(f.size()) - 1; }

inline Coeffs derivative(const Coeffs& f) {
  Coeffs d;
  for (std::size_t i = 1; i < f.size(); ++i) d.push_back(f[i] * static_cast<unsigned long>(i));
  return d;
}

inline mpz_class resultant(const Coeffs& f, const Coeffs& g) {
  const int m = degree(f), n = degree(g);
  const std::size_t N = static_cast<std::size_t>(m + n);
  std::vector<std::vector<mpz_class>> s(N, std::vector<mpz_class>(N, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= m; ++j) s[static_cast<std::size_t>(i)][static_cast<std::size_t>(i + j)] = f[static_cast<std::size_t>(m - j)];
  for (int i = 0; i < m; ++i)
    for (int j = 0; j <= n; ++j) s[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(i + j)] = g[static_cast<std::size_t>(n - j)];
  return determinant(s);
}

/// Discriminant of a monic polynomial.
inline mpz_class poly_discriminant(const Coeffs& f) {
  const int d = degree(f);
  mpz_class r = resultant(f, derivative(f));
  return (d * (d - 1) / 2) % 2 ? mpz_class(-r) : r;
}

/// Exact division test in Z[x] for monic g.
inline bool divides(const Coeffs& g, Coeffs f) {
  const int dg = degree(g);
  for (int k = degree(f); k >= dg; --k) {
    mpz_class c = f[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    for (int j = 0; j <= dg; ++j) f[static_cast<std::size_t>(k - dg + j)] -= c * g[static_cast<std::size_t>(j)];
  }
  for (int j = 0; j < dg; ++j)
    if (f[static_cast<std::size_t>(j)] != 0) return false;
  return true;
}

// Complex enclosures

struct Complex {
  PrecisionValue re, im;
};

inline Complex cadd(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
inline Complex csub(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
inline Complex cmul(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline PrecisionValue cabs(const Complex& a) { return sqrt(pow(a.re, 2) + pow(a.im, 2)); }

inline Complex horner(const Coeffs& f, const Complex& z, Precision prec) {
  Complex acc{PrecisionValue(0, prec), PrecisionValue(0, prec)};
  for (auto it = f.rbegin(); it != f.rend(); ++it) {
    acc = cmul(acc, z);
    acc.re += PrecisionValue::from_int(*it, prec);
  }
  return acc;
}

struct RootEnclosures {
  Precision prec;
  std::vector<Complex> real_roots;     // im is exactly 0
  std::vector<Complex> complex_roots;  // one per conjugate pair, im > 0
  std::vector<double> radii;           // certified disk radius per root, reals then complex
};

namespace detail {

inline std::vector<std::complex<long double>> approximate_roots(const Coeffs& f) {
  const int d = degree(f);
  long double bound = 1;
  for (int i = 0; i < d; ++i) bound = std::max(bound, 1 + std::fabs(static_cast<long double>(f[static_cast<std::size_t>(i)].get_d())));
  std::vector<std::complex<long double>> z(static_cast<std::size_t>(d));
  const std::complex<long double> seed(0.4L, 0.9L);
  for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = std::pow(seed, i) * (bound / 2);
  auto eval = [&](std::complex<long double> x) {
    std::complex<long double> acc = 0;
    for (auto it = f.rbegin(); it != f.rend(); ++it) acc = acc * x + static_cast<long double>(it->get_d());
    return acc;
  };
  for (int iter = 0; iter < 2000; ++iter) {
    long double move = 0;
    for (int i = 0; i < d; ++i) {
      std::complex<long double> den = 1;
      for (int j = 0; j < d; ++j)
        if (j != i) den *= z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)];
      auto w = eval(z[static_cast<std::size_t>(i)]) / den;
      z[static_cast<std::size_t>(i)] -= w;
      move = std::max(move, std::abs(w));
    }
    if (move < 1e-17L) break;
  }
  return z;
}

inline PrecisionValue pv_of(long double v, Precision prec) {
  return PrecisionValue::from_rational(mpq_class(static_cast<double>(v)), prec);
}

inline Complex newton(const Coeffs& f, Complex z, bool real, Precision prec) {
  const Coeffs df = derivative(f);
  for (int iter = 0; iter < 200; ++iter) {
    Complex fz = horner(f, z, prec), dz = horner(df, z, prec);
    PrecisionValue den = pow(dz.re, 2) + pow(dz.im, 2);
    if (den.contains_zero()) throw UndecidableError("derivative vanishes near a root");
    // f/f' = f conj(f') / |f'|^2
    Complex step{(fz.re * dz.re + fz.im * dz.im) / den, (fz.im * dz.re - fz.re * dz.im) / den};
    z.re = (z.re - step.re).midpoint();
    z.im = real ? PrecisionValue(0, prec) : (z.im - step.im).midpoint();
    const double sz = std::max(std::fabs(step.re.mid_double()), std::fabs(step.im.mid_double()));
    const double scale = std::max(1.0, std::fabs(z.re.mid_double()) + std::fabs(z.im.mid_double()));
    if (sz <= scale * std::ldexp(1.0, -static_cast<int>(prec.bits()) + 4) || sz == 0) break;
  }
  return z;
}

}  // namespace detail

/// Certified enclosures of all roots of a squarefree monic f. Every root lies
/// in exactly one disk |z - z_i| <= d |f(z_i)/prod_{j != i}(z_i - z_j)|; the
/// disks are checked pairwise disjoint. Real centers give real roots.
inline RootEnclosures enclose_roots(const Coeffs& f, Precision prec) {
  const int d = degree(f);
  auto approx = detail::approximate_roots(f);
  std::vector<Complex> centers;
  std::vector<bool> is_real;
  std::vector<std::complex<long double>> reals, uppers;
  for (auto z : approx) {
    if (std::fabs(z.imag()) < 1e-9L * std::max(1.0L, std::abs(z))) reals.push_back(z.real());
    else if (z.imag() > 0) uppers.push_back(z);
  }
  if (reals.size() + 2 * uppers.size() != static_cast<std::size_t>(d)) {
    throw UndecidableError("could not separate real and complex roots of " + format_polynomial(f));
  }
  auto by_re = [](auto a, auto b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); };
  std::sort(reals.begin(), reals.end(), by_re);
  std::sort(uppers.begin(), uppers.end(), by_re);

  RootEnclosures out;
  out.prec = prec;
  std::vector<Complex> all;  // every root center, conjugates included
  for (auto z : reals) {
    Complex c{detail::pv_of(z.real(), prec), PrecisionValue(0, prec)};
    out.real_roots.push_back(detail::newton(f, c, true, prec));
    all.push_back(out.real_roots.back());
  }
  for (auto z : uppers) {
    Complex c{detail::pv_of(z.real(), prec), detail::pv_of(z.imag(), prec)};
    out.complex_roots.push_back(detail::newton(f, c, false, prec));
  }
  for (const auto& c : out.complex_roots) all.push_back(c);
  for (const auto& c : out.complex_roots) all.push_back(Complex{c.re, -c.im});

  std::vector<PrecisionValue> rad;
  for (std::size_t i = 0; i < all.size(); ++i) {
    PrecisionValue den(1, prec);
    for (std::size_t j = 0; j < all.size(); ++j)
      if (j != i) den *= cabs(csub(all[i], all[j]));
    if (den.contains_zero()) throw UndecidableError("root approximations collide");
    rad.push_back(cabs(horner(f, all[i], prec)) / den * d);
  }
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (!certainly_less(rad[i] + rad[j], cabs(csub(all[i], all[j])))) {
        throw UndecidableError("root disks overlap at " + std::to_string(prec.digits) + " digits");
      }
  auto widen = [](Complex& c, const PrecisionValue& r, bool real) {
    c.re = c.re.widened(r);
    if (!real) c.im = c.im.widened(r);
  };
  for (std::size_t i = 0; i < out.real_roots.size(); ++i) {
    widen(out.real_roots[i], rad[i], true);
    out.radii.push_back(rad[i].upper_double());
  }
  for (std::size_t i = 0; i < out.complex_roots.size(); ++i) {
    const std::size_t k = out.real_roots.size() + i;
    widen(out.complex_roots[i], rad[k], false);
    out.radii.push_back(rad[k].upper_double());
  }
  return out;
}

/// Irreducibility over Q: every monic factor of degree k <= d/2 would have a
/// subset of the roots as its roots, so its coefficients are integers inside
/// the enclosures of the elementary symmetric functions; candidates are then
/// tested by exact division.
inline bool is_irreducible(const Coeffs& f, Precision prec = {}) {
  const int d = degree(f);
  if (d <= 1) return d == 1;
  if (f[0] == 0) return false;
  if (poly_discriminant(f) == 0) return false;  // repeated factor
  auto enc = enclose_roots(f, prec);
  std::vector<Complex> all;
  for (const auto& c : enc.real_roots) all.push_back(c);
  for (const auto& c : enc.complex_roots) {
    all.push_back(c);
    all.push_back(Complex{c.re, -c.im});
  }
  const int n = static_cast<int>(all.size());
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    const int k = __builtin_popcount(mask);
    if (2 * k > d) continue;
    std::vector<Complex> poly{Complex{PrecisionValue(1, prec), PrecisionValue(0, prec)}};  // low first
    for (int i = 0; i < n; ++i) {
      if (!(mask & (1u << i))) continue;
      std::vector<Complex> next(poly.size() + 1, Complex{PrecisionValue(0, prec), PrecisionValue(0, prec)});
      for (std::size_t j = 0; j < poly.size(); ++j) {
        next[j + 1] = cadd(next[j + 1], poly[j]);
        next[j] = csub(next[j], cmul(poly[j], all[static_cast<std::size_t>(i)]));
      }
      poly = next;
    }
    Coeffs g;
    bool candidate = true;
    for (const auto& c : poly) {
      if (!c.im.contains_zero()) {
        candidate = false;
        break;
      }
      // integers in [lower, upper]
      const mpz_class first = c.re.floor_lower(), last = c.re.ceil_upper();
      mpz_class cand = 0;
      int found = 0;
      for (mpz_class t = first; t <= last; ++t) {
        if (c.re.contains(mpq_class(t))) {
          cand = t;
          ++found;
        }
      }
      if (found == 0) {
        candidate = false;
        break;
      }
      if (found > 1) throw UndecidableError("factor coefficients not isolated; raise precision");
      g.push_back(cand);
    }
    if (candidate && divides(g, f)) return false;
  }
  return true;
}

// Fields

struct FieldByPolynomial {
  Coeffs f;
  int d = 0;
  mpz_class disc_f;
  bool maximal = false;  // |disc_f| squarefree, or a quadratic field polynomial
  int r1 = 0, r2 = 0;
  std::optional<long> quadratic_disc;
  std::vector<mpz_class> power_sums;  // Tr(theta^k), k < d

  static FieldByPolynomial from_polynomial(const Coeffs& f, Precision prec = {}) {
    FieldByPolynomial K;
    K.f = f;
    K.d = degree(f);
    if (K.d < 2) throw PreconditionError("degree must be at least 2");
    if (f.back() != 1) throw PreconditionError("polynomial must be monic");
    if (!is_irreducible(f, prec)) throw PreconditionError(format_polynomial(f) + " is reducible");
    K.disc_f = poly_discriminant(f);
    K.maximal = arith::is_squarefree(mpz_class(abs(K.disc_f)));
    auto enc = enclose_roots(f, prec);
    K.r1 = static_cast<int>(enc.real_roots.size());
    K.r2 = static_cast<int>(enc.complex_roots.size());
    K.init_power_sums();
    return K;
  }

  /// Q(sqrt D) through x^2 - x + (1 - D)/4 or x^2 - D/4, whose order is O_K.
  static FieldByPolynomial quadratic(long D) {
    if (!is_fundamental_discriminant(D)) throw PreconditionError(std::to_string(D) + " is not a fundamental discriminant");
    FieldByPolynomial K;
    if (((D % 4) + 4) % 4 == 1) K.f = {mpz_class((1 - D) / 4), mpz_class(-1), mpz_class(1)};
    else K.f = {mpz_class(-D / 4), mpz_class(0), mpz_class(1)};
    K.d = 2;
    K.disc_f = poly_discriminant(K.f);
    K.maximal = true;
    K.quadratic_disc = D;
    K.r1 = D > 0 ? 2 : 0;
    K.r2 = D > 0 ? 0 : 1;
    K.init_power_sums();
    return K;
  }

  mpz_class abs_disc() const { return abs(disc_f); }

  std::string label() const {
    if (quadratic_disc) return "Q(sqrt " + std::to_string(*quadratic_disc) + ")";
    return format_polynomial(f);
  }

  Elem one() const {
    Elem e(static_cast<std::size_t>(d), 0);
    e[0] = 1;
    return e;
  }
  Elem theta() const {
    Elem e(static_cast<std::size_t>(d), 0);
    e[1] = 1;
    return e;
  }

  Elem mul(const Elem& a, const Elem& b) const {
    std::vector<mpq_class> prod(static_cast<std::size_t>(2 * d - 1), 0);
    for (int i = 0; i < d; ++i) {
      if (a[static_cast<std::size_t>(i)] == 0) continue;
      for (int j = 0; j < d; ++j) prod[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    }
    for (int k = 2 * d - 2; k >= d; --k) {
      mpq_class c = prod[static_cast<std::size_t>(k)];
      if (c == 0) continue;
      for (int j = 0; j <= d; ++j) prod[static_cast<std::size_t>(k - d + j)] -= c * f[static_cast<std::size_t>(j)];
    }
    prod.resize(static_cast<std::size_t>(d));
    return prod;
  }

  Elem power(const Elem& a, int e) const {
    Elem r = one();
    for (int i = 0; i < e; ++i) r = mul(r, a);
    return r;
  }

  mpq_class trace(const Elem& a) const {
    mpq_class t = 0;
    for (int k = 0; k < d; ++k) t += a[static_cast<std::size_t>(k)] * power_sums[static_cast<std::size_t>(k)];
    return t;
  }

  /// Embeddings at `prec`: r1 real, then one of each complex pair.
  std::vector<Complex> embeddings(const Elem& a, Precision prec) const {
    auto enc = roots(prec);
    std::vector<Complex> out;
    auto eval = [&](const Complex& z) {
      Complex acc{PrecisionValue(0, prec), PrecisionValue(0, prec)};
      for (int k = d - 1; k >= 0; --k) {
        acc = cmul(acc, z);
        acc.re += PrecisionValue::from_rational(a[static_cast<std::size_t>(k)], prec);
      }
      return acc;
    };
    for (const auto& z : enc.real_roots) out.push_back(eval(z));
    for (const auto& z : enc.complex_roots) out.push_back(eval(z));
    return out;
  }

  PrecisionValue sup_norm(const Elem& a, Precision prec) const {
    auto em = embeddings(a, prec);
    PrecisionValue m = cabs(em[0]);
    for (std::size_t i = 1; i < em.size(); ++i) m = max(m, cabs(em[i]));
    return m;
  }

  RootEnclosures roots(Precision prec) const {
    auto it = root_cache_->find(prec.digits);
    if (it != root_cache_->end()) return it->second;
    auto enc = enclose_roots(f, prec);
    root_cache_->emplace(prec.digits, enc);
    return enc;
  }

 private:
  void init_power_sums() {
    // Newton identities for monic f
    power_sums.assign(static_cast<std::size_t>(d), 0);
    power_sums[0] = d;
    for (int k = 1; k < d; ++k) {
      mpz_class s = mpz_class(k) * f[static_cast<std::size_t>(d - k)];
      for (int i = 1; i < k; ++i) s += f[static_cast<std::size_t>(d - i)] * power_sums[static_cast<std::size_t>(k - i)];
      power_sums[static_cast<std::size_t>(k)] = -s;
    }
  }
  std::shared_ptr<std::map<long, RootEnclosures>> root_cache_ = std::make_shared<std::map<long, RootEnclosures>>();
};

// Parameters and monomial sets

struct Parameters {
  int s = 1, l = 1, r = 1;
};

/// s: greatest integer strictly below sqrt(log2 d), at least 1; l: least
/// integer above (d s!)^{1/s}; r: least integer above d/2, at most 3d/4.
inline Parameters parameters(int d) {
  if (d < 2) throw PreconditionError("degree must be at least 2");
  Parameters p;
  // s < sqrt(log2 d)  <=>  2^{s^2} < d
  p.s = 1;
  for (int s = 2; s * s < 62 && (1L << (s * s)) < d; ++s) p.s = s;
  const mpz_class target = mpz_class(d) * arith::factorial(static_cast<unsigned long>(p.s));
  mpz_class lp;
  for (p.l = 1;; ++p.l) {
    mpz_ui_pow_ui(lp.get_mpz_t(), static_cast<unsigned long>(p.l), static_cast<unsigned long>(p.s));
    if (lp > target) break;
  }
  p.r = d / 2 + 1;
  if (p.r > 3 * d / 4) throw PreconditionError("no integer r with d/2 < r <= 3d/4 for d = " + std::to_string(d));
  if (mpz_class(p.r) > arith::binomial(static_cast<unsigned long>(p.l + p.s), static_cast<unsigned long>(p.s))) {
    throw std::logic_error("|S(l)| below r");
  }
  return p;
}

/// Exponent tuples with sum <= l: by total degree, then lexicographically
/// descending within a degree.
inline std::vector<Tuple> monomials(int s, int l) {
  if (s < 1 || l < 0) throw PreconditionError("need s >= 1, l >= 0");
  std::vector<Tuple> out;
  Tuple t(static_cast<std::size_t>(s), 0);
  std::function<void(int, int)> fill = [&](int pos, int left) {
    if (pos == s - 1) {
      t[static_cast<std::size_t>(pos)] = left;
      out.push_back(t);
      return;
    }
    for (int v = left; v >= 0; --v) {
      t[static_cast<std::size_t>(pos)] = v;
      fill(pos + 1, left - v);
    }
  };
  for (int total = 0; total <= l; ++total) fill(0, total);
  return out;
}

struct MonomialSets {
  int s = 1, l = 1;
  std::vector<Tuple> S;    // S(l)
  std::vector<Tuple> S2;   // S(2l)
  std::vector<std::vector<int>> doubling;  // doubling[i][j] = index of S[i] + S[j] in S2
};

inline MonomialSets monomial_sets(int s, int l) {
  if (s < 1 || l < 1) throw PreconditionError("need s, l >= 1");
  MonomialSets m;
  m.s = s;
  m.l = l;
  m.S = monomials(s, l);
  m.S2 = monomials(s, 2 * l);
  std::map<Tuple, int> index;
  for (std::size_t i = 0; i < m.S2.size(); ++i) index[m.S2[i]] = static_cast<int>(i);
  m.doubling.assign(m.S.size(), std::vector<int>(m.S.size(), -1));
  for (std::size_t i = 0; i < m.S.size(); ++i)
    for (std::size_t j = 0; j < m.S.size(); ++j) {
      Tuple sum(static_cast<std::size_t>(s));
      for (int k = 0; k < s; ++k) sum[static_cast<std::size_t>(k)] = m.S[i][static_cast<std::size_t>(k)] + m.S[j][static_cast<std::size_t>(k)];
      m.doubling[i][j] = index.at(sum);
    }
  return m;
}

/// y_1^{k_1} ... y_s^{k_s}.
inline Elem monomial(const FieldByPolynomial& K, const std::vector<Elem>& y, const Tuple& k) {
  Elem r = K.one();
  for (std::size_t i = 0; i < y.size(); ++i) r = K.mul(r, K.power(y[i], k[i]));
  return r;
}

inline int span_rank(const std::vector<Elem>& elems) { return rank(Matrix(elems.begin(), elems.end())); }

// Reduced bases

namespace detail {

/// LLL (delta = 0.99) on row vectors; returns the unimodular transform.
inline std::vector<std::vector<long>> lll(std::vector<std::vector<long double>> b) {
  const std::size_t n = b.size(), m = b[0].size();
  std::vector<std::vector<long>> U(n, std::vector<long>(n, 0));
  for (std::size_t i = 0; i < n; ++i) U[i][i] = 1;
  auto dot = [&](const std::vector<long double>& x, const std::vector<long double>& y) {
    long double s = 0;
    for (std::size_t i = 0; i < m; ++i) s += x[i] * y[i];
    return s;
  };
  std::vector<std::vector<long double>> bs(n), mu(n, std::vector<long double>(n, 0));
  std::vector<long double> B(n);
  auto gram_schmidt = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      bs[i] = b[i];
      for (std::size_t j = 0; j < i; ++j) {
        mu[i][j] = dot(b[i], bs[j]) / B[j];
        for (std::size_t t = 0; t < m; ++t) bs[i][t] -= mu[i][j] * bs[j][t];
      }
      B[i] = dot(bs[i], bs[i]);
    }
  };
  gram_schmidt();
  std::size_t k = 1;
  int guard = 0;
  while (k < n && guard++ < 100000) {
    for (std::size_t j = k; j-- > 0;) {
      long q = std::lround(static_cast<double>(mu[k][j]));
      if (q == 0) continue;
      for (std::size_t t = 0; t < m; ++t) b[k][t] -= q * b[j][t];
      for (std::size_t t = 0; t < n; ++t) U[k][t] -= q * U[j][t];
      gram_schmidt();
    }
    if (B[k] >= (0.99L - mu[k][k - 1] * mu[k][k - 1]) * B[k - 1]) {
      ++k;
    } else {
      std::swap(b[k], b[k - 1]);
      std::swap(U[k], U[k - 1]);
      gram_schmidt();
      k = std::max<std::size_t>(k - 1, 1);
    }
  }
  return U;
}

}  // namespace detail

struct ReducedBasis {
  mpq_class C1 = 2;
  std::vector<Elem> basis;                  // integral, in power-basis coordinates
  std::vector<std::vector<long>> transform;  // rows: gamma_i in the power basis
  std::vector<PrecisionValue> norms;
  std::vector<int> ties;        // j with ||gamma_j|| = ||gamma_{j+1}|| to working precision (0-based)
  PrecisionValue product_ratio;  // prod ||gamma_i|| / sqrt(D)
  bool ordered = false;
  bool product_ok = false;
  std::vector<bool> index_ok;   // ||gamma_i|| <= (C1^d sqrt D)^{1/(d-i)}, i < d
  bool all_at_least_one = false;
  Precision precision;

  bool holds() const {
    return ordered && product_ok && all_at_least_one && std::all_of(index_ok.begin(), index_ok.end(), [](bool b) { return b; });
  }
};

/// Lattice reduction of Z[theta] on the Minkowski embedding, then a sort by
/// sup-norm. Comparisons that stay undecided are retried at doubled precision
/// up to `max_doublings` times; order comparisons still open after that are
/// reported as ties.
inline ReducedBasis reduced_basis(const FieldByPolynomial& K, const mpq_class& C1 = 2, Precision prec = {},
                                  int max_doublings = 4, bool require_maximal = true) {
  if (require_maximal && !K.maximal) throw PreconditionError("Z[theta] is not known to be maximal for " + K.label());
  const int d = K.d;
  // Minkowski coordinates of theta^k from the root centers
  auto enc = K.roots(Precision{30});
  std::vector<std::vector<long double>> rows(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    auto& row = rows[static_cast<std::size_t>(k)];
    for (const auto& z : enc.real_roots) row.push_back(std::pow(static_cast<long double>(z.re.mid_double()), k));
    for (const auto& z : enc.complex_roots) {
      auto p = std::pow(std::complex<long double>(z.re.mid_double(), z.im.mid_double()), k);
      row.push_back(std::sqrt(2.0L) * p.real());
      row.push_back(std::sqrt(2.0L) * p.imag());
    }
  }
  ReducedBasis rb;
  rb.C1 = C1;
  rb.transform = detail::lll(rows);
  std::vector<std::vector<mpz_class>> Uz;
  for (const auto& r : rb.transform) {
    Uz.emplace_back();
    for (long v : r) Uz.back().push_back(mpz_class(v));
  }
  if (abs(determinant(Uz)) != 1) throw std::logic_error("reduction transform is not unimodular");
  std::vector<Elem> basis;
  for (const auto& r : rb.transform) {
    Elem e;
    for (long v : r) e.push_back(mpq_class(v));
    basis.push_back(e);
  }

  Precision p = prec;
  std::vector<PrecisionValue> norms;
  std::vector<std::size_t> order(static_cast<std::size_t>(d));
  for (int attempt = 0;; ++attempt) {
    norms.clear();
    for (const auto& e : basis) norms.push_back(K.sup_norm(e, p));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return norms[a].mid_double() < norms[b].mid_double() ||
             (norms[a].mid_double() == norms[b].mid_double() && certainly_less(norms[a], norms[b]));
    });
    bool decided = true;
    for (std::size_t j = 0; j + 1 < order.size(); ++j)
      if (!certainly_less_equal(norms[order[j]], norms[order[j + 1]])) decided = false;
    if (decided || attempt >= max_doublings) break;
    p = p.doubled();
  }
  rb.precision = p;
  std::vector<std::vector<long>> T;
  for (std::size_t i : order) {
    rb.basis.push_back(basis[i]);
    rb.norms.push_back(norms[i]);
    T.push_back(rb.transform[i]);
  }
  rb.transform = T;
  rb.ordered = true;
  for (std::size_t j = 0; j + 1 < rb.norms.size(); ++j) {
    if (certainly_less_equal(rb.norms[j], rb.norms[j + 1])) continue;
    if (certainly_less(rb.norms[j + 1], rb.norms[j])) rb.ordered = false;
    else rb.ties.push_back(static_cast<int>(j));
  }

  const PrecisionValue sqrtD = sqrt(PrecisionValue::from_int(K.abs_disc(), p));
  const PrecisionValue C1d = pow(PrecisionValue::from_rational(C1, p), d);
  PrecisionValue prod(1, p);
  for (const auto& n : rb.norms) prod *= n;
  rb.product_ratio = prod / sqrtD;
  rb.product_ok = certainly_less_equal(rb.product_ratio, C1d);
  const PrecisionValue one(1, p);
  rb.all_at_least_one = std::all_of(rb.norms.begin(), rb.norms.end(), [&](const PrecisionValue& n) {
    return certainly_less_equal(one, n) || n.contains(mpq_class(1));
  });
  for (int i = 1; i < d; ++i) {
    PrecisionValue bound = pow(C1d * sqrtD, 1 / PrecisionValue(d - i, p));
    rb.index_ok.push_back(certainly_less_equal(rb.norms[static_cast<std::size_t>(i - 1)], bound));
  }
  return rb;
}

// Trace-form matrices

struct TraceCheck {
  std::vector<Matrix> M;     // M(u) = (Tr(u z_i z_j))
  std::vector<Matrix> A;     // M(u) M(1)^{-1}
  std::vector<Matrix> mult;  // row i: coordinates of u z_i in the basis z
  bool generates = false;    // C generates K (algebra dimension d)
  bool matches = false;      // A == mult for every u
  bool multiplicative = false;  // A(uv) == A(u) A(v) for u, v in C
};

inline Matrix trace_matrix(const FieldByPolynomial& K, const std::vector<Elem>& z, const Elem& u) {
  const std::size_t d = z.size();
  Matrix M(d, std::vector<mpq_class>(d));
  for (std::size_t i = 0; i < d; ++i) {
    Elem uz = K.mul(u, z[i]);
    for (std::size_t j = i; j < d; ++j) M[i][j] = M[j][i] = K.trace(K.mul(uz, z[j]));
  }
  return M;
}

/// Coordinates of elements in the basis z (rows of the result).
inline Matrix coordinates(const std::vector<Elem>& z, const std::vector<Elem>& elems) {
  // w = sum c_i z_i  <=>  c = w Z^{-1} with Z the matrix of rows z_i
  auto Zi = inverse(Matrix(z.begin(), z.end()));
  if (!Zi) throw PreconditionError("z is not a basis");
  return mat_mul(Matrix(elems.begin(), elems.end()), *Zi);
}

/// Dimension of the Q-algebra generated by C: span of products of up to d factors.
inline int generated_dimension(const FieldByPolynomial& K, const std::vector<Elem>& C) {
  std::vector<Elem> span{K.one()};
  std::vector<Elem> frontier{K.one()};
  for (int round = 0; round < K.d && !frontier.empty(); ++round) {
    std::vector<Elem> next;
    for (const auto& a : frontier)
      for (const auto& u : C) {
        Elem b = K.mul(a, u);
        std::vector<Elem> trial = span;
        trial.push_back(b);
        if (span_rank(trial) > span_rank(span)) {
          span.push_back(b);
          next.push_back(b);
        }
      }
    frontier = next;
  }
  return span_rank(span);
}

inline TraceCheck trace_matrices(const FieldByPolynomial& K, const std::vector<Elem>& z, const std::vector<Elem>& C) {
  if (static_cast<int>(z.size()) != K.d || span_rank(z) != K.d) throw PreconditionError("z is not a rational basis");
  if (C.empty() || C[0] != K.one()) throw PreconditionError("C must start with 1");
  TraceCheck out;
  out.generates = generated_dimension(K, C) == K.d;
  const Matrix M1 = trace_matrix(K, z, K.one());
  auto M1i = inverse(M1);
  if (!M1i) throw PreconditionError("M(1) is singular");
  auto A_of = [&](const Elem& u) { return mat_mul(trace_matrix(K, z, u), *M1i); };
  out.matches = true;
  for (const auto& u : C) {
    out.M.push_back(trace_matrix(K, z, u));
    out.A.push_back(mat_mul(out.M.back(), *M1i));
    std::vector<Elem> uz;
    for (const auto& zi : z) uz.push_back(K.mul(u, zi));
    out.mult.push_back(coordinates(z, uz));
    if (out.A.back() != out.mult.back()) out.matches = false;
  }
  out.multiplicative = true;
  for (std::size_t a = 0; a < C.size(); ++a)
    for (std::size_t b = a; b < C.size(); ++b)
      if (A_of(K.mul(C[a], C[b])) != mat_mul(out.A[a], out.A[b])) out.multiplicative = false;
  return out;
}

struct SpanCheck {
  int rank_S = 0;
  int rank_doubled = 0;
  bool applies = false;  // rank_S > d/2
  bool holds = false;    // applies => rank_doubled == d
};

/// If S(y) spans more than d/2 dimensions then (S+S)(y) spans K.
inline SpanCheck span_doubling_check(const FieldByPolynomial& K, const std::vector<Elem>& y, const std::vector<Tuple>& S) {
  SpanCheck c;
  std::vector<Elem> sy, dy;
  for (const auto& k : S) sy.push_back(monomial(K, y, k));
  for (std::size_t i = 0; i < S.size(); ++i)
    for (std::size_t j = i; j < S.size(); ++j) dy.push_back(K.mul(sy[i], sy[j]));
  c.rank_S = span_rank(sy);
  c.rank_doubled = span_rank(dy);
  c.applies = 2 * c.rank_S > K.d;
  c.holds = !c.applies || c.rank_doubled == K.d;
  return c;
}

// y-search

struct FindY {
  std::vector<Elem> y;
  std::vector<std::vector<long>> coefficients;  // y_i in gamma_1 .. gamma_r
  long box = 0;     // |coefficient| <= r l
  long tried = 0;
  PrecisionValue norm;   // max ||y_i||
  PrecisionValue bound;  // r^2 l (C1^d sqrt D)^{1/(d-r)}
  bool bound_ok = false;
  SpanCheck span;
};

/// Searches y in (Z gamma_1 + ... + Z gamma_r)^s, coefficients by increasing
/// max-norm then in the order 0, 1, -1, 2, -2, ..., until the monomials S(y)
/// are independent. Throws if the box is exhausted.
inline FindY find_y(const FieldByPolynomial& K, const ReducedBasis& rb, int s, int l, int r, const std::vector<Tuple>& S,
                    Precision prec = {}) {
  const int d = K.d;
  if (!(2 * r > d) || r > d) throw PreconditionError("need d/2 < r <= d");
  if (static_cast<int>(S.size()) != r) throw PreconditionError("|S| must equal r");
  FindY out;
  out.box = static_cast<long>(r) * l;
  const int n = r * s;
  auto value = [](long code) { return code % 2 ? (code + 1) / 2 : -code / 2; };
  for (long R = 1; R <= out.box; ++R) {
    std::vector<long> code(static_cast<std::size_t>(n), 0);
    for (;;) {
      long mx = 0;
      for (long c : code) mx = std::max(mx, std::labs(value(c)));
      if (mx == R) {
        ++out.tried;
        std::vector<Elem> y;
        std::vector<std::vector<long>> coeffs;
        for (int i = 0; i < s; ++i) {
          Elem e(static_cast<std::size_t>(d), 0);
          coeffs.emplace_back();
          for (int j = 0; j < r; ++j) {
            long c = value(code[static_cast<std::size_t>(i * r + j)]);
            coeffs.back().push_back(c);
            for (int t = 0; t < d; ++t) e[static_cast<std::size_t>(t)] += c * rb.basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
          }
          y.push_back(e);
        }
        std::vector<Elem> sy;
        for (const auto& k : S) sy.push_back(monomial(K, y, k));
        if (span_rank(sy) == r) {
          out.y = y;
          out.coefficients = coeffs;
          out.span = span_doubling_check(K, y, S);
          const PrecisionValue sqrtD = sqrt(PrecisionValue::from_int(K.abs_disc(), prec));
          const PrecisionValue C1d = pow(PrecisionValue::from_rational(rb.C1, prec), d);
          out.bound = PrecisionValue(static_cast<long>(r) * r * l, prec) * pow(C1d * sqrtD, 1 / PrecisionValue(d - r, prec));
          out.norm = K.sup_norm(y[0], prec);
          for (std::size_t i = 1; i < y.size(); ++i) out.norm = max(out.norm, K.sup_norm(y[i], prec));
          out.bound_ok = certainly_less_equal(out.norm, out.bound);
          return out;
        }
      }
      // odometer over codes 0 .. 2R
      std::size_t pos = 0;
      while (pos < code.size() && code[pos] == 2 * R) code[pos++] = 0;
      if (pos == code.size()) break;
      ++code[pos];
    }
  }
  throw PreconditionError("no y found inside the coefficient box for " + K.label());
}

// Count bounds (log2 of the bound on the number of fields)

/// (C3 d)^{d exp(C4 sqrt(log2 d))} X^{exp(C5 sqrt(log2 d))}, as log2.
inline PrecisionValue degree_count_log2(int d, const PrecisionValue& X, const mpq_class& C3, const mpq_class& C4,
                                    const mpq_class& C5) {
  if (d < 200) throw PreconditionError("the degree-d form needs d >= 200");
  const Precision prec = X.precision();
  const PrecisionValue sl = sqrt(log2(PrecisionValue(d, prec)));
  const PrecisionValue c3d = PrecisionValue::from_rational(C3, prec) * d;
  return log2(c3d) * d * exp(PrecisionValue::from_rational(C4, prec) * sl) +
         log2(X) * exp(PrecisionValue::from_rational(C5, prec) * sl);
}

/// C6 log2 X exp(C7 sqrt(log2 log2 X)), a bound on log2 N(X).
inline PrecisionValue count_bound_log2(const PrecisionValue& X, const mpq_class& C6, const mpq_class& C7) {
  const Precision prec = X.precision();
  if (!certainly_less_equal(PrecisionValue(2, prec), X)) throw PreconditionError("X must be at least 2");
  const PrecisionValue L = log2(X);
  return PrecisionValue::from_rational(C6, prec) * L * exp(PrecisionValue::from_rational(C7, prec) * sqrt(log2(L)));
}

/// C(eps) (log2 X)^{1 + eps}.
inline PrecisionValue polylog_count_log2(const PrecisionValue& X, const mpq_class& C, const mpq_class& eps) {
  const Precision prec = X.precision();
  if (!certainly_less_equal(PrecisionValue(2, prec), X)) throw PreconditionError("X must be at least 2");
  return PrecisionValue::from_rational(C, prec) * pow(log2(X), 1 + PrecisionValue::from_rational(eps, prec));
}

struct CountComparison {
  long X = 0;
  PrecisionValue log2_bound;
  long exact_quadratic = 0;  // quadratic fields with |D| < X
  bool holds = false;        // log2(exact) < bound
};

inline CountComparison count_bound_vs_quadratic(long X, const mpq_class& C6 = 1, const mpq_class& C7 = 1, Precision prec = {}) {
  CountComparison c;
  c.X = X;
  c.log2_bound = count_bound_log2(PrecisionValue(X, prec), C6, C7);
  c.exact_quadratic = static_cast<long>(enumerate_fundamental_discriminants(X - 1).size());
  c.holds = certainly_less(log2(PrecisionValue(std::max(c.exact_quadratic, 1L), prec)), c.log2_bound);
  return c;
}

// Per-field certificate

struct FieldCertificate {
  std::string label;
  int degree = 0;
  mpz_class disc;
  bool maximal = false;
  ReducedBasis basis;
  TraceCheck trace;                 // z = reduced basis, C = {1, gamma_2, ..., gamma_d}
  std::optional<Parameters> params;
  std::optional<FindY> y;
  std::optional<TraceCheck> trace_y;  // z = independent monomials of S(2l)(y), C = {1, y}
  bool ok = false;
};

inline FieldCertificate certify_field(const FieldByPolynomial& K, const mpq_class& C1 = 2, Precision prec = {}) {
  FieldCertificate c;
  c.label = K.label();
  c.degree = K.d;
  c.disc = K.disc_f;
  c.maximal = K.maximal;
  c.basis = reduced_basis(K, C1, prec, 4, false);
  std::vector<Elem> C{K.one()};
  for (std::size_t i = 0; i < c.basis.basis.size(); ++i)
    if (c.basis.basis[i] != K.one() && c.basis.basis[i] != Elem(K.one().size(), 0)) C.push_back(c.basis.basis[i]);
  c.trace = trace_matrices(K, c.basis.basis, C);
  bool ok = (!K.maximal || c.basis.holds()) && c.trace.generates && c.trace.matches && c.trace.multiplicative;
  if (K.d >= 3) {
    c.params = parameters(K.d);
    auto ms = monomial_sets(c.params->s, c.params->l);
    std::vector<Tuple> S(ms.S.begin(), ms.S.begin() + c.params->r);
    c.y = find_y(K, c.basis, c.params->s, c.params->l, c.params->r, S, prec);
    // a basis of K among S(2l)(y), in the fixed order of S(2l)
    std::vector<Elem> z;
    for (const auto& k : ms.S2) {
      Elem e = monomial(K, c.y->y, k);
      std::vector<Elem> trial = z;
      trial.push_back(e);
      if (span_rank(trial) > static_cast<int>(z.size())) z = trial;
      if (static_cast<int>(z.size()) == K.d) break;
    }
    std::vector<Elem> Cy{K.one()};
    for (const auto& yi : c.y->y) Cy.push_back(yi);
    c.trace_y = trace_matrices(K, z, Cy);
    ok = ok && c.y->bound_ok && c.y->span.holds && c.trace_y->generates && c.trace_y->matches && c.trace_y->multiplicative;
  }
  c.ok = ok;
  return c;
}

}  // namespace covol::appendix
