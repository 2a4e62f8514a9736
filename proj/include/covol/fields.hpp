#pragma once

// Quadratic fields (and Q): discriminants, class numbers, splitting of
// primes, squarefree ideal counts, zeta values and discriminant bounds.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "arith.hpp"
#include "numeric.hpp"
#include "zeta.hpp"

namespace covol {

inline bool is_fundamental_discriminant(long D) {
  if (D == 0 || D == 1) return false;
  long m = D % 4;
  if (m < 0) m += 4;
  if (m == 1) return arith::is_squarefree(D);
  if (m != 0) return false;
  long q = D / 4;
  long r = q % 4;
  if (r < 0) r += 4;
  return (r == 2 || r == 3) && arith::is_squarefree(q);
}

/// Q (disc 1) or a quadratic field (fundamental disc D).
class BaseField {
 public:
  BaseField() = default;
  static BaseField rational() { return BaseField(); }
  static BaseField quadratic(long D) {
    if (!is_fundamental_discriminant(D)) throw PreconditionError(std::to_string(D) + " is not a fundamental discriminant");
    BaseField k;
    k.disc_ = D;
    return k;
  }
  /// CLI convention: 0 and 1 both denote Q.
  static BaseField from_disc(long D) { return (D == 0 || D == 1) ? rational() : quadratic(D); }

  bool is_rational() const { return disc_ == 1; }
  long disc() const { return disc_; }
  long abs_disc() const { return std::labs(disc_); }
  int degree() const { return is_rational() ? 1 : 2; }
  int r1() const { return is_rational() ? 1 : (disc_ > 0 ? 2 : 0); }
  int r2() const { return (!is_rational() && disc_ < 0) ? 1 : 0; }
  /// Number of archimedean places.
  int a() const { return r1() + r2(); }
  std::string name() const { return is_rational() ? "Q" : "Q(sqrt(" + std::to_string(disc_ % 4 == 0 ? disc_ / 4 : disc_) + "))"; }

  friend bool operator==(const BaseField&, const BaseField&) = default;

 private:
  long disc_ = 1;
};

struct QuadraticField {
  long disc = 0;
  int r1 = 0;
  int r2 = 0;
  std::optional<long> class_number;

  int degree() const { return 2; }
  int a() const { return r1 + r2; }
  BaseField field() const { return BaseField::quadratic(disc); }

  static QuadraticField make(long D) {
    if (!is_fundamental_discriminant(D)) throw PreconditionError(std::to_string(D) + " is not a fundamental discriminant");
    return QuadraticField{D, D > 0 ? 2 : 0, D > 0 ? 0 : 1, std::nullopt};
  }
  friend bool operator==(const QuadraticField&, const QuadraticField&) = default;
};

/// Ordering used everywhere: |D| ascending, negative before positive.
inline bool disc_order(long a, long b) {
  long aa = std::labs(a), ab = std::labs(b);
  return aa != ab ? aa < ab : a < b;
}

/// Fundamental discriminants with lo <= |D| <= hi, in disc_order.
inline std::vector<QuadraticField> enumerate_fundamental_discriminants(long lo, long hi) {
  std::vector<QuadraticField> out;
  lo = std::max(lo, 1L);
  if (hi < lo) return out;
  // squarefree sieve on [0, hi]
  std::vector<bool> sf(static_cast<std::size_t>(hi + 1), true);
  sf[0] = false;
  for (long p = 2; p * p <= hi; ++p) {
    for (long j = p * p; j <= hi; j += p * p) sf[static_cast<std::size_t>(j)] = false;
  }
  auto fundamental = [&](long D) {
    long a = std::labs(D);
    long m = ((D % 4) + 4) % 4;
    if (m == 1) return D != 1 && sf[static_cast<std::size_t>(a)];
    if (m != 0) return false;
    long q = D / 4;
    long r = ((q % 4) + 4) % 4;
    return (r == 2 || r == 3) && sf[static_cast<std::size_t>(a / 4)];
  };
  for (long a = lo; a <= hi; ++a) {
    if (fundamental(-a)) out.push_back(QuadraticField::make(-a));
    if (fundamental(a)) out.push_back(QuadraticField::make(a));
  }
  return out;
}

inline std::vector<QuadraticField> enumerate_fundamental_discriminants(long X) {
  return enumerate_fundamental_discriminants(1, X);
}

/// Contiguous partition of [1, X] into `shards` ranges (some possibly empty).
inline std::vector<std::pair<long, long>> shard_ranges(long X, int shards) {
  if (shards < 1) throw PreconditionError("shard count must be positive");
  std::vector<std::pair<long, long>> out;
  long start = 1;
  for (int i = 0; i < shards; ++i) {
    long end = X * (i + 1) / shards;
    out.emplace_back(start, end);
    start = end + 1;
  }
  return out;
}

/// Upper bound 100 (pi/12)^deg D on class numbers.
inline PrecisionValue h_bound(const mpz_class& D, int degree, Precision prec = {}) {
  return pow(PrecisionValue::pi(prec) / 12, degree) * 100 * PrecisionValue::from_int(D, prec);
}

namespace detail {

inline long count_reduced_forms(long D) {
  const long absD = -D;
  long h = 0;
  for (long a = 1; 3 * a * a <= absD; ++a) {
    for (long b = -a + 1; b <= a; ++b) {
      if (((b - D) % 2) != 0) continue;
      long num = b * b - D;
      if (num % (4 * a) != 0) continue;
      long c = num / (4 * a);
      if (c < a) continue;
      if (b < 0 && a == c) continue;
      ++h;
    }
  }
  return h;
}

}  // namespace detail

/// Memo for imaginary quadratic class numbers. Reads and writes never change
/// results; safe for concurrent use.
class ClassNumberCache {
 public:
  static ClassNumberCache& global() {
    static ClassNumberCache c;
    return c;
  }
  std::optional<long> get(long D) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = memo_.find(D);
    if (it == memo_.end()) return std::nullopt;
    return it->second;
  }
  void put(long D, long h) {
    std::lock_guard<std::mutex> lock(mu_);
    memo_.emplace(D, h);
  }

 private:
  mutable std::mutex mu_;
  std::map<long, long> memo_;
};

/// Number of reduced primitive forms of discriminant D < 0. Also checks the
/// class number bound 100 (pi/12)^2 |D|.
inline long class_number_imaginary(long D) {
  if (D >= 0) throw PreconditionError("class_number_imaginary needs D < 0");
  if (!is_fundamental_discriminant(D)) throw PreconditionError(std::to_string(D) + " is not a fundamental discriminant");
  if (auto h = ClassNumberCache::global().get(D)) return *h;
  long h = detail::count_reduced_forms(D);
  if (!certainly_less_equal(PrecisionValue(h, Precision{20}), h_bound(mpz_class(-D), 2, Precision{20}))) {
    throw std::logic_error("class number exceeds the h bound for D = " + std::to_string(D));
  }
  ClassNumberCache::global().put(D, h);
  return h;
}

inline long class_number_imaginary(const QuadraticField& k) { return class_number_imaginary(k.disc); }

/// Enumeration split over `shards` threads on contiguous |D| ranges; the
/// concatenation is already in disc_order, so output does not depend on shards.
inline std::vector<QuadraticField> enumerate_fields(long X, int shards = 1, bool class_numbers = false) {
  auto ranges = shard_ranges(X, shards);
  std::vector<std::vector<QuadraticField>> parts(ranges.size());
  std::vector<std::exception_ptr> errors(ranges.size());
  std::vector<std::thread> pool;
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    pool.emplace_back([&, i] {
      try {
        parts[i] = enumerate_fundamental_discriminants(ranges[i].first, ranges[i].second);
        if (class_numbers)
          for (auto& k : parts[i])
            if (k.disc < 0) k.class_number = class_number_imaginary(k.disc);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<QuadraticField> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

enum class PlaceTag { rational, split_plus, split_minus, inert, ramified };

inline std::string to_string(PlaceTag t) {
  switch (t) {
    case PlaceTag::rational: return "rational";
    case PlaceTag::split_plus: return "split+";
    case PlaceTag::split_minus: return "split-";
    case PlaceTag::inert: return "inert";
    case PlaceTag::ramified: return "ramified";
  }
  return "?";
}

enum class Splitting { split, inert, ramified };

inline std::string to_string(Splitting s) {
  switch (s) {
    case Splitting::split: return "split";
    case Splitting::inert: return "inert";
    case Splitting::ramified: return "ramified";
  }
  return "?";
}

inline Splitting kronecker_splitting(long D, long p) {
  if (!arith::is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  int c = arith::kronecker(D, p);
  if (c == 0) return Splitting::ramified;
  return c > 0 ? Splitting::split : Splitting::inert;
}

inline Splitting kronecker_splitting(const QuadraticField& k, long p) { return kronecker_splitting(k.disc, p); }

/// A finite place: prime ideal above p.
struct Place {
  long p = 2;
  PlaceTag tag = PlaceTag::rational;

  long norm() const { return tag == PlaceTag::inert ? p * p : p; }
  friend auto operator<=>(const Place&, const Place&) = default;
};

inline std::vector<Place> places_above(const BaseField& k, long p) {
  if (!arith::is_prime(p)) throw PreconditionError(std::to_string(p) + " is not prime");
  if (k.is_rational()) return {Place{p, PlaceTag::rational}};
  switch (kronecker_splitting(k.disc(), p)) {
    case Splitting::split: return {Place{p, PlaceTag::split_plus}, Place{p, PlaceTag::split_minus}};
    case Splitting::inert: return {Place{p, PlaceTag::inert}};
    case Splitting::ramified: return {Place{p, PlaceTag::ramified}};
  }
  return {};
}

inline bool is_place_of(const BaseField& k, const Place& v) {
  if (!arith::is_prime(v.p)) return false;
  auto ps = places_above(k, v.p);
  return std::find(ps.begin(), ps.end(), v) != ps.end();
}

/// A squarefree ideal as a set of distinct places.
class PlaceSet {
 public:
  PlaceSet() = default;
  explicit PlaceSet(std::vector<Place> places) : places_(std::move(places)) {
    std::sort(places_.begin(), places_.end());
    if (std::adjacent_find(places_.begin(), places_.end()) != places_.end()) {
      throw PreconditionError("place set has a repeated place");
    }
  }
  const std::vector<Place>& places() const { return places_; }
  std::size_t size() const { return places_.size(); }
  mpz_class norm() const {
    mpz_class n = 1;
    for (const auto& v : places_) n *= v.norm();
    return n;
  }

 private:
  std::vector<Place> places_;
};

namespace detail {

// Number of squarefree ideals of norm exactly p^e.
inline long local_squarefree_count(const BaseField& k, long p, int e) {
  if (k.is_rational()) return e == 1 ? 1 : 0;
  switch (kronecker_splitting(k.disc(), p)) {
    case Splitting::split: return e == 1 ? 2 : (e == 2 ? 1 : 0);
    case Splitting::inert: return e == 2 ? 1 : 0;
    case Splitting::ramified: return e == 1 ? 1 : 0;
  }
  return 0;
}

}  // namespace detail

/// Q_k(t) for every t in 0..x (index t), by a multiplicative sieve. Entry 0 is 0.
inline std::vector<std::int64_t> squarefree_ideal_counts(const BaseField& k, long x) {
  if (x < 1) throw PreconditionError("x must be at least 1");
  auto spf = arith::smallest_prime_factors(x);
  std::vector<std::int32_t> a(static_cast<std::size_t>(x + 1), 0);
  a[1] = 1;
  std::map<long, std::array<long, 3>> local;  // per prime: counts for e = 1, 2 (e >= 3 gives 0)
  for (long n = 2; n <= x; ++n) {
    long p = spf[static_cast<std::size_t>(n)];
    long m = n;
    int e = 0;
    while (m % p == 0) {
      m /= p;
      ++e;
    }
    if (e >= 3) continue;
    auto it = local.find(p);
    if (it == local.end()) {
      it = local.emplace(p, std::array<long, 3>{0, detail::local_squarefree_count(k, p, 1),
                                                 detail::local_squarefree_count(k, p, 2)}).first;
    }
    a[static_cast<std::size_t>(n)] = static_cast<std::int32_t>(it->second[static_cast<std::size_t>(e)] * a[static_cast<std::size_t>(m)]);
  }
  std::vector<std::int64_t> cum(static_cast<std::size_t>(x + 1), 0);
  for (long n = 1; n <= x; ++n) cum[static_cast<std::size_t>(n)] = cum[static_cast<std::size_t>(n - 1)] + a[static_cast<std::size_t>(n)];
  return cum;
}

/// Explicit bound zeta(2)^deg x^2 on Q_k(x).
inline PrecisionValue squarefree_count_bound(const BaseField& k, long x, Precision prec = {}) {
  return pow(zeta::riemann(2, prec), k.degree()) * pow(PrecisionValue(x, prec), 2);
}

/// Number of squarefree ideals of norm <= x, the unit ideal included.
inline std::int64_t squarefree_ideal_count(const BaseField& k, long x) {
  std::int64_t q = squarefree_ideal_counts(k, x).back();
  if (!certainly_less_equal(PrecisionValue::from_int(mpz_class(static_cast<long>(q)), Precision{20}),
                            squarefree_count_bound(k, x, Precision{20}))) {
    throw std::logic_error("squarefree ideal count exceeds its explicit bound");
  }
  return q;
}

inline constexpr long kOracleLimit = 1000000;

/// Norms of all squarefree ideals of norm <= x (with multiplicity), sorted.
/// Brute force: list prime ideals, then enumerate subset products.
inline std::vector<long> squarefree_ideal_norms_oracle(const BaseField& k, long x) {
  if (x < 1) throw PreconditionError("x must be at least 1");
  if (x > kOracleLimit) throw PreconditionError("oracle limited to x <= 10^6");
  std::vector<long> primes;  // norms of prime ideals, ascending
  for (long p : arith::primes_up_to(x)) {
    for (const Place& v : places_above(k, p)) {
      if (v.norm() <= x) primes.push_back(v.norm());
    }
  }
  std::sort(primes.begin(), primes.end());
  std::vector<long> out;
  // iterative DFS over (index, product)
  std::vector<std::pair<std::size_t, long>> stack{{0, 1}};
  while (!stack.empty()) {
    auto [i, prod] = stack.back();
    stack.pop_back();
    out.push_back(prod);
    for (std::size_t j = i; j < primes.size(); ++j) {
      if (prod > x / primes[j]) break;
      stack.emplace_back(j + 1, prod * primes[j]);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::int64_t squarefree_ideal_count_oracle(const BaseField& k, long x) {
  return static_cast<std::int64_t>(squarefree_ideal_norms_oracle(k, x).size());
}

enum class DirichletKind { zeta, character, dedekind };

/// zeta(s), L(s, chi_D) or zeta_k(s) = zeta(s) L(s, chi_D).
/// At s = 1 only the character value exists; it is computed by the
/// truncated series and, for D < 0, by the class number formula. The two
/// enclosures must overlap; the tighter one is returned.
inline PrecisionValue dirichlet_value(const BaseField& k, long s, DirichletKind kind, Precision prec = {}) {
  if (s < 1) throw PreconditionError("s must be positive");
  if (s == 1) {
    if (kind != DirichletKind::character || k.is_rational()) throw PreconditionError("pole at s = 1");
    PrecisionValue series = zeta::l_at_one_series(k.disc(), 200000, prec);
    if (k.disc() > 0) return series;
    PrecisionValue closed = zeta::l_at_one_class_number(k.disc(), class_number_imaginary(k.disc()), prec);
    if (!series.overlaps(closed)) throw std::logic_error("L(1, chi) routes disagree");
    return closed;
  }
  switch (kind) {
    case DirichletKind::zeta: return zeta::riemann(s, prec);
    case DirichletKind::character: return zeta::dirichlet_l(k.disc(), s, prec);
    case DirichletKind::dedekind:
      if (k.is_rational()) return zeta::riemann(s, prec);
      return zeta::riemann(s, prec) * zeta::dirichlet_l(k.disc(), s, prec);
  }
  return zeta::riemann(s, prec);
}

/// Residue of zeta_k at s = 1 divided by zeta_k(2): the density of
/// squarefree ideals.
inline PrecisionValue squarefree_density(const BaseField& k, Precision prec = {}) {
  if (k.is_rational()) return 1 / zeta::riemann(2, prec);
  return dirichlet_value(k, 1, DirichletKind::character, prec) / dirichlet_value(k, 2, DirichletKind::dedekind, prec);
}

// Discriminant bounds

/// ((pi/4)^{r2} d^d / d!)^2, Minkowski's lower bound for |D_k| at degree d.
inline PrecisionValue minkowski_min_disc(int d, int r2, Precision prec = {}) {
  if (d < 1 || r2 < 0 || 2 * r2 > d) throw PreconditionError("invalid signature");
  mpz_class dd;
  mpz_ui_pow_ui(dd.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(d));
  mpq_class ratio(dd, arith::factorial(static_cast<unsigned long>(d)));
  ratio.canonicalize();
  PrecisionValue m = pow(PrecisionValue::pi(prec) / 4, r2) * PrecisionValue::from_rational(ratio, prec);
  return pow(m, 2);
}

/// Largest d with minkowski_min_disc(d, floor(d/2)) <= D. Undecided
/// comparisons are resolved upward, which keeps the result an upper bound.
inline int max_degree_for_disc(const mpz_class& D, Precision prec = {}) {
  if (D < 1) throw PreconditionError("discriminant must be positive");
  PrecisionValue Dv = PrecisionValue::from_int(D, prec);
  // the bound is strictly increasing in d
  int best = 1;
  for (int d = 2; !certainly_less(Dv, minkowski_min_disc(d, d / 2, prec)); ++d) best = d;
  return best;
}

struct OdlyzkoBound {
  bool applicable = false;
  PrecisionValue bound;
};

/// 55^{r1} 21^{2 r2}, valid for degree above 10^5.
inline OdlyzkoBound odlyzko(int r1, int r2, Precision prec = {}) {
  const long d = static_cast<long>(r1) + 2L * r2;
  return OdlyzkoBound{d > 100000, pow(PrecisionValue(55, prec), r1) * pow(PrecisionValue(21, prec), 2L * r2)};
}

/// min over d of log2(minkowski_min_disc(d, floor(d/2)))/d: the constant c with
/// [k:Q] <= log2(D_k)/c.
inline PrecisionValue minkowski_log_constant(Precision prec = {}) {
  PrecisionValue best = log2(minkowski_min_disc(2, 1, prec)) / 2;
  for (int d = 3; d <= 60; ++d) best = min(best, log2(minkowski_min_disc(d, d / 2, prec)) / d);
  return best;
}

}  // namespace covol
