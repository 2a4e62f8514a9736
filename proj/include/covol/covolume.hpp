#pragma once

// Prasad's volume formula, the index bound for normalizers of principal
// arithmetic subgroups, the lower-bound function B(G/k) and the class number
// bound, as audited interval computations.

#include <gmpxx.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arith.hpp"
#include "fields.hpp"
#include "lie_data.hpp"
#include "numeric.hpp"
#include "zeta.hpp"

namespace covol {

/// The pair (k, l). For inner forms l = k.
struct ExtensionPair {
  BaseField k;
  int twist_degree = 1;
  mpz_class ext_disc = 1;  // |D_l|
  mpz_class rel_disc = 1;  // D_{l/k} = D_l / D_k^{[l:k]}
  std::optional<long> l_disc_signed;  // when l is Q or quadratic over Q
  std::optional<long> h_l_exact;
  PrecisionValue h_l_upper;  // exact value or the 100 (pi/12)^deg D_l bound
  int a_l = 1;               // archimedean places of l, or its upper bound deg(l)
  bool a_l_exact = true;

  int degree_l() const { return k.degree() * twist_degree; }

  /// l = k.
  static ExtensionPair inner(const BaseField& k, Precision prec = {}) {
    ExtensionPair p;
    p.k = k;
    p.ext_disc = k.abs_disc();
    p.l_disc_signed = k.disc();
    p.a_l = k.a();
    if (k.is_rational()) {
      p.h_l_exact = 1;
    } else if (k.disc() < 0) {
      p.h_l_exact = class_number_imaginary(k.disc());
    }
    p.h_l_upper = p.h_l_exact ? PrecisionValue(*p.h_l_exact, prec) : h_bound(p.ext_disc, 2, prec);
    return p;
  }

  /// k = Q and l = Q(sqrt D_l) with D_l a fundamental discriminant.
  static ExtensionPair quadratic_over_q(long D_l, Precision prec = {}) {
    if (!is_fundamental_discriminant(D_l)) throw PreconditionError(std::to_string(D_l) + " is not a fundamental discriminant");
    ExtensionPair p;
    p.k = BaseField::rational();
    p.twist_degree = 2;
    p.ext_disc = std::labs(D_l);
    p.rel_disc = p.ext_disc;
    p.l_disc_signed = D_l;
    p.a_l = D_l > 0 ? 2 : 1;
    if (D_l < 0) p.h_l_exact = class_number_imaginary(D_l);
    p.h_l_upper = p.h_l_exact ? PrecisionValue(*p.h_l_exact, prec) : h_bound(p.ext_disc, 2, prec);
    return p;
  }

  /// General l given only by |D_l| and [l:k]; h_l and a(l) enter through bounds.
  static ExtensionPair by_discriminant(const BaseField& k, const mpz_class& D_l, int twist, Precision prec = {}) {
    if (twist < 1 || twist > 3) throw PreconditionError("[l:k] must be 1, 2 or 3");
    if (twist == 1) {
      if (D_l != k.abs_disc()) throw PreconditionError("l = k needs D_l = D_k");
      return inner(k, prec);
    }
    mpz_class base;
    mpz_pow_ui(base.get_mpz_t(), mpz_class(k.abs_disc()).get_mpz_t(), static_cast<unsigned long>(twist));
    if (D_l < 1 || D_l % base != 0) throw PreconditionError("D_k^[l:k] must divide D_l");
    if (k.is_rational() && twist == 2) {
      // recover the signed discriminant if it is unambiguous
      long d = D_l.get_si();
      bool neg = is_fundamental_discriminant(-d), pos = is_fundamental_discriminant(d);
      if (neg != pos) return quadratic_over_q(neg ? -d : d, prec);
    }
    ExtensionPair p;
    p.k = k;
    p.twist_degree = twist;
    p.ext_disc = D_l;
    p.rel_disc = D_l / base;
    p.a_l = p.degree_l();
    p.a_l_exact = false;
    p.h_l_upper = h_bound(D_l, p.degree_l(), prec);
    return p;
  }
};

/// One factor of the volume formula: value = rational * transcendental.
struct VolumeFactor {
  std::string name;
  mpq_class rational = 1;
  std::string transcendental_expr;  // empty when the factor is rational
  PrecisionValue transcendental;
  PrecisionValue value;
};

struct EulerOverride {
  Place place;
  PrecisionValue factor;
};

struct VolumeBreakdown {
  std::vector<VolumeFactor> factors;  // disc, rel, archimedean, tamagawa, euler
  PrecisionValue total;
  std::vector<EulerOverride> overrides;

  const VolumeFactor& factor(const std::string& name) const {
    for (const auto& f : factors) {
      if (f.name == name) return f;
    }
    throw std::out_of_range("no factor " + name);
  }

  /// The product of the factor intervals lies in total, and the exact
  /// rational part times the transcendental part overlaps it.
  bool audit() const {
    PrecisionValue prod(1, total.precision());
    mpq_class rat = 1;
    PrecisionValue trans(1, total.precision());
    for (const auto& f : factors) {
      prod *= f.value;
      rat *= f.rational;
      trans *= f.transcendental;
    }
    PrecisionValue recomposed = PrecisionValue::from_rational(rat, total.precision()) * trans;
    return total.contains(prod) && recomposed.overlaps(total);
  }
};

namespace detail {

// D^{e/2} as rational * sqrt part.
inline VolumeFactor half_power_factor(const std::string& name, const mpz_class& D, long e, Precision prec) {
  VolumeFactor f;
  f.name = name;
  mpz_class r;
  mpz_pow_ui(r.get_mpz_t(), D.get_mpz_t(), static_cast<unsigned long>(e / 2));
  f.rational = r;
  if (e % 2 == 1 && D != 1) {
    f.transcendental_expr = "sqrt(" + D.get_str() + ")";
    f.transcendental = sqrt(PrecisionValue::from_int(D, prec));
  } else {
    f.transcendental = PrecisionValue(1, prec);
  }
  f.value = PrecisionValue::from_rational(f.rational, prec) * f.transcendental;
  return f;
}

// (prod m_i! / (2 pi)^{m_i+1})^deg
inline VolumeFactor archimedean_factor(const GroupData& g, int deg, Precision prec) {
  VolumeFactor f;
  f.name = "archimedean";
  mpq_class r = 1;
  long pi_power = 0;
  for (int m : g.exponents) {
    mpz_class two;
    mpz_ui_pow_ui(two.get_mpz_t(), 2, static_cast<unsigned long>(m + 1));
    r *= mpq_class(arith::factorial(static_cast<unsigned long>(m)), two);
    pi_power += m + 1;
  }
  r.canonicalize();
  mpq_class rd = 1;
  for (int i = 0; i < deg; ++i) rd *= r;
  f.rational = rd;
  f.transcendental_expr = "pi^-" + std::to_string(pi_power * deg);
  f.transcendental = pow(PrecisionValue::pi(prec), -pi_power * deg);
  f.value = PrecisionValue::from_rational(f.rational, prec) * f.transcendental;
  return f;
}

inline mpq_class inverse_one_minus(const mpq_class& t) {
  mpq_class r = 1 / (1 - t);
  r.canonicalize();
  return r;
}

inline mpq_class qpow_inv(const mpz_class& q, long e) {
  mpz_class d;
  mpz_pow_ui(d.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(e));
  return mpq_class(1, 1) / mpq_class(d);
}

}  // namespace detail

inline bool euler_recipe_supported(const GroupData& g, const ExtensionPair& pair) {
  if (g.twist_degree != pair.twist_degree) return false;
  if (g.twist_degree == 1) return true;
  return g.family == Family::A && g.rank == 2 && pair.k.is_rational() && pair.l_disc_signed.has_value();
}

namespace detail {

inline void check_consistent(const GroupData& g, const ExtensionPair& pair) {
  if (g.twist_degree != pair.twist_degree) {
    throw PreconditionError("twist of " + g.name() + " does not match [l:k] = " + std::to_string(pair.twist_degree));
  }
  if (g.twist_degree == 6 && pair.twist_degree != 3) throw PreconditionError("6D4 needs [l:k] = 3");
}

}  // namespace detail

/// Places of k above p at which the built-in recipe does not apply (ramified
/// in l/k for the outer case).
inline bool needs_override(const GroupData& g, const ExtensionPair& pair, long p) {
  if (g.twist_degree == 1) return false;
  return mpz_divisible_ui_p(pair.rel_disc.get_mpz_t(), static_cast<unsigned long>(p)) != 0;
}

/// Local factor of the recipe product at v, exactly: prod (1 - q^{-(m_i+1)})^{-1}
/// for inner forms; (1 - p^-2)^{-1} (1 - chi(p) p^-3)^{-1} for 2A2 over Q.
inline mpq_class euler_local_recipe(const GroupData& g, const ExtensionPair& pair, const Place& v) {
  if (!euler_recipe_supported(g, pair)) throw PreconditionError("no built-in Euler recipe for " + g.name());
  mpz_class q = v.norm();
  mpq_class e = 1;
  if (g.twist_degree == 1) {
    for (int m : g.exponents) e *= detail::inverse_one_minus(detail::qpow_inv(q, m + 1));
    return e;
  }
  int c = zeta::chi(*pair.l_disc_signed, v.p);
  e = detail::inverse_one_minus(detail::qpow_inv(q, 2)) * detail::inverse_one_minus(c * detail::qpow_inv(q, 3));
  e.canonicalize();
  return e;
}

/// q^dim / |G(F_q)| from the finite group orders: the hyperspecial local
/// factor at an unramified place.
inline mpq_class euler_local_oracle(const GroupData& g, const ExtensionPair& pair, const Place& v) {
  mpz_class q = v.norm();
  mpz_class qd;
  mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(g.dim));
  int twist = 1;
  if (g.twist_degree == 2) {
    if (!euler_recipe_supported(g, pair)) throw PreconditionError("no finite group order for " + g.name());
    twist = zeta::chi(*pair.l_disc_signed, v.p) == -1 ? 2 : 1;
    if (zeta::chi(*pair.l_disc_signed, v.p) == 0) throw PreconditionError("ramified place has no hyperspecial factor");
  } else if (g.twist_degree != 1) {
    throw PreconditionError("no finite group order for " + g.name());
  }
  mpq_class r(qd, finite_group_order(g.family, g.rank, twist, q.get_si()));
  r.canonicalize();
  return r;
}

/// Checks recipe == oracle at every place above every prime p <= P (skipping
/// places that need overrides). Returns the number of places checked.
inline long validate_euler_recipe(const GroupData& g, const ExtensionPair& pair, long P) {
  long checked = 0;
  for (long p : arith::primes_up_to(P)) {
    if (needs_override(g, pair, p)) continue;
    for (const Place& v : places_above(pair.k, p)) {
      if (euler_local_recipe(g, pair, v) != euler_local_oracle(g, pair, v)) {
        throw std::logic_error("Euler recipe disagrees with |G(F_q)| at p = " + std::to_string(p));
      }
      ++checked;
    }
  }
  return checked;
}

/// E(P) = prod_v e_v for the all-hyperspecial configuration, with per-place
/// overrides replacing the recipe factor. Split: prod zeta_k(m_i+1).
/// 2A2 over Q: zeta(2) L(3, chi_{D_l}); every ramified prime needs an override.
inline PrecisionValue euler_product(const GroupData& g, const ExtensionPair& pair, Precision prec = {},
                                    const std::vector<EulerOverride>& overrides = {}) {
  detail::check_consistent(g, pair);
  if (!euler_recipe_supported(g, pair)) {
    throw PreconditionError("Euler product of " + g.name() + " needs overrides at every place; not supported");
  }
  validate_euler_recipe(g, pair, 100);

  PrecisionValue E(1, prec);
  if (g.twist_degree == 1) {
    for (int m : g.exponents) E *= dirichlet_value(pair.k, m + 1, DirichletKind::dedekind, prec);
  } else {
    E = zeta::riemann(2, prec) * zeta::dirichlet_l(*pair.l_disc_signed, 3, prec);
  }

  std::vector<Place> seen;
  for (const auto& o : overrides) {
    if (!is_place_of(pair.k, o.place)) throw PreconditionError("override at a place not of k");
    if (std::find(seen.begin(), seen.end(), o.place) != seen.end()) throw PreconditionError("duplicate override");
    seen.push_back(o.place);
    if (!certainly_less(PrecisionValue(1, prec), o.factor)) throw PreconditionError("Euler factors must exceed 1");
    E = E * o.factor / PrecisionValue::from_rational(euler_local_recipe(g, pair, o.place), prec);
  }
  if (g.twist_degree != 1) {
    mpz_class rel = pair.rel_disc;
    for (long p : arith::primes_up_to(rel.get_si())) {
      if (!needs_override(g, pair, p)) continue;
      for (const Place& v : places_above(pair.k, p)) {
        if (std::find(seen.begin(), seen.end(), v) == seen.end()) {
          throw PreconditionError("missing Euler factor override at ramified p = " + std::to_string(p));
        }
      }
    }
  }
  return E;
}

/// Truncated recipe product over places above p <= P, as an interval.
inline PrecisionValue euler_product_truncated(const GroupData& g, const ExtensionPair& pair, long P, Precision prec = {}) {
  PrecisionValue E(1, prec);
  for (long p : arith::primes_up_to(P)) {
    for (const Place& v : places_above(pair.k, p)) {
      mpz_class q = v.norm();
      if (g.twist_degree == 1) {
        for (int m : g.exponents) {
          E /= 1 - PrecisionValue::from_rational(detail::qpow_inv(q, m + 1), prec);
        }
      } else {
        int c = zeta::chi(*pair.l_disc_signed, p);
        E /= 1 - PrecisionValue::from_rational(detail::qpow_inv(q, 2), prec);
        E /= 1 - PrecisionValue::from_rational(c * detail::qpow_inv(q, 3), prec);
      }
    }
  }
  return E;
}

/// Prasad's formula: D_k^{dim/2} D_{l/k}^{s/2} (prod m_i!/(2 pi)^{m_i+1})^{[k:Q]} tau E.
inline VolumeBreakdown principal_covolume(const GroupData& g, const ExtensionPair& pair, const PrecisionValue& euler,
                                          const std::vector<EulerOverride>& overrides = {}) {
  detail::check_consistent(g, pair);
  if (!certainly_less(PrecisionValue(1, euler.precision()), euler)) throw PreconditionError("E(P) must exceed 1");
  const Precision prec = euler.precision();
  VolumeBreakdown vb;
  vb.factors.push_back(detail::half_power_factor("disc", pair.k.abs_disc(), g.dim, prec));
  vb.factors.push_back(detail::half_power_factor("rel", pair.rel_disc, g.s, prec));
  vb.factors.push_back(detail::archimedean_factor(g, pair.k.degree(), prec));
  VolumeFactor tau;
  tau.name = "tamagawa";
  tau.transcendental = PrecisionValue(1, prec);
  tau.value = PrecisionValue(1, prec);
  vb.factors.push_back(tau);
  VolumeFactor e;
  e.name = "euler";
  e.transcendental_expr = "E(P)";
  e.transcendental = euler;
  e.value = euler;
  vb.factors.push_back(e);
  vb.total = PrecisionValue(1, prec);
  for (const auto& f : vb.factors) vb.total *= f.value;
  vb.overrides = overrides;
  return vb;
}

/// Convenience: all-hyperspecial covolume with the recipe Euler product.
inline VolumeBreakdown covolume(const GroupData& g, const ExtensionPair& pair, Precision prec = {},
                                const std::vector<EulerOverride>& overrides = {}) {
  return principal_covolume(g, pair, euler_product(g, pair, prec, overrides), overrides);
}

struct IndexBound {
  PrecisionValue value;
  std::optional<mpz_class> exact;  // when h_l is known exactly
};

/// n^{eps #S} 2 h_l^{eps'} n^{eps a(k) + eps' a(l) + eps #T} D_{l/k}^{eps''} prod #Xi.
inline IndexBound index_upper_bound(const GroupData& g, const ExtensionPair& pair, int num_S, int num_T,
                                    const std::vector<int>& xi_orders, Precision prec = {}) {
  detail::check_consistent(g, pair);
  if (num_S < 0 || num_T < 0) throw PreconditionError("counts must be non-negative");
  for (int xi : xi_orders) {
    if (xi < 1 || xi > g.rank + 1) throw PreconditionError("#Xi must lie in [1, r+1]");
  }
  const long n_exp = static_cast<long>(g.eps) * num_S + static_cast<long>(g.eps) * pair.k.a() +
                     static_cast<long>(g.eps_prime) * pair.a_l + static_cast<long>(g.eps) * num_T;
  mpz_class rest;
  mpz_ui_pow_ui(rest.get_mpz_t(), static_cast<unsigned long>(g.n), static_cast<unsigned long>(n_exp));
  rest *= 2;
  if (g.eps_dprime == 1) rest *= pair.rel_disc;
  for (int xi : xi_orders) rest *= xi;

  IndexBound out;
  // a(l) enters as an upper bound when not exact, which keeps this an upper bound
  if (pair.h_l_exact) {
    mpz_class h;
    mpz_ui_pow_ui(h.get_mpz_t(), static_cast<unsigned long>(*pair.h_l_exact), static_cast<unsigned long>(g.eps_prime));
    out.exact = rest * h;
    out.value = PrecisionValue::from_int(*out.exact, prec);
  } else {
    if (!certainly_less_equal(PrecisionValue(1, prec), pair.h_l_upper)) throw std::logic_error("h_l bound below 1");
    out.value = PrecisionValue::from_int(rest, prec) * pow(pair.h_l_upper, g.eps_prime);
  }
  return out;
}

/// Which lower-bound case applies to the type.
struct LowerBoundCase {
  std::string label;  // "i" .. "iv"
  mpq_class delta1;
  mpq_class delta2;
};

inline LowerBoundCase lower_bound_case(const GroupData& g) {
  if (g.rank >= 30) return {"i", mpq_class(g.dim, 2) - 2, 1};
  const bool b2 = (g.family == Family::B || g.family == Family::C) && g.rank == 2;  // C2 = B2
  if (g.family == Family::A && g.rank == 2) return {"iv", mpq_class(1, 100), mpq_class(1, 2)};
  if ((g.family == Family::A && g.rank == 3) || b2) return {"iii", mpq_class(1, 10), 1};
  return {"ii", 1, 1};
}

struct ThresholdCheck {
  LowerBoundCase which;
  PrecisionValue threshold;  // D_k^{delta1} D_{l/k}^{delta2}
  bool holds = false;        // false: k is one of the exceptional fields
};

struct BLowerBound {
  PrecisionValue B;
  PrecisionValue half_B;
  ThresholdCheck threshold_check;
};

namespace detail {

inline PrecisionValue b_value(const GroupData& g, const ExtensionPair& pair, Precision prec) {
  PrecisionValue D = PrecisionValue(pair.k.abs_disc(), prec);
  PrecisionValue B = half_power_factor("disc", pair.k.abs_disc(), g.dim, prec).value;
  B /= pow(PrecisionValue(g.n, prec), static_cast<long>(g.eps) * pair.k.a() + static_cast<long>(g.eps_prime) * pair.a_l);
  if (!certainly_less_equal(PrecisionValue(1, prec), pair.h_l_upper)) throw std::logic_error("h_l bound below 1");
  B /= pow(pair.h_l_upper, g.eps_prime);
  if (pair.rel_disc != 1) {
    B *= pow(PrecisionValue::from_int(pair.rel_disc, prec), PrecisionValue::from_rational(g.s_prime, prec));
  }
  B *= archimedean_factor(g, pair.k.degree(), prec).value;
  return B;
}

inline PrecisionValue power_q(const mpz_class& D, const mpq_class& e, Precision prec) {
  if (D == 1) return PrecisionValue(1, prec);
  return pow(PrecisionValue::from_int(D, prec), PrecisionValue::from_rational(e, prec));
}

}  // namespace detail

/// B(G/k) = D_k^{dim/2} n^{-eps a(k) - eps' a(l)} h_l^{-eps'} D_{l/k}^{s'} (prod m_i!/(2 pi)^{m_i+1})^{[k:Q]}.
/// With h_l replaced by its upper bound when unknown, B stays a lower bound.
/// The comparison with D_k^{delta1} D_{l/k}^{delta2} escalates precision up to
/// `max_doublings` times before throwing UndecidableError.
inline BLowerBound b_lower_bound(const GroupData& g, const ExtensionPair& pair, Precision prec = {}, int max_doublings = 4) {
  detail::check_consistent(g, pair);
  BLowerBound out;
  out.threshold_check.which = lower_bound_case(g);
  const auto& c = out.threshold_check.which;
  auto threshold = [&](Precision p) {
    return detail::power_q(pair.k.abs_disc(), c.delta1, p) * detail::power_q(pair.rel_disc, c.delta2, p);
  };
  out.B = detail::b_value(g, pair, prec);
  out.half_B = out.B / 2;
  out.threshold_check.threshold = threshold(prec);
  out.threshold_check.holds = decide_less_equal(
      [&](Precision p) { return std::pair{threshold(p), detail::b_value(g, pair, p)}; }, prec, max_doublings);
  return out;
}

struct LowerBoundExceptions {
  long max_abs_disc = 0;
  long checked = 0;
  std::vector<long> exceptions;  // imaginary quadratic D where B < D^delta1
  bool prefix = false;           // all exceptions precede every field that holds
};

/// Runs the lower-bound predicate over inner forms of g on imaginary quadratic
/// fields with |D| <= max_abs_disc, in |D| order.
inline LowerBoundExceptions lower_bound_exceptions(const GroupData& g, long max_abs_disc, Precision prec = {}) {
  if (!g.inner()) throw PreconditionError("exception scan uses l = k");
  LowerBoundExceptions out;
  out.max_abs_disc = max_abs_disc;
  out.prefix = true;
  bool seen_hold = false;
  for (const auto& k : enumerate_fundamental_discriminants(max_abs_disc)) {
    if (k.disc > 0) continue;
    ++out.checked;
    bool holds = b_lower_bound(g, ExtensionPair::inner(k.field(), prec), prec).threshold_check.holds;
    if (holds) {
      seen_hold = true;
    } else {
      out.exceptions.push_back(k.disc);
      if (seen_hold) out.prefix = false;
    }
  }
  return out;
}

/// (1/mu0) D_k^{dim/2} D_{l/k}^{s/2} (prod ...)^{[k:Q]} n^eps E(P).
inline PrecisionValue class_number_bound(const GroupData& g, const ExtensionPair& pair, const PrecisionValue& euler,
                                         const mpq_class& mu0) {
  if (mu0 <= 0) throw PreconditionError("mu0 must be positive");
  auto vb = principal_covolume(g, pair, euler);
  const Precision prec = euler.precision();
  mpq_class scale = mpq_class(g.center_order()) / mu0;
  scale.canonicalize();
  return vb.total * PrecisionValue::from_rational(scale, prec);
}

// Index growth

enum class GrowthMode { general, power_of_2 };

/// Number of distinct primes whose product can be <= 2^{log2_X}: the largest
/// m with log2(p_1 ... p_m) <= log2_X.
inline long omega_max(const PrecisionValue& log2_X) {
  Precision prec{30};
  PrecisionValue acc(0, prec);
  long m = 0;
  long limit = 1000;
  for (;;) {
    auto primes = arith::primes_up_to(limit);
    for (std::size_t i = static_cast<std::size_t>(m); i < primes.size(); ++i) {
      PrecisionValue next = acc + log2(PrecisionValue(primes[i], prec));
      // count the prime unless its product certainly exceeds X
      if (certainly_less(log2_X, next)) return m;
      acc = next;
      ++m;
    }
    limit *= 4;
  }
}

struct IndexGrowth {
  GrowthMode mode = GrowthMode::general;
  PrecisionValue log2_x;
  PrecisionValue log2_bound;  // log2 of the index bound at x
  PrecisionValue exponent;    // C1 (general) or log2 C2 (power_of_2)
  std::map<std::string, PrecisionValue> constants;
};

/// Upper bound on [Gamma : Lambda] for principal Lambda with covolume of its
/// normalizer below x. General mode: x^{C1}. Power-of-2 mode (n a power of 2,
/// k = Q or imaginary quadratic, [l:k] <= 2): C2^{log x / log log x} through
/// the 2-rank bound rho_2 <= t - 1 and prime counts.
inline IndexGrowth index_growth_bounds(const PrecisionValue& x, const GroupData& g, GrowthMode mode, int num_S = 1,
                                       Precision prec = {}) {
  if (!certainly_less_equal(PrecisionValue(16, prec), x)) throw PreconditionError("x must be at least 16");
  if (mode == GrowthMode::power_of_2 && (g.n & (g.n - 1)) != 0) {
    throw PreconditionError("power_of_2 mode needs n a power of 2 (n = " + std::to_string(g.n) + ")");
  }
  IndexGrowth out;
  out.mode = mode;
  out.log2_x = log2(x);
  const PrecisionValue L = out.log2_x;
  const LowerBoundCase pc = lower_bound_case(g);
  const PrecisionValue d1 = PrecisionValue::from_rational(pc.delta1, prec);
  const PrecisionValue d2 = PrecisionValue::from_rational(pc.delta2, prec);
  const PrecisionValue c_mink = minkowski_log_constant(prec);
  const PrecisionValue log2n = log2(PrecisionValue(g.n, prec));
  const PrecisionValue log2r1 = log2(PrecisionValue(g.rank + 1, prec));
  // delta of the f_v >= q_v^delta bound: log2(2^r n^-eps)
  const PrecisionValue delta_form = PrecisionValue(g.rank, prec) - log2n * g.eps;
  if (!certainly_positive(delta_form)) throw PreconditionError("form delta is not positive for " + g.name());

  const PrecisionValue c1 = 2 / d2;
  const PrecisionValue c2 = (2 / d1) / c_mink;
  const PrecisionValue c3 = 1 / delta_form;
  const PrecisionValue c4 = c3 + c1;
  const PrecisionValue c5 = c1 + 6 / d1 + log2(PrecisionValue(100, prec)) / 4;
  out.constants = {{"c1", c1}, {"c2", c2}, {"c3", c3}, {"c4", c4}, {"c5", c5}, {"delta_form", delta_form}};

  const PrecisionValue eps = PrecisionValue(g.eps, prec);
  const PrecisionValue epsp = PrecisionValue(g.eps_prime, prec);
  if (mode == GrowthMode::general) {
    // constant terms absorbed using x >= 16 (log2 x >= 4)
    PrecisionValue C1 = (1 + eps * num_S * log2n) / 4 + epsp * c5 + log2n * (eps * c2 + 3 * epsp * c2 + eps * c3) +
                        c1 * g.eps_dprime + c4 * log2r1;
    out.exponent = C1;
    out.log2_bound = C1 * L;
    return out;
  }

  // bounded degree: #T, #R, places with nontrivial Xi, ramified primes counted
  // through omega_max; each rational prime carries at most 2 places of k
  const long w_T = 2 * omega_max(c3 * L);
  const long w_Xi = 2 * omega_max(c4 * L);
  const long w_R = 2 * omega_max(c1 * L);
  const long t_k = omega_max(L * 2 / d1);
  const long rho2 = 2 * (w_R + t_k);  // covers t_l - 1 and 2(t_l + t_k - 1)
  const long a_k = 2, a_l = 4;
  out.constants["omega_T"] = PrecisionValue(w_T, prec);
  out.constants["omega_Xi"] = PrecisionValue(w_Xi, prec);
  out.constants["omega_R"] = PrecisionValue(w_R, prec);
  out.constants["rho2"] = PrecisionValue(rho2, prec);
  PrecisionValue lb = eps * num_S * log2n + 1 + epsp * rho2 * log2n +
                      (eps * a_k + epsp * a_l + eps * w_T) * log2n + PrecisionValue(g.eps_dprime * w_R, prec) +
                      log2r1 * w_Xi;
  out.log2_bound = lb;
  out.exponent = lb * log2(L) / L;
  return out;
}

}  // namespace covol
