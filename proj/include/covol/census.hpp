#pragma once

// Counting pipeline: upper bounds stage by stage (fields, forms, parahorics,
// class numbers), the constructive lower bound over one field, and the
// signature pigeonhole. All bounds are kept as log2 of the count.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "covolume.hpp"
#include "fields.hpp"
#include "lie_data.hpp"
#include "numeric.hpp"

namespace covol {

enum class CensusMode { uniform, non_uniform };

inline std::string to_string(CensusMode m) { return m == CensusMode::uniform ? "uniform" : "non-uniform"; }

/// Constants that are only known to exist. Defaults are arbitrary but fixed.
struct CensusConfig {
  mpq_class c1 = mpq_class(1, 2);          // mu >= c1 D_k^delta1 D_{l/k}^delta2
  mpq_class mu0 = mpq_class(1, 100000);    // universal covolume lower bound
  mpq_class C6 = 1, C7 = 1;                // beta through the field-count bound
  bool beta_constant = false;              // conjectural mode: beta = C6
  mpq_class ext_c = 1, ext_b1 = 1, ext_b2 = 1;  // extensions l/k: c D_k^b1 Y^b2
  mpq_class schmidt_c = 1;                 // degree n fields: C Y^{(n+2)/4}
  long c_h = 1;                            // non-compact forms per archimedean place
  Precision prec{30};
};

struct DiscriminantCaps {
  PrecisionValue cap_k;
  PrecisionValue cap_rel;
};

/// ((x/c1)^{1/delta1}, (x/c1)^{1/delta2}).
inline DiscriminantCaps discriminant_caps(const PrecisionValue& x, const PrecisionValue& delta1,
                                          const PrecisionValue& delta2, const PrecisionValue& c1) {
  if (!certainly_positive(c1)) throw PreconditionError("c1 must be positive");
  if (!certainly_less(c1, x)) throw PreconditionError("x must exceed c1");
  if (!certainly_positive(delta1) || !certainly_positive(delta2)) throw PreconditionError("deltas must be positive");
  PrecisionValue r = x / c1;
  return {pow(r, 1 / delta1), pow(r, 1 / delta2)};
}

namespace detail {

inline PrecisionValue pq(const mpq_class& q, Precision prec) { return PrecisionValue::from_rational(q, prec); }

/// Largest d with log2 of the Minkowski bound at degree d not certainly above L.
inline int max_degree_for_log2_disc(const PrecisionValue& L) {
  const Precision prec = L.precision();
  const PrecisionValue lq = log2(PrecisionValue::pi(prec) / 4);
  PrecisionValue log_fact(0, prec);
  int best = 1;
  for (int d = 2;; ++d) {
    log_fact = log_fact + log2(PrecisionValue(d, prec));
    PrecisionValue m = (lq * (d / 2) + log2(PrecisionValue(d, prec)) * d - log_fact) * 2;
    if (certainly_less(L, m)) return best;
    best = d;
  }
}

/// Largest integer that may lie strictly below v (so "< v" counts stay upper
/// bounds), or limit + 1 once that exceeds the limit.
inline long integer_cap(const PrecisionValue& v, long limit) {
  if (certainly_less(PrecisionValue(limit + 1, v.precision()), v)) return limit + 1;
  mpz_class f = v.ceil_upper() - 1;
  return std::max(f.get_si(), 0L);
}

// number of fundamental discriminants with |D| <= Y: 3Y/4 + 4 covers both signs
inline PrecisionValue quadratic_count_bound_log2(const PrecisionValue& Y) {
  return log2(Y * 3 / 4 + 4);
}

// Q_k(N) <= zeta(2)^deg N^2, log2
inline PrecisionValue q_bound_log2(const PrecisionValue& log2N, int deg, Precision prec) {
  return log2(zeta::riemann(2, prec)) * deg + log2N * 2;
}

inline PrecisionValue log2_sum(const PrecisionValue& a, const PrecisionValue& b) {
  // log2(2^a + 2^b)
  PrecisionValue hi = max(a, b), lo = min(a, b);
  return hi + log2(1 + exp2(lo - hi));
}

}  // namespace detail

/// C6 exp(C7 sqrt(log2 log2 Y)), natural exp; beta = C6 in conjectural mode.
inline PrecisionValue beta_of(const PrecisionValue& Y, const CensusConfig& cfg) {
  const Precision prec = Y.precision();
  PrecisionValue C6 = detail::pq(cfg.C6, prec);
  if (cfg.beta_constant) return C6;
  PrecisionValue ll = log2(max(log2(max(Y, PrecisionValue(2, prec))), PrecisionValue(1, prec)));
  return C6 * exp(detail::pq(cfg.C7, prec) * sqrt(ll));
}

struct FieldPairCount {
  CensusMode mode = CensusMode::non_uniform;
  DiscriminantCaps caps;
  std::optional<long> num_k_exact_quadratic;  // fundamental discriminants with |D| < cap_k
  PrecisionValue num_k_quadratic_bound;       // log2 of the formula count
  PrecisionValue log2_num_k;
  PrecisionValue log2_l_per_k;
  PrecisionValue pairs_bound;                 // log2
  int degree_cap = 1;
};

inline constexpr long kExactFieldLimit = 1000000;

/// Number of admissible (k, l) as log2. Non-uniform mode restricts [k:Q] <= 2#S.
inline FieldPairCount count_field_pairs(const PrecisionValue& x, const GroupData& g, CensusMode mode, int num_S = 1,
                                        const CensusConfig& cfg = {}) {
  const Precision prec = cfg.prec;
  if (num_S < 1) throw PreconditionError("#S must be at least 1");
  const LowerBoundCase pc = lower_bound_case(g);
  FieldPairCount out;
  out.mode = mode;
  out.caps = discriminant_caps(x, detail::pq(pc.delta1, prec), detail::pq(pc.delta2, prec), detail::pq(cfg.c1, prec));
  const PrecisionValue Lk = log2(out.caps.cap_k);
  const PrecisionValue Lr = log2(out.caps.cap_rel);
  if (!certainly_less(log2(PrecisionValue(3, prec)), Lk)) throw PreconditionError("x too small: cap_k below 3");

  const int deg_mink = detail::max_degree_for_log2_disc(Lk);
  out.degree_cap = mode == CensusMode::non_uniform ? std::min(2 * num_S, deg_mink) : deg_mink;

  const long Yk = detail::integer_cap(out.caps.cap_k, kExactFieldLimit);
  if (Yk <= kExactFieldLimit) {
    out.num_k_exact_quadratic = static_cast<long>(enumerate_fundamental_discriminants(Yk).size());
  }
  out.num_k_quadratic_bound = detail::quadratic_count_bound_log2(out.caps.cap_k);

  if (mode == CensusMode::uniform) {
    out.log2_num_k = beta_of(out.caps.cap_k, cfg) * Lk;
  } else {
    // Q, the quadratic fields, then degrees 3..cap through the Schmidt shape
    PrecisionValue quad = out.num_k_exact_quadratic
                              ? log2(PrecisionValue(std::max(*out.num_k_exact_quadratic, 1L), prec))
                              : out.num_k_quadratic_bound;
    PrecisionValue acc = out.degree_cap >= 2 ? detail::log2_sum(PrecisionValue(0, prec), quad) : PrecisionValue(0, prec);
    for (int d = 3; d <= out.degree_cap; ++d) {
      acc = detail::log2_sum(acc, log2(detail::pq(cfg.schmidt_c, prec)) + Lk * (d + 2) / 4);
    }
    out.log2_num_k = acc;
  }
  if (g.inner()) {
    out.log2_l_per_k = PrecisionValue(0, prec);
  } else {
    out.log2_l_per_k = log2(detail::pq(cfg.ext_c, prec)) + detail::pq(cfg.ext_b1, prec) * Lk +
                       detail::pq(cfg.ext_b2, prec) * Lr;
  }
  out.pairs_bound = out.log2_num_k + out.log2_l_per_k;
  return out;
}

struct FormsParahorics {
  PrecisionValue delta_form;      // f_v >= q^delta at non-quasi-split places
  PrecisionValue delta_T2;        // from e_v >= q^{r+1}/(q+1) at q = 2
  PrecisionValue log2_norm_cap;   // log2 of the T1/T2 norm cap (x/c1)^{1/min delta}
  PrecisionValue c8;              // 1/delta_form
  long max_T = 0;                 // #T1, #T2 <= log2 cap since q_v >= 2
  long max_R = 0;
  std::optional<long> exact_T_sets_over_Q;  // Q(norm cap) over Q when small
  PrecisionValue log2_T_variants;  // zeta(2)^deg N^2
  PrecisionValue log2_R_variants;
  PrecisionValue log2_archimedean;  // n_h log2(c_h a(k))
  PrecisionValue forms_bound;       // log2
  PrecisionValue parahoric_bound;   // log2
  long c_t = 0;
};

/// e_v lower bound q^{r+1}/(q+1) for non-hyperspecial parahorics.
inline mpq_class e_v_lower(long q, int r) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(r + 1));
  mpq_class v(p, q + 1);
  v.canonicalize();
  return v;
}

/// log2(2^r n^-eps), with A2 giving log2(4/3).
inline PrecisionValue form_delta(const GroupData& g, Precision prec) {
  PrecisionValue d = PrecisionValue(g.rank, prec) - log2(PrecisionValue(g.n, prec)) * g.eps;
  if (!certainly_positive(d)) throw PreconditionError("form delta is not positive for " + g.name());
  return d;
}

inline FormsParahorics forms_and_parahorics_bound(const PrecisionValue& x, const GroupData& g,
                                                  const FieldPairCount& fields, int num_S = 1,
                                                  const CensusConfig& cfg = {}) {
  const Precision prec = cfg.prec;
  FormsParahorics out;
  out.delta_form = form_delta(g, prec);
  out.delta_T2 = PrecisionValue(g.rank + 1, prec) - log2(PrecisionValue(3, prec));
  out.c8 = 1 / out.delta_form;
  out.c_t = (1L << (g.rank + 1)) - 1;
  const PrecisionValue budget = log2(x / detail::pq(cfg.c1, prec));
  out.log2_norm_cap = budget / min(out.delta_form, out.delta_T2);
  out.max_T = out.log2_norm_cap.ceil_upper().get_si();
  const PrecisionValue Lr = log2(fields.caps.cap_rel);
  out.max_R = g.inner() ? 0 : Lr.ceil_upper().get_si();

  const PrecisionValue N = exp2(out.log2_norm_cap);
  const long Nf = detail::integer_cap(N, kOracleLimit);
  if (Nf <= kOracleLimit) out.exact_T_sets_over_Q = squarefree_ideal_count(BaseField::rational(), std::max(Nf, 1L));

  out.log2_T_variants = detail::q_bound_log2(out.log2_norm_cap, fields.degree_cap, prec);
  out.log2_R_variants = g.inner() ? PrecisionValue(0, prec) : detail::q_bound_log2(Lr, fields.degree_cap, prec);
  out.log2_archimedean = log2(PrecisionValue(cfg.c_h * fields.degree_cap, prec)) * num_S;
  // inner forms per place <= n^eps; T1 and T2 split one budget (one extra bit per place)
  const PrecisionValue log2n = log2(PrecisionValue(g.n, prec));
  out.forms_bound = out.log2_archimedean + out.log2_T_variants + log2n * g.eps * out.max_T;
  out.parahoric_bound = log2(PrecisionValue(out.c_t, prec)) * (out.max_T + out.max_R) + out.log2_T_variants +
                        PrecisionValue(out.max_T, prec) + out.log2_R_variants;
  return out;
}

struct ClassesBound {
  PrecisionValue log2_bound;
  PrecisionValue log2_parahoric_mass;  // log2 prod e_v over T places <= dim log2 N
  PrecisionValue log2_euler_cap;       // r deg log2 zeta(2)
};

/// (1/mu0) D_k^{dim/2} D_{l/k}^{s/2} arch^{deg} n^eps E(P), maximized over the admissible range.
inline ClassesBound classes_bound(const GroupData& g, const FieldPairCount& fields, const FormsParahorics& fp,
                                  const CensusConfig& cfg = {}) {
  const Precision prec = cfg.prec;
  ClassesBound out;
  const PrecisionValue Lk = log2(fields.caps.cap_k);
  const PrecisionValue Lr = log2(fields.caps.cap_rel);
  const PrecisionValue arch = log2(detail::archimedean_factor(g, 1, prec).value);
  const PrecisionValue arch_total = certainly_positive(arch) ? arch * fields.degree_cap : arch;
  out.log2_euler_cap = log2(zeta::riemann(2, prec)) * (static_cast<long>(g.rank) * fields.degree_cap);
  out.log2_parahoric_mass = fp.log2_norm_cap * g.dim;
  PrecisionValue rel = g.inner() ? PrecisionValue(0, prec) : Lr * g.s / 2;
  out.log2_bound = -log2(detail::pq(cfg.mu0, prec)) + Lk * g.dim / 2 + rel + arch_total +
                   log2(PrecisionValue(g.center_order(), prec)) + out.log2_euler_cap + out.log2_parahoric_mass;
  return out;
}

struct CensusBound {
  PrecisionValue x;
  PrecisionValue log2_x;
  CensusMode mode = CensusMode::non_uniform;
  PrecisionValue fields_bound;     // all stage bounds are log2 of counts
  PrecisionValue forms_bound;
  PrecisionValue parahoric_bound;
  PrecisionValue classes_bound;
  PrecisionValue log2_total;
  PrecisionValue total_exponent;   // log2_total / log2 x
  std::optional<PrecisionValue> beta;
  std::optional<long> num_k_exact_quadratic;
  std::optional<long> exact_T_sets_over_Q;
  int degree_cap = 1;
  std::map<std::string, PrecisionValue> constants;
};

/// Product of the stage bounds. x must be at least 2^10.
inline CensusBound upper_bound_total(const PrecisionValue& x, const GroupData& g, int num_S, CensusMode mode,
                                     const CensusConfig& cfg = {}) {
  const Precision prec = cfg.prec;
  if (!certainly_less_equal(PrecisionValue(1024, prec), x)) throw PreconditionError("x must be at least 2^10");
  auto fields = count_field_pairs(x, g, mode, num_S, cfg);
  auto fp = forms_and_parahorics_bound(x, g, fields, num_S, cfg);
  auto cls = classes_bound(g, fields, fp, cfg);

  CensusBound out;
  out.x = x;
  out.log2_x = log2(x);
  out.mode = mode;
  out.fields_bound = fields.pairs_bound;
  out.forms_bound = fp.forms_bound;
  out.parahoric_bound = fp.parahoric_bound;
  out.classes_bound = cls.log2_bound;
  out.log2_total = out.fields_bound + out.forms_bound + out.parahoric_bound + out.classes_bound;
  out.total_exponent = out.log2_total / out.log2_x;
  if (mode == CensusMode::uniform) out.beta = beta_of(x, cfg);
  out.num_k_exact_quadratic = fields.num_k_exact_quadratic;
  out.exact_T_sets_over_Q = fp.exact_T_sets_over_Q;
  out.degree_cap = fields.degree_cap;

  const LowerBoundCase pc = lower_bound_case(g);
  const PrecisionValue L = out.log2_x;
  auto& c = out.constants;
  c["c1"] = detail::pq(cfg.c1, prec);
  c["delta1"] = detail::pq(pc.delta1, prec);
  c["delta2"] = detail::pq(pc.delta2, prec);
  c["C6"] = detail::pq(cfg.C6, prec);
  c["C7"] = detail::pq(cfg.C7, prec);
  if (mode == CensusMode::uniform) {
    c["c2"] = fields.log2_num_k / (L * *out.beta);
    c["c3"] = fields.log2_l_per_k / L;
  } else {
    c["c5"] = fields.pairs_bound / L;
  }
  c["c4"] = PrecisionValue(fields.degree_cap, prec) / L;
  c["c6"] = fp.log2_archimedean / log2(L);
  c["c8"] = fp.c8;
  c["c9"] = fp.log2_T_variants / L;
  c["c10"] = PrecisionValue(fp.max_T, prec) / L;
  c["c11"] = fp.forms_bound / L;
  c["c12"] = PrecisionValue(fp.max_R, prec) / L;
  c["c13"] = fp.log2_R_variants / L;
  c["c14"] = c["c10"];
  c["c15"] = c["c9"];
  c["c16"] = fp.parahoric_bound / L;
  c["c17"] = PrecisionValue(g.center_order(), prec);
  c["c18"] = cls.log2_parahoric_mass / L;
  c["c19"] = cls.log2_bound / L;
  c["c_t"] = PrecisionValue(fp.c_t, prec);
  c["delta_form"] = fp.delta_form;
  c["delta_T2"] = fp.delta_T2;
  c["mu0"] = detail::pq(cfg.mu0, prec);
  c["c_h"] = PrecisionValue(cfg.c_h, prec);
  c["n_h"] = PrecisionValue(num_S, prec);
  return out;
}

/// Evaluates upper_bound_total at x = 2^e for each exponent, split into
/// contiguous shards run on separate threads. Output order follows input order.
inline std::vector<CensusBound> census_grid(const std::vector<long>& log2_xs, const GroupData& g, int num_S,
                                            CensusMode mode, int shards = 1, const CensusConfig& cfg = {}) {
  if (shards < 1) throw PreconditionError("shard count must be positive");
  std::vector<std::optional<CensusBound>> slots(log2_xs.size());
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(shards));
  std::vector<std::thread> pool;
  const std::size_t n = log2_xs.size();
  for (int s = 0; s < shards; ++s) {
    std::size_t lo = n * static_cast<std::size_t>(s) / static_cast<std::size_t>(shards);
    std::size_t hi = n * static_cast<std::size_t>(s + 1) / static_cast<std::size_t>(shards);
    pool.emplace_back([&, lo, hi, s] {
      try {
        for (std::size_t i = lo; i < hi; ++i) {
          slots[i] = upper_bound_total(exp2(PrecisionValue(log2_xs[i], cfg.prec)), g, num_S, mode, cfg);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(s)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<CensusBound> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// Lower bound

inline constexpr long kLowerBoundNormLimit = 100000000;

/// Largest n >= 1 with n^dim < ratio, or 0 when 1 >= ratio. `less(n)` decides n^dim < ratio.
template <class Less>
long largest_norm_below(Less less) {
  if (!less(1)) return 0;
  long lo = 1, hi = 2;
  while (less(hi)) {
    lo = hi;
    hi *= 2;
    if (hi > kLowerBoundNormLimit) throw PreconditionError("norm cap beyond the exact counting range");
  }
  while (hi - lo > 1) {
    long mid = lo + (hi - lo) / 2;
    (less(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Q_k of the largest norm strictly below (x/c1)^{1/dim}: each such T gives a
/// distinct maximal subgroup of covolume below x. T = {} is included.
inline long lower_bound_census_ratio(const mpq_class& x_over_c1, const BaseField& k, const GroupData& g) {
  if (x_over_c1 <= 1) return 0;
  long n = largest_norm_below([&](long m) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), static_cast<unsigned long>(m), static_cast<unsigned long>(g.dim));
    return mpq_class(p) < x_over_c1;
  });
  return n == 0 ? 0 : squarefree_ideal_count(k, n);
}

inline long lower_bound_census(const PrecisionValue& x, const BaseField& k, const GroupData& g,
                               const PrecisionValue& c1) {
  if (!certainly_positive(c1)) throw PreconditionError("c1 must be positive");
  if (!certainly_less(c1, x)) throw PreconditionError("x must exceed c1");
  const PrecisionValue ratio = x / c1;
  long n = largest_norm_below([&](long m) {
    PrecisionValue p = pow(PrecisionValue(m, ratio.precision()), g.dim);
    auto c = compare(p, ratio);
    if (!c) throw UndecidableError("norm cap comparison undecided at n = " + std::to_string(m));
    return *c < 0;
  });
  return n == 0 ? 0 : squarefree_ideal_count(k, n);
}

/// Covolume of the all-hyperspecial principal subgroup of split g over k.
inline PrecisionValue base_covolume(const GroupData& g, const BaseField& k, Precision prec = {}) {
  if (!g.inner()) throw PreconditionError("base covolume is built for split groups");
  return covolume(g, ExtensionPair::inner(k), prec).total;
}

// Signature pigeonhole

struct PigeonholeMember {
  long disc = 0;
  PrecisionValue covolume;
  PrecisionValue bound;  // X^delta
  bool holds = false;
};

struct PigeonholeReport {
  long X = 0;
  long N = 0;
  std::map<std::pair<int, int>, std::vector<long>> cells;  // (r1, r2) -> discriminants
  std::pair<int, int> max_cell{0, 0};
  PrecisionValue c_degree;  // [k:Q] <= c log2 X
  PrecisionValue c1;        // zeta(2)
  PrecisionValue c2;        // max(1, prod m_i!/(2 pi)^{m_i+1})
  PrecisionValue delta;
  std::vector<PigeonholeMember> members;
};

/// Partitions quadratic fields with |D| <= X by signature, takes the largest
/// cell (ties: smallest signature) and bounds the split covolume over each of
/// its fields by X^delta, delta = dim/2 + c log2 c2 + r c log2 zeta(2).
inline PigeonholeReport pigeonhole_equivalence(long X, const GroupData& g, Precision prec = {}) {
  if (X < 10) throw PreconditionError("X must be at least 10");
  if (!g.inner()) throw PreconditionError("pigeonhole uses split groups");
  PigeonholeReport out;
  out.X = X;
  auto fields = enumerate_fundamental_discriminants(X);
  out.N = static_cast<long>(fields.size());
  for (const auto& k : fields) out.cells[{k.r1, k.r2}].push_back(k.disc);
  std::size_t best = 0;
  for (const auto& [sig, ds] : out.cells) {
    if (ds.size() > best) {
      best = ds.size();
      out.max_cell = sig;
    }
  }
  out.c_degree = 1 / minkowski_log_constant(prec);
  out.c1 = zeta::riemann(2, prec);
  out.c2 = max(PrecisionValue(1, prec), detail::archimedean_factor(g, 1, prec).value);
  out.delta = PrecisionValue(g.dim, prec) / 2 + out.c_degree * log2(out.c2) +
              out.c_degree * log2(out.c1) * g.rank;
  const PrecisionValue Xv(X, prec);
  for (long D : out.cells[out.max_cell]) {
    PigeonholeMember m;
    m.disc = D;
    m.covolume = base_covolume(g, BaseField::quadratic(D), prec);
    m.bound = pow(Xv, out.delta);
    m.holds = certainly_less_equal(m.covolume, m.bound);
    out.members.push_back(m);
  }
  return out;
}

}  // namespace covol
