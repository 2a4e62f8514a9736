#pragma once

// Root-system and form invariants of absolutely almost simple groups.

#include <gmpxx.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "arith.hpp"
#include "numeric.hpp"

namespace covol {

enum class Family { A, B, C, D, E6, E7, E8, F4, G2 };

inline constexpr std::array<Family, 9> kAllFamilies = {Family::A,  Family::B,  Family::C,  Family::D, Family::E6,
                                                       Family::E7, Family::E8, Family::F4, Family::G2};

inline std::string to_string(Family f) {
  switch (f) {
    case Family::A: return "A";
    case Family::B: return "B";
    case Family::C: return "C";
    case Family::D: return "D";
    case Family::E6: return "E6";
    case Family::E7: return "E7";
    case Family::E8: return "E8";
    case Family::F4: return "F4";
    case Family::G2: return "G2";
  }
  return "?";
}

inline Family parse_family(std::string_view s) {
  for (Family f : kAllFamilies) {
    if (to_string(f) == s) return f;
  }
  throw PreconditionError("unknown family: " + std::string(s));
}

/// Rank fixed by an exceptional family, if any.
inline std::optional<int> fixed_rank(Family f) {
  switch (f) {
    case Family::E6: return 6;
    case Family::E7: return 7;
    case Family::E8: return 8;
    case Family::F4: return 4;
    case Family::G2: return 2;
    default: return std::nullopt;
  }
}

struct GroupData {
  Family family = Family::A;
  int rank = 0;
  int twist_degree = 1;
  long dim = 0;
  std::vector<int> exponents;
  int n = 1;
  int eps = 1;
  int eps_prime = 1;
  int eps_dprime = 0;
  int s = 0;
  mpq_class s_prime = 0;

  bool inner() const { return twist_degree == 1; }
  long num_positive_roots() const { return std::accumulate(exponents.begin(), exponents.end(), 0L); }
  /// Order of the center of the simply connected group.
  long center_order() const {
    long c = 1;
    for (int i = 0; i < eps; ++i) c *= n;
    return c;
  }
  std::string name() const {
    std::string t = twist_degree == 1 ? "" : std::to_string(twist_degree);
    if (fixed_rank(family)) return t + to_string(family);
    return t + to_string(family) + std::to_string(rank);
  }
};

namespace detail {

inline std::vector<int> exponents_of(Family f, int r) {
  std::vector<int> m;
  switch (f) {
    case Family::A:
      for (int i = 1; i <= r; ++i) m.push_back(i);
      break;
    case Family::B:
    case Family::C:
      for (int i = 1; i <= r; ++i) m.push_back(2 * i - 1);
      break;
    case Family::D:
      for (int i = 1; i <= r - 1; ++i) m.push_back(2 * i - 1);
      m.push_back(r - 1);
      break;
    case Family::E6: m = {1, 4, 5, 7, 8, 11}; break;
    case Family::E7: m = {1, 5, 7, 9, 11, 13, 17}; break;
    case Family::E8: m = {1, 7, 11, 13, 17, 19, 23, 29}; break;
    case Family::F4: m = {1, 5, 7, 11}; break;
    case Family::G2: m = {1, 5}; break;
  }
  std::sort(m.begin(), m.end());
  return m;
}

inline int n_of(Family f, int r) {
  switch (f) {
    case Family::A: return r + 1;
    case Family::B:
    case Family::C:
    case Family::E7: return 2;
    case Family::D: return r % 2 == 0 ? 2 : 4;
    case Family::E6: return 3;
    case Family::E8:
    case Family::F4:
    case Family::G2: return 1;
  }
  return 1;
}

// Dimensions from the standard closed forms, independent of the exponent tables.
inline long dim_of(Family f, long r) {
  switch (f) {
    case Family::A: return r * (r + 2);
    case Family::B:
    case Family::C: return r * (2 * r + 1);
    case Family::D: return r * (2 * r - 1);
    case Family::E6: return 78;
    case Family::E7: return 133;
    case Family::E8: return 248;
    case Family::F4: return 52;
    case Family::G2: return 14;
  }
  return 0;
}

}  // namespace detail

inline bool verify_dimension(const GroupData& g) {
  return g.dim == g.rank + 2 * g.num_positive_roots();
}

/// Checks the (family, rank, twist) combination, throwing PreconditionError if invalid.
inline void validate_type(Family family, int rank, int twist_degree) {
  if (auto fr = fixed_rank(family); fr && *fr != rank) {
    throw PreconditionError(to_string(family) + " has rank " + std::to_string(*fr));
  }
  if (rank < 2) throw PreconditionError("rank must be at least 2");
  if (family == Family::D && rank < 4) throw PreconditionError("D_r requires r >= 4");
  switch (twist_degree) {
    case 1: break;
    case 2:
      if (family != Family::A && family != Family::D && family != Family::E6) {
        throw PreconditionError("type " + to_string(family) + " has no outer forms");
      }
      break;
    case 3:
    case 6:
      if (family != Family::D || rank != 4) throw PreconditionError("twist 3 or 6 requires D4");
      break;
    default: throw PreconditionError("twist degree must be 1, 2, 3 or 6");
  }
}

/// Full invariants of the type. `s` is required for outer forms other than
/// 2A2 and triality D4, and must be at least 5.
inline GroupData group_data(Family family, int rank, int twist_degree = 1, std::optional<int> s = std::nullopt) {
  validate_type(family, rank, twist_degree);
  GroupData g;
  g.family = family;
  g.rank = rank;
  g.twist_degree = twist_degree;
  g.exponents = detail::exponents_of(family, rank);
  g.dim = detail::dim_of(family, rank);
  g.n = detail::n_of(family, rank);
  g.eps = (family == Family::D && rank % 2 == 0) ? 2 : 1;
  g.eps_prime = twist_degree == 1 ? g.eps : 1;
  const bool outer_d_even = twist_degree > 1 && family == Family::D && rank % 2 == 0;
  g.eps_dprime = outer_d_even ? 1 : 0;

  if (twist_degree == 1) {
    if (s && *s != 0) throw PreconditionError("inner forms have s = 0");
    g.s = 0;
  } else {
    std::optional<int> builtin;
    if (family == Family::A && rank == 2) builtin = 5;
    if (family == Family::D && rank == 4 && twist_degree != 2) builtin = 7;  // s' = 5/2
    if (builtin && s && *s != *builtin) {
      throw PreconditionError("s is fixed at " + std::to_string(*builtin) + " for " + g.name());
    }
    if (!builtin && !s) throw PreconditionError("s must be supplied for outer form " + g.name());
    g.s = builtin ? *builtin : *s;
    if (g.s < 5) throw PreconditionError("outer forms need s >= 5");
  }
  g.s_prime = mpq_class(g.s, 2);
  if (outer_d_even) g.s_prime -= 1;
  g.s_prime.canonicalize();
  return g;
}

/// Integer polynomial, coefficient i is the coefficient of q^i.
using IntPoly = std::vector<mpz_class>;

namespace detail {

// q^k + c
inline IntPoly monomial_plus(std::size_t k, long c) {
  IntPoly p(k + 1, 0);
  p[k] += 1;
  p[0] += c;
  return p;
}

// p * (q^k + c) without the dense product
inline IntPoly mul_binomial(const IntPoly& p, std::size_t k, long c) {
  IntPoly r(p.size() + k, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    r[i + k] += p[i];
    r[i] += c * p[i];
  }
  return r;
}

}  // namespace detail

/// |G(F_q)| as a polynomial in q, for split types and 2A_r.
inline IntPoly order_polynomial(Family family, int rank, int twist_degree) {
  validate_type(family, rank, twist_degree);
  if (twist_degree == 1) {
    auto m = detail::exponents_of(family, rank);
    std::size_t N = 0;
    for (int e : m) N += static_cast<std::size_t>(e);
    IntPoly p = detail::monomial_plus(N, 0);
    for (int e : m) p = detail::mul_binomial(p, static_cast<std::size_t>(e + 1), -1);
    return p;
  }
  if (family == Family::A && twist_degree == 2) {
    const std::size_t r = static_cast<std::size_t>(rank);
    IntPoly p = detail::monomial_plus(r * (r + 1) / 2, 0);
    for (std::size_t i = 2; i <= r + 1; ++i) {
      p = detail::mul_binomial(p, i, i % 2 == 0 ? -1 : 1);
    }
    return p;
  }
  throw PreconditionError("finite group order not built in for " + std::to_string(twist_degree) +
                          to_string(family) + std::to_string(rank));
}

inline mpz_class evaluate(const IntPoly& p, const mpz_class& q) {
  mpz_class acc = 0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * q + *it;
  return acc;
}

/// |G(F_q)| of the simply connected finite group of Lie type.
inline mpz_class finite_group_order(Family family, int rank, int twist_degree, long q) {
  if (q < 2 || arith::prime_power_base(q) == 0) throw PreconditionError("q must be a prime power");
  return evaluate(order_polynomial(family, rank, twist_degree), mpz_class(q));
}

/// Every type of rank <= max_rank accepted by group_data (outer forms with
/// configurable s get s = 5).
inline std::vector<GroupData> all_types(int max_rank) {
  std::vector<GroupData> out;
  for (Family f : kAllFamilies) {
    for (int r = 2; r <= max_rank; ++r) {
      for (int t : {1, 2, 3, 6}) {
        try {
          validate_type(f, r, t);
        } catch (const PreconditionError&) {
          continue;
        }
        bool builtin_s = t == 1 || (f == Family::A && r == 2) || (f == Family::D && r == 4 && t != 2);
        out.push_back(group_data(f, r, t, builtin_s ? std::nullopt : std::optional<int>(5)));
      }
    }
  }
  return out;
}

}  // namespace covol
