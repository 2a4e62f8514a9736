#pragma once

// Small exact integer helpers: sieves, Kronecker symbol, factorials,
// Bernoulli numbers.

#include <gmpxx.h>

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "numeric.hpp"

namespace covol::arith {

/// Primes p <= n, ascending.
inline std::vector<std::int64_t> primes_up_to(std::int64_t n) {
  std::vector<std::int64_t> out;
  if (n < 2) return out;
  std::vector<bool> composite(static_cast<std::size_t>(n + 1), false);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (composite[static_cast<std::size_t>(i)]) continue;
    out.push_back(i);
    for (std::int64_t j = i * i; j <= n; j += i) composite[static_cast<std::size_t>(j)] = true;
  }
  return out;
}

/// Smallest prime factor table for 0..n (entries 0 and 1 are 0).
inline std::vector<std::uint32_t> smallest_prime_factors(std::int64_t n) {
  std::vector<std::uint32_t> spf(static_cast<std::size_t>(n + 1), 0);
  for (std::int64_t i = 2; i <= n; ++i) {
    if (spf[static_cast<std::size_t>(i)] != 0) continue;
    for (std::int64_t j = i; j <= n; j += i) {
      if (spf[static_cast<std::size_t>(j)] == 0) spf[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(i);
    }
  }
  return spf;
}

inline bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::int64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

/// If n = p^k with p prime and k >= 1, returns p; otherwise 0.
inline std::int64_t prime_power_base(std::int64_t n) {
  if (n < 2) return 0;
  std::int64_t p = 0;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      p = d;
      break;
    }
  }
  if (p == 0) return n;
  while (n % p == 0) n /= p;
  return n == 1 ? p : 0;
}

inline bool is_squarefree(std::int64_t n) {
  if (n < 0) n = -n;
  if (n == 0) return false;
  for (std::int64_t d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      n /= d;
      if (n % d == 0) return false;
    }
  }
  return true;
}

inline bool is_squarefree(const mpz_class& n) {
  mpz_class m = abs(n);
  if (m == 0) return false;
  for (unsigned long d = 2; mpz_class(d) * d <= m; ++d) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
      mpz_divexact_ui(m.get_mpz_t(), m.get_mpz_t(), d);
      if (mpz_divisible_ui_p(m.get_mpz_t(), d)) return false;
    }
  }
  return true;
}

/// Kronecker symbol (a | n) for n >= 1.
inline int kronecker(std::int64_t a, std::int64_t n) {
  return mpz_kronecker_si(mpz_class(a).get_mpz_t(), static_cast<long>(n));
}

inline mpz_class factorial(unsigned long n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

inline mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

/// Bernoulli number B_n (B_1 = -1/2), exact. Cached, thread-safe.
inline mpq_class bernoulli(std::size_t n) {
  static std::mutex mu;
  static std::vector<mpq_class> table{mpq_class(1)};
  std::lock_guard<std::mutex> lock(mu);
  while (table.size() <= n) {
    const std::size_t m = table.size();
    mpq_class acc = 0;
    for (std::size_t k = 0; k < m; ++k) acc += mpq_class(binomial(m + 1, k)) * table[k];
    mpq_class b = -acc / mpq_class(static_cast<long>(m + 1));
    b.canonicalize();
    table.push_back(b);
  }
  return table[n];
}

/// Number of primes <= n.
inline std::int64_t prime_pi(std::int64_t n) { return static_cast<std::int64_t>(primes_up_to(n).size()); }

}  // namespace covol::arith
