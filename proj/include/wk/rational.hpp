#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "wk/error.hpp"

namespace wk {

// Exact rationals.  mpq_class keeps the canonical form we rely on everywhere:
// gcd(num, den) = 1 and den > 0.
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rat(long n, long d = 1) {
  Rational q(n, d);
  q.canonicalize();
  return q;
}

// p-adic valuation of a nonzero integer (number of times p divides n).
long int_vp(const Integer& n, const Integer& p);

// Valuation of a nonzero rational: vp(num) - vp(den).
long rat_vp(const Rational& q, const Integer& p);

// b^e for e >= 0.
Integer int_pow(const Integer& b, unsigned long e);
Rational rat_pow(const Rational& b, long e);  // negative e allowed for b != 0

// Inverse of a mod m (m > 1, gcd(a, m) = 1); throws NotAUnit otherwise.
Integer mod_inverse(const Integer& a, const Integer& m);

// Canonical representative in [0, m).
Integer mod_reduce(const Integer& a, const Integer& m);

// Exact k-th root when one exists in Q (k >= 1; for even k the nonnegative
// root of a nonnegative argument).  nullopt when the argument has none.
std::optional<Rational> rational_kth_root(const Rational& a, unsigned k);

bool int_is_prime(const Integer& p);

// Plain decimal / fraction formatting: "7", "-2/35".
std::string rat_str(const Rational& q);

}  // namespace wk
