#pragma once

#include <optional>
#include <string>

#include "wk/rational.hpp"
#include "wk/value.hpp"

namespace wk {

// An element of Q_p carried at finite precision: either an exact zero or
// p^v * u with p not dividing u, where u is known modulo p^prec (so the
// element itself is known modulo p^(v+prec)).  prec >= 1 always.
//
// Arithmetic tracks precision pessimistically.  Additive cancellation
// shortens the surviving precision; when two operands cancel *identically*
// at their common precision the result is reported as exact zero, and when
// they cancel to the full known precision without being identical the
// operation throws PrecisionExhausted (the leading digit of the result is
// unknowable).
class PAdic {
public:
  PAdic(long p, int prec, long v, const Integer& unit);  // checked: p prime, p ∤ unit
  static PAdic zero(long p, int prec);
  static PAdic from_rational(const Rational& q, long p, int prec);
  static PAdic from_integer(const Integer& n, long p, int prec) {
    return from_rational(Rational(n), p, prec);
  }

  long p() const { return p_; }
  int prec() const { return prec_; }
  bool is_zero() const { return zero_; }

  // Valuation; +inf for the exact zero.
  ValueWithInfinity valuation() const;
  long val() const;                 // finite valuation; throws ZeroInput on zero
  const Integer& unit() const;      // representative in [1, p^prec), throws ZeroInput on zero

  // The element as an integer residue mod p^k, defined only when v >= 0 and
  // v + prec >= k.  Used by the Tate layer.
  Integer residue_mod(int k) const;

  bool same_representation(const PAdic& o) const {
    return p_ == o.p_ && prec_ == o.prec_ && zero_ == o.zero_ &&
           (zero_ || (v_ == o.v_ && u_ == o.u_));
  }

  // "p^v * u (mod p^N)" or "0".
  std::string str() const;

  friend PAdic operator+(const PAdic& a, const PAdic& b);
  friend PAdic operator-(const PAdic& a, const PAdic& b);
  friend PAdic operator*(const PAdic& a, const PAdic& b);
  friend PAdic operator/(const PAdic& a, const PAdic& b);
  PAdic operator-() const;

  friend bool operator==(const PAdic& a, const PAdic& b) { return a.same_representation(b); }
  friend bool operator!=(const PAdic& a, const PAdic& b) { return !(a == b); }

  PAdic pow(unsigned long e) const;

private:
  PAdic() = default;

  long p_ = 0;
  int prec_ = 0;
  bool zero_ = true;
  long v_ = 0;
  Integer u_ = 0;

  static PAdic make(long p, int prec, long v, const Integer& u);
  friend PAdic padic_add_signed(const PAdic& a, const PAdic& b, bool subtract);
};

// gamma(x) = (1/p) * w(x) / (w(x)^2 - 1) with w(x) = x^p - x.
//
// Over Q the operator is total except at the (irrational) roots of
// w(x) = ±1, reported in-band as nullopt (the "value" +inf).  No rational
// argument reaches that case, but the contract keeps it representable.
std::optional<Rational> kochen_gamma(const Rational& a, long p);

// Same operator on p-adic scalars.  w(a) = ±1 cannot happen in Q_p (mod p,
// w vanishes on units and has valuation p*v(a) < 0 otherwise), so the result
// is always finite; deep additive cancellation can still surface as
// PrecisionExhausted.
PAdic kochen_gamma(const PAdic& a);

// w(x) = x^p - x over Q.
Rational artin_schreier(const Rational& a, long p);

// k-th root with p ∤ k.  The valuation must be divisible by k (else NoRoot)
// and the unit part must have a k-th root mod p (else NoRoot).  When branch
// is given, the root congruent to it mod p is selected; BadBranch if branch
// is not a k-th root of the unit part mod p.  Without a hint, a 1-unit gets
// the root ≡ 1 mod p, anything else the smallest admissible residue.
// p | k throws RamifiedIndex.
PAdic padic_kth_root(const PAdic& a, unsigned k,
                     std::optional<Integer> branch = std::nullopt);

}  // namespace wk
