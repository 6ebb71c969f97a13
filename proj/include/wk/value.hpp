#pragma once

#include <string>

#include "wk/rational.hpp"

namespace wk {

// An element of an ordered value group extended by a top element "+inf"
// (the value of zero).  Two group shapes are used: plain rationals, and
// lexicographically ordered pairs of rationals (coarse component first).
// Scalars and pairs never mix inside one comparison.
class ValueWithInfinity {
public:
  static ValueWithInfinity infinity() { return ValueWithInfinity(Kind::Infinite, 0, 0); }
  static ValueWithInfinity finite(const Rational& q) { return ValueWithInfinity(Kind::Scalar, q, 0); }
  static ValueWithInfinity pair(const Rational& coarse, const Rational& fine) {
    return ValueWithInfinity(Kind::Pair, coarse, fine);
  }

  bool is_infinite() const { return kind_ == Kind::Infinite; }
  bool is_pair() const { return kind_ == Kind::Pair; }

  const Rational& scalar() const {
    if (kind_ != Kind::Scalar) fail(errc::out_of_domain, "value is not a scalar");
    return a_;
  }
  const Rational& first() const {
    if (kind_ != Kind::Pair) fail(errc::out_of_domain, "value is not a pair");
    return a_;
  }
  const Rational& second() const {
    if (kind_ != Kind::Pair) fail(errc::out_of_domain, "value is not a pair");
    return b_;
  }

  // "1/2", "(1/2, 3)", "+inf"
  std::string str() const;

  friend bool operator==(const ValueWithInfinity& x, const ValueWithInfinity& y) {
    if (x.kind_ != y.kind_) {
      if (x.kind_ == Kind::Infinite || y.kind_ == Kind::Infinite) return false;
      fail(errc::out_of_domain, "comparing values from different groups");
    }
    if (x.kind_ == Kind::Infinite) return true;
    return x.a_ == y.a_ && (x.kind_ != Kind::Pair || x.b_ == y.b_);
  }
  friend bool operator!=(const ValueWithInfinity& x, const ValueWithInfinity& y) { return !(x == y); }
  friend bool operator<(const ValueWithInfinity& x, const ValueWithInfinity& y);
  friend bool operator<=(const ValueWithInfinity& x, const ValueWithInfinity& y) { return x < y || x == y; }
  friend bool operator>(const ValueWithInfinity& x, const ValueWithInfinity& y) { return y < x; }
  friend bool operator>=(const ValueWithInfinity& x, const ValueWithInfinity& y) { return y <= x; }

  // Group addition (inf absorbs).
  friend ValueWithInfinity operator+(const ValueWithInfinity& x, const ValueWithInfinity& y);

private:
  enum class Kind { Scalar, Pair, Infinite };
  ValueWithInfinity(Kind k, const Rational& a, const Rational& b) : kind_(k), a_(a), b_(b) {}

  Kind kind_;
  Rational a_, b_;
};

}  // namespace wk
