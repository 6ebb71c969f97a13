#include "wk/value.hpp"

namespace wk {

std::string ValueWithInfinity::str() const {
  switch (kind_) {
    case Kind::Infinite: return "+inf";
    case Kind::Scalar: return rat_str(a_);
    case Kind::Pair: return "(" + rat_str(a_) + ", " + rat_str(b_) + ")";
  }
  return "?";
}

bool operator<(const ValueWithInfinity& x, const ValueWithInfinity& y) {
  using Kind = ValueWithInfinity::Kind;
  if (y.kind_ == Kind::Infinite) return x.kind_ != Kind::Infinite;
  if (x.kind_ == Kind::Infinite) return false;
  if (x.kind_ != y.kind_) fail(errc::out_of_domain, "comparing values from different groups");
  if (x.a_ != y.a_) return x.a_ < y.a_;
  return x.kind_ == Kind::Pair && x.b_ < y.b_;
}

ValueWithInfinity operator+(const ValueWithInfinity& x, const ValueWithInfinity& y) {
  using Kind = ValueWithInfinity::Kind;
  if (x.kind_ == Kind::Infinite || y.kind_ == Kind::Infinite) return ValueWithInfinity::infinity();
  if (x.kind_ != y.kind_) fail(errc::out_of_domain, "adding values from different groups");
  if (x.kind_ == Kind::Pair) return ValueWithInfinity::pair(x.a_ + y.a_, x.b_ + y.b_);
  return ValueWithInfinity::finite(x.a_ + y.a_);
}

}  // namespace wk
