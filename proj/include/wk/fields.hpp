#pragma once

#include <optional>
#include <string>

#include "wk/error.hpp"
#include "wk/padic.hpp"
#include "wk/rational.hpp"

namespace wk {

// Coefficient fields are small stateless-or-nearly descriptor objects with a
// common informal interface, consumed by the series templates:
//
//   using Elem = ...;             element type
//   static constexpr bool exact;  true when arithmetic never loses digits
//   Elem zero(), one(), from_long(l), from_rational(q)
//   add / sub / mul / div / neg, is_zero, eq (representation equality),
//   agree (consistency to shared precision), kth_root, str, compatible
//
// kth_root returns nullopt when the element provably has no k-th root in the
// field; a branch hint selects among several (BadBranch on a useless hint).

struct RationalField {
  using Elem = Rational;
  static constexpr bool exact = true;

  Elem zero() const { return Rational(0); }
  Elem one() const { return Rational(1); }
  Elem from_long(long n) const { return Rational(n); }
  Elem from_rational(const Rational& q) const { return q; }

  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem div(const Elem& a, const Elem& b) const {
    if (b == 0) fail(errc::division_by_zero, "rational division by zero");
    return a / b;
  }

  bool is_zero(const Elem& a) const { return a == 0; }
  bool eq(const Elem& a, const Elem& b) const { return a == b; }
  bool agree(const Elem& a, const Elem& b) const { return a == b; }

  // Over Q a branch hint can only choose the sign of an even root.
  std::optional<Elem> kth_root(const Elem& a, unsigned k,
                               const std::optional<Elem>& branch = std::nullopt) const {
    auto r = rational_kth_root(a, k);
    if (!r) return std::nullopt;
    if (branch && k % 2 == 0 && *r != 0) {
      if (*branch == 0) fail(errc::bad_branch, "zero branch hint for a nonzero root");
      if (*branch < 0) return Elem(-*r);
    } else if (branch && k % 2 == 1 && ((*branch < 0) != (*r < 0)) && *r != 0) {
      fail(errc::bad_branch, "sign of branch hint conflicts with the unique real root");
    }
    return r;
  }

  std::string str(const Elem& a) const { return rat_str(a); }
  bool compatible(const RationalField&) const { return true; }
};

struct PAdicField {
  long p = 2;
  int prec = 8;

  using Elem = PAdic;
  static constexpr bool exact = false;

  Elem zero() const { return PAdic::zero(p, prec); }
  Elem one() const { return PAdic::from_rational(Rational(1), p, prec); }
  Elem from_long(long n) const { return PAdic::from_rational(Rational(n), p, prec); }
  Elem from_rational(const Rational& q) const { return PAdic::from_rational(q, p, prec); }

  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem div(const Elem& a, const Elem& b) const { return a / b; }

  bool is_zero(const Elem& a) const { return a.is_zero(); }
  bool eq(const Elem& a, const Elem& b) const { return a.same_representation(b); }

  // Consistency to the precision both sides actually carry.
  bool agree(const Elem& a, const Elem& b) const {
    if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
    if (a.val() != b.val()) return false;
    int n = std::min(a.prec(), b.prec());
    Integer m = int_pow(Integer(p), static_cast<unsigned long>(n));
    return mod_reduce(a.unit(), m) == mod_reduce(b.unit(), m);
  }

  std::optional<Elem> kth_root(const Elem& a, unsigned k,
                               const std::optional<Elem>& branch = std::nullopt) const {
    std::optional<Integer> hint;
    if (branch) {
      if (branch->is_zero() || branch->val() != 0)
        fail(errc::bad_branch, "branch hint must be a p-adic unit");
      hint = branch->unit();
    }
    try {
      return padic_kth_root(a, k, hint);
    } catch (const Error& e) {
      if (e.code() == errc::no_root) return std::nullopt;
      throw;  // BadBranch / RamifiedIndex keep their meaning
    }
  }

  std::string str(const Elem& a) const { return a.str(); }
  bool compatible(const PAdicField& o) const { return p == o.p; }
};

}  // namespace wk
