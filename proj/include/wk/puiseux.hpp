#pragma once

#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "wk/error.hpp"
#include "wk/fields.hpp"
#include "wk/series.hpp"
#include "wk/value.hpp"

namespace wk {

// Puiseux / truncated-Laurent series in t over a coefficient field F:
// finitely many terms c * t^(n/e) with a shared ramification index e.
//
// Every element carries a trust window: exponents <= hi/e are exactly known,
// anything above is unknown unless `exact` is set (then the stored support is
// the whole object and hi is only a materialization preference used when an
// operation, like division, must truncate an infinite expansion).
//
// Exponent keys are stored as integers n meaning n/e.  Negative exponents are
// allowed (Laurent part).
template <class F>
class Puiseux {
public:
  using Elem = typename F::Elem;

  Puiseux(const F& field, long e, long hi_num, bool exact = true)
      : field_(field), e_(e), hi_(hi_num), exact_(exact) {
    if (e < 1) fail(errc::ramified_index, "ramification index must be >= 1");
  }

  static Puiseux zero(const F& field, long trust = kDefaultTrust) {
    return Puiseux(field, 1, trust, true);
  }
  static Puiseux constant(const F& field, const Elem& c, long trust = kDefaultTrust) {
    Puiseux r(field, 1, trust, true);
    r.set_term(0, c);
    return r;
  }
  // c * t^(num/den)
  static Puiseux monomial(const F& field, const Elem& c, long num, long den = 1,
                          long trust = kDefaultTrust) {
    if (den < 1) fail(errc::out_of_domain, "exponent denominator must be positive");
    Puiseux r(field, den, std::max(trust * den, num), true);
    r.set_term(num, c);
    r.reduce();
    return r;
  }

  const F& field() const { return field_; }
  long ramification() const { return e_; }
  long trust_num() const { return hi_; }
  Rational trust_exponent() const { return rat(hi_, e_); }
  bool exact() const { return exact_; }
  const std::map<long, Elem>& terms() const { return terms_; }

  bool is_provably_zero() const { return terms_.empty() && exact_; }
  bool has_terms() const { return !terms_.empty(); }

  void set_term(long num, const Elem& c) {
    if (field_.is_zero(c))
      terms_.erase(num);
    else
      terms_.insert_or_assign(num, c);
  }

  Elem coeff(long num) const {
    auto it = terms_.find(num);
    return it == terms_.end() ? field_.zero() : it->second;
  }

  // Valuation = least support exponent.  +inf only for a provably zero
  // element; an empty truncated window cannot certify anything.
  ValueWithInfinity valuation() const {
    if (terms_.empty()) {
      if (exact_) return ValueWithInfinity::infinity();
      fail(errc::window_underflow,
           "no terms inside the trusted window; valuation cannot be certified");
    }
    return ValueWithInfinity::finite(rat(terms_.begin()->first, e_));
  }

  Rational val_finite() const {
    auto v = valuation();
    if (v.is_infinite()) fail(errc::zero_input, "valuation of zero");
    return v.scalar();
  }

  const Elem& leading_coeff() const {
    if (terms_.empty()) fail(errc::zero_input, "zero element has no leading coefficient");
    return terms_.begin()->second;
  }

  Puiseux marked_inexact() const {
    Puiseux r = *this;
    r.exact_ = false;
    return r;
  }

  // Drop any term above the trust bound (used after window shrinks).
  void clamp() {
    if (exact_) return;
    for (auto it = terms_.begin(); it != terms_.end();)
      it = (it->first > hi_) ? terms_.erase(it) : std::next(it);
  }

  // Canonical ramification: divide out the gcd of e and all exponents.
  void reduce() {
    long g = e_;
    for (const auto& [n, c] : terms_) g = std::gcd(g, n < 0 ? -n : n);
    if (g <= 1) return;
    std::map<long, Elem> nt;
    for (const auto& [n, c] : terms_) nt.emplace(n / g, c);
    terms_ = std::move(nt);
    // keep the window conservative: round the trust bound down
    hi_ = (hi_ >= 0) ? hi_ / g : -((-hi_ + g - 1) / g);
    e_ /= g;
  }

  // Rewrite on a finer ramification L (a multiple of e).
  Puiseux rescaled(long L) const {
    if (L % e_ != 0) fail(errc::ramified_index, "ramification is not a multiple");
    long s = L / e_;
    Puiseux r(field_, L, hi_ * s, exact_);
    for (const auto& [n, c] : terms_) r.terms_.emplace(n * s, c);
    return r;
  }

  friend Puiseux operator+(const Puiseux& a, const Puiseux& b) { return add_sub(a, b, false); }
  friend Puiseux operator-(const Puiseux& a, const Puiseux& b) { return add_sub(a, b, true); }

  Puiseux operator-() const {
    Puiseux r(field_, e_, hi_, exact_);
    for (const auto& [n, c] : terms_) r.terms_.emplace(n, field_.neg(c));
    return r;
  }

  friend Puiseux operator*(const Puiseux& a, const Puiseux& b) {
    long L = std::lcm(a.e_, b.e_);
    Puiseux x = a.rescaled(L), y = b.rescaled(L);
    // 0 * anything = 0, even against an unknown tail.
    if (x.is_provably_zero() || y.is_provably_zero())
      return Puiseux(a.field_, 1, std::min(x.hi_, y.hi_) / L, true);
    bool exact = x.exact_ && y.exact_;
    long hi;
    if (exact) {
      hi = std::max(x.hi_, y.hi_);
    } else {
      // unknown tail of x (exponent > hi_x) times the leading term of y, and
      // symmetrically; use the window edge itself when a side has no terms.
      long vx = x.terms_.empty() ? x.hi_ : x.terms_.begin()->first;
      long vy = y.terms_.empty() ? y.hi_ : y.terms_.begin()->first;
      long hx = x.exact_ ? std::numeric_limits<long>::max() / 4 : x.hi_;
      long hy = y.exact_ ? std::numeric_limits<long>::max() / 4 : y.hi_;
      hi = std::min(hx + vy, hy + vx);
    }
    Puiseux r(a.field_, L, hi, exact);
    for (const auto& [nx, cx] : x.terms_)
      for (const auto& [ny, cy] : y.terms_) {
        long n = nx + ny;
        if (!exact && n > hi) continue;
        Elem p = a.field_.mul(cx, cy);
        auto it = r.terms_.find(n);
        if (it == r.terms_.end())
          r.terms_.emplace(n, p);
        else
          it->second = a.field_.add(it->second, p);
      }
    r.drop_zeros();
    r.reduce();
    return r;
  }

  friend Puiseux operator/(const Puiseux& a, const Puiseux& b) { return a * b.inverted(); }

  // Multiplicative inverse, expanded to the trust window (division always
  // yields a truncated object unless b is a single term).
  Puiseux inverted() const {
    if (terms_.empty()) {
      if (exact_) fail(errc::division_by_zero, "division by zero");
      fail(errc::window_underflow, "divisor has no certified leading term");
    }
    long v = terms_.begin()->first;
    Elem c = terms_.begin()->second;
    Elem cinv = field_.div(field_.one(), c);
    if (terms_.size() == 1) {
      // exact monomial inverse
      Puiseux r(field_, e_, exact_ ? std::max(hi_, -v) : hi_ - 2 * v, exact_);
      r.terms_.emplace(-v, cinv);
      r.reduce();
      return r;
    }
    // b = c t^v (1 + h).  h is known up to hi - v; the geometric expansion of
    // (1 + h)^{-1} holds on that same window, and the final t^{-v} shift puts
    // the result window at hi - 2v.  For an exact b the expansion is a pure
    // materialization choice.
    long window = exact_ ? std::max(hi_ - v, kDefaultTrust * e_) : hi_ - v;
    Puiseux h(field_, e_, window, false);
    for (auto it = std::next(terms_.begin()); it != terms_.end(); ++it)
      if (it->first - v <= window) h.terms_.emplace(it->first - v, field_.mul(it->second, cinv));
    Puiseux acc(field_, e_, window, false);
    acc.terms_.emplace(0, field_.one());
    Puiseux one = acc;
    long hval = h.terms_.empty() ? window + 1 : h.terms_.begin()->first;
    long steps = hval > 0 ? window / hval + 1 : 0;
    for (long i = 0; i < steps; ++i) acc = one - h * acc;
    // shift by t^{-v} and the constant
    Puiseux r(field_, e_, window - v, false);
    for (const auto& [n, cc] : acc.terms_) {
      Elem x = field_.mul(cc, cinv);
      if (!field_.is_zero(x) && n - v <= r.hi_) r.terms_.emplace(n - v, x);
    }
    r.reduce();
    return r;
  }

  Puiseux pow(unsigned long k) const {
    // x^0 = 1 exactly, even for truncated x; windows of later factors narrow
    // the product as needed.
    Puiseux acc = Puiseux::constant(field_, field_.one(), std::max(hi_ / e_, 1L));
    Puiseux base = *this;
    while (k) {
      if (k & 1) acc = acc * base;
      base = (k >>= 1) ? base * base : base;
    }
    return acc;
  }

  bool agree(const Puiseux& o) const {
    long L = std::lcm(e_, o.e_);
    Puiseux x = rescaled(L), y = o.rescaled(L);
    long w = std::min(x.exact_ ? std::numeric_limits<long>::max() / 4 : x.hi_,
                      y.exact_ ? std::numeric_limits<long>::max() / 4 : y.hi_);
    for (const auto& [n, c] : x.terms_) {
      if (n > w) continue;
      if (!field_.agree(c, y.coeff(n))) return false;
    }
    for (const auto& [n, c] : y.terms_) {
      if (n > w) continue;
      if (x.terms_.find(n) == x.terms_.end() && !field_.agree(field_.zero(), c)) return false;
    }
    return true;
  }

  std::string str() const;

  static constexpr long kDefaultTrust = 16;

private:
  static Puiseux add_sub(const Puiseux& a, const Puiseux& b, bool sub) {
    long L = std::lcm(a.e_, b.e_);
    Puiseux x = a.rescaled(L), y = b.rescaled(L);
    bool exact = x.exact_ && y.exact_;
    long hi;
    if (exact) {
      hi = std::max(x.hi_, y.hi_);
    } else {
      hi = std::min(x.exact_ ? std::numeric_limits<long>::max() / 4 : x.hi_,
                    y.exact_ ? std::numeric_limits<long>::max() / 4 : y.hi_);
    }
    Puiseux r(a.field_, L, hi, exact);
    for (const auto& [n, c] : x.terms_) {
      if (!exact && n > hi) continue;
      r.terms_.emplace(n, c);
    }
    for (const auto& [n, c] : y.terms_) {
      if (!exact && n > hi) continue;
      auto it = r.terms_.find(n);
      if (it == r.terms_.end())
        r.terms_.emplace(n, sub ? a.field_.neg(c) : c);
      else
        it->second = sub ? a.field_.sub(it->second, c) : a.field_.add(it->second, c);
    }
    r.drop_zeros();
    r.reduce();
    return r;
  }

  void drop_zeros() {
    for (auto it = terms_.begin(); it != terms_.end();)
      it = field_.is_zero(it->second) ? terms_.erase(it) : std::next(it);
  }

  F field_;
  long e_;
  long hi_;
  bool exact_;
  std::map<long, Elem> terms_;
};

template <class F>
std::string Puiseux<F>::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [n, c] : terms_) {
    std::string ts;
    if (n != 0) {
      long g = std::gcd(n < 0 ? -n : n, e_);
      long nn = n / g, ee = e_ / g;
      ts = "t";
      if (ee == 1) {
        if (nn != 1) ts += (nn > 1) ? "^" + std::to_string(nn) : "^(" + std::to_string(nn) + ")";
      } else {
        ts += "^(" + std::to_string(nn) + "/" + std::to_string(ee) + ")";
      }
    }
    if constexpr (std::is_same_v<Elem, Rational>) {
      Rational abs_c = c < 0 ? Rational(-c) : c;
      std::string cs = rat_str(abs_c);
      std::string term;
      if (ts.empty())
        term = cs;
      else if (abs_c == 1)
        term = ts;
      else
        term = cs + "*" + ts;
      if (out.empty())
        out = (c < 0 ? "-" : "") + term;
      else
        out += (c < 0 ? " - " : " + ") + term;
    } else {
      std::string cs = "(" + field_.str(c) + ")";
      std::string term = ts.empty() ? cs : cs + "*" + ts;
      out += out.empty() ? term : " + " + term;
    }
  }
  return out;
}

// --- truncated-Laurent coefficient field (infinite residue field) ----------

// The field of truncated Laurent series over Q in t, used as a coefficient
// field with |t| < 1 (t-adic valuation).  Its residue field is Q — infinite —
// which is exactly what the restricted-series maximum principle needs.
struct LaurentField {
  long trust = Puiseux<RationalField>::kDefaultTrust;

  using Elem = Puiseux<RationalField>;
  static constexpr bool exact = false;  // division truncates

  RationalField base{};

  Elem zero() const { return Elem::zero(base, trust); }
  Elem one() const { return Elem::constant(base, Rational(1), trust); }
  Elem from_long(long n) const { return Elem::constant(base, Rational(n), trust); }
  Elem from_rational(const Rational& q) const { return Elem::constant(base, q, trust); }
  Elem t_power(long num, long den = 1) const {
    return Elem::monomial(base, Rational(1), num, den, trust);
  }

  Elem add(const Elem& a, const Elem& b) const { return a + b; }
  Elem sub(const Elem& a, const Elem& b) const { return a - b; }
  Elem mul(const Elem& a, const Elem& b) const { return a * b; }
  Elem neg(const Elem& a) const { return -a; }
  Elem div(const Elem& a, const Elem& b) const { return a / b; }

  bool is_zero(const Elem& a) const { return !a.has_terms(); }
  bool eq(const Elem& a, const Elem& b) const {
    return a.exact() == b.exact() && a.agree(b) && b.agree(a);
  }
  bool agree(const Elem& a, const Elem& b) const { return a.agree(b); }

  std::optional<Elem> kth_root(const Elem& a, unsigned k,
                               const std::optional<Elem>& branch = std::nullopt) const {
    (void)branch;
    // Supported for single-term elements only (all the library needs).
    if (!a.has_terms()) return a;
    if (a.terms().size() != 1) return std::nullopt;
    auto [n, c] = *a.terms().begin();
    auto croot = rational_kth_root(c, k);
    if (!croot) return std::nullopt;
    long e = a.ramification();
    return Elem::monomial(base, *croot, n, e * static_cast<long>(k), trust);
  }

  std::string str(const Elem& a) const { return a.str(); }
  bool compatible(const LaurentField&) const { return true; }
};

// --- dominance --------------------------------------------------------------

enum class ValuationTag { Trivial, TAdic, CompositeP };

struct DominanceVerdict {
  bool precedes_eq;             // a dominated-or-equivalent: va >= vb
  bool strictly_precedes;       // va > vb
  bool equivalent;              // va = vb
  std::optional<bool> similar;  // a ~ b, i.e. v(a-b) > va; unset when a = 0

  bool similar_or_throw() const {
    if (!similar)
      fail(errc::zero_operand_ambiguity, "a ~ b is undefined for a = 0");
    return *similar;
  }
};

// Value of a Puiseux element under a valuation tag.
template <class F>
ValueWithInfinity tagged_value(const Puiseux<F>& a, ValuationTag tag) {
  switch (tag) {
    case ValuationTag::Trivial: {
      auto v = a.valuation();  // certifies zero vs nonzero
      return v.is_infinite() ? v : ValueWithInfinity::finite(Rational(0));
    }
    case ValuationTag::TAdic:
      return a.valuation();
    case ValuationTag::CompositeP: {
      if constexpr (std::is_same_v<typename F::Elem, PAdic>) {
        auto v = a.valuation();
        if (v.is_infinite()) return v;
        const PAdic& lead = a.leading_coeff();
        return ValueWithInfinity::pair(v.scalar(), Rational(lead.val()));
      } else {
        fail(errc::out_of_domain, "composite valuation requires p-adic coefficients");
      }
    }
  }
  fail(errc::out_of_domain, "unknown valuation tag");
}

template <class F>
DominanceVerdict dominance_compare(const Puiseux<F>& a, const Puiseux<F>& b, ValuationTag tag) {
  ValueWithInfinity va = tagged_value(a, tag);
  ValueWithInfinity vb = tagged_value(b, tag);
  DominanceVerdict v{};
  v.precedes_eq = va >= vb;
  v.strictly_precedes = va > vb;
  v.equivalent = va == vb;
  if (va.is_infinite()) {
    v.similar = std::nullopt;  // a = 0: a - b strictly below a is unsatisfiable
  } else {
    ValueWithInfinity vd = tagged_value(a - b, tag);
    v.similar = vd > va;
  }
  return v;
}

// --- coarsening / specialization --------------------------------------------

struct CoarsenResult {
  Rational coarse;            // t-order
  PAdic residue;              // leading coefficient = specialization image
  ValueWithInfinity composite;  // (coarse, v_p(residue))
};

inline CoarsenResult coarsen_specialize(const Puiseux<PAdicField>& a) {
  auto v = a.valuation();
  if (v.is_infinite()) fail(errc::zero_input, "cannot coarsen the zero element");
  const PAdic& lead = a.leading_coeff();
  return {v.scalar(), lead, ValueWithInfinity::pair(v.scalar(), Rational(lead.val()))};
}

// --- evaluation of formal series at infinitesimal points ---------------------

// f(a_1, ..., a_m) for Puiseux points of strictly positive valuation.  For a
// truncated f the unknown tail (total degree > D) contributes t-exponents of
// at least (D+1) * min val(a_i); the result window is cut strictly below that
// bound and the result is marked inexact.
template <class F>
Puiseux<F> eval_infinitesimal(const Series<F>& f, const std::vector<Puiseux<F>>& a) {
  if (static_cast<std::size_t>(f.nvars()) != a.size())
    fail(errc::variable_count_mismatch, "one Puiseux point coordinate per variable");
  const F& k = f.field();

  Rational vmin;
  bool first = true;
  for (const auto& ai : a) {
    if (ai.is_provably_zero())
      fail(errc::not_infinitesimal, "coordinate is zero, not a positive infinitesimal");
    auto v = ai.valuation();  // WindowUnderflow for uncertified empties
    if (!(v.scalar() > 0)) fail(errc::not_infinitesimal, "coordinate has non-positive valuation");
    if (first || v.scalar() < vmin) vmin = v.scalar();
    first = false;
  }

  long trust = Puiseux<F>::kDefaultTrust;
  for (const auto& ai : a) trust = std::max(trust, ai.trust_num() / ai.ramification() + 1);

  std::vector<std::vector<Puiseux<F>>> pows(a.size());
  auto power = [&](std::size_t i, unsigned e) -> const Puiseux<F>& {
    auto& col = pows[i];
    if (col.empty()) col.push_back(Puiseux<F>::constant(k, k.one(), trust));
    while (col.size() <= e) col.push_back(col.back() * a[i]);
    return col[e];
  };

  Puiseux<F> acc = Puiseux<F>::zero(k, trust);
  for (const auto& [alpha, c] : f.terms()) {
    Puiseux<F> t = Puiseux<F>::constant(k, c, trust);
    for (std::size_t i = 0; i < a.size(); ++i)
      if (alpha[i] > 0) t = t * power(i, alpha[i]);
    acc = acc + t;
  }

  if (!f.exact()) {
    // largest multiple of 1/E strictly below (D+1) * vmin
    Rational bound = Rational(f.order() + 1) * vmin;
    long E = acc.ramification();
    Rational scaled = bound * Rational(E);
    Integer num = scaled.get_num(), den = scaled.get_den();
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    long cap = fl.get_si();
    if (den == 1) cap -= 1;  // strictly below an exact multiple
    long w = acc.exact() ? cap : std::min(cap, acc.trust_num());
    Puiseux<F> capped(k, E, w, false);
    for (const auto& [n, cc] : acc.terms())
      if (n <= w) capped.set_term(n, cc);
    capped.reduce();
    return capped;
  }
  return acc;
}

}  // namespace wk
