#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wk/error.hpp"
#include "wk/fields.hpp"

namespace wk {

// Exponent vector; one entry per variable.
using Mono = std::vector<unsigned>;

inline unsigned long mono_degree(const Mono& a) {
  unsigned long s = 0;
  for (unsigned e : a) s += e;
  return s;
}

// Ascending total degree, ties broken lexicographically with the earlier
// variables dominating — the canonical display/storage order (so X1^2 sorts
// before X1*X2 inside degree 2).
struct GradedLex {
  bool operator()(const Mono& a, const Mono& b) const {
    unsigned long da = mono_degree(a), db = mono_degree(b);
    if (da != db) return da < db;
    return a > b;
  }
};

// Product degree cap for opportunistic exact (non-truncating) arithmetic on
// polynomial operands; beyond it operations fall back to truncated mode.
inline constexpr long kExactOrderCap = 4096;

// Sparse multivariate power series truncated by total degree.
//
// `order` is the working order D: stored terms all have total degree <= D and
// the object stands for "the true series modulo degree D+..." more precisely
// modulo total degree > D.  `exact` records that the stored terms are the
// whole object (a polynomial known exactly), in which case D is merely a
// bookkeeping floor and may be raised freely.
//
// Operations on two exact polynomials stay exact (raising the order as
// needed, within kExactOrderCap); anything that drops a nonzero term clears
// the flag.
template <class F>
class Series {
public:
  using Elem = typename F::Elem;
  using TermMap = std::map<Mono, Elem, GradedLex>;

  Series(const F& field, int nvars, long order, bool exact = true)
      : field_(field), nvars_(nvars), order_(order), exact_(exact) {
    if (nvars < 1) fail(errc::variable_count_mismatch, "at least one variable required");
    if (order < 0) fail(errc::out_of_domain, "negative truncation order");
  }

  static Series zero(const F& field, int nvars, long order) {
    return Series(field, nvars, order, true);
  }
  static Series constant(const F& field, int nvars, long order, const Elem& c) {
    Series s(field, nvars, order, true);
    s.set_coeff(Mono(nvars, 0), c);
    return s;
  }
  // The coordinate X_{i+1} (0-based index i).
  static Series coordinate(const F& field, int nvars, int i, long order) {
    if (i < 0 || i >= nvars) fail(errc::variable_count_mismatch, "coordinate index out of range");
    if (order < 1) fail(errc::out_of_domain, "order too small for a coordinate");
    Series s(field, nvars, order, true);
    Mono m(nvars, 0);
    m[i] = 1;
    s.set_coeff(m, field.one());
    return s;
  }
  static Series monomial(const F& field, int nvars, const Mono& alpha, const Elem& c, long order) {
    Series s(field, nvars, std::max<long>(order, static_cast<long>(mono_degree(alpha))), true);
    s.set_coeff(alpha, c);
    return s;
  }

  const F& field() const { return field_; }
  int nvars() const { return nvars_; }
  long order() const { return order_; }
  bool exact() const { return exact_; }
  const TermMap& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  bool is_zero() const { return terms_.empty(); }
  long degree() const {
    return terms_.empty() ? -1 : static_cast<long>(mono_degree(terms_.rbegin()->first));
  }

  Elem coeff(const Mono& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? field_.zero() : it->second;
  }
  Elem constant_term() const { return coeff(Mono(nvars_, 0)); }
  bool is_unit() const { return !field_.is_zero(constant_term()); }

  void set_coeff(const Mono& alpha, const Elem& c) {
    if (static_cast<int>(alpha.size()) != nvars_)
      fail(errc::variable_count_mismatch, "exponent vector has wrong length");
    if (static_cast<long>(mono_degree(alpha)) > order_)
      fail(errc::out_of_domain, "term beyond truncation order");
    if (field_.is_zero(c))
      terms_.erase(alpha);
    else
      terms_.insert_or_assign(alpha, c);
  }

  // Cap at total degree L; dropping a nonzero term clears exactness.
  Series truncated(long L) const {
    Series r(field_, nvars_, std::min(order_, L), exact_);
    for (const auto& [a, c] : terms_) {
      if (static_cast<long>(mono_degree(a)) > L) {  // sorted by degree
        r.exact_ = false;
        break;
      }
      r.terms_.emplace(a, c);
    }
    return r;
  }

  // Raise the working order.  Sound only for exact polynomials.
  Series with_order(long L) const {
    if (L <= order_) return truncated(L);
    if (!exact_) fail(errc::out_of_domain, "cannot extend the order of a truncated series");
    Series r = *this;
    r.order_ = L;
    return r;
  }

  // Reinterpret inside the truncated ring at order L without any claim of
  // added knowledge (flag is cleared unless nothing changes).  Internal tool
  // for the division paths, whose own contracts state reliability orders.
  Series in_truncated_ring(long L) const {
    if (L == order_) return *this;
    if (L < order_) return truncated(L);
    Series r = *this;
    r.order_ = L;
    r.exact_ = false;
    return r;
  }

  // Caller asserts the stored terms are the entire object.
  Series as_exact_polynomial() const {
    Series r = *this;
    r.exact_ = true;
    return r;
  }

  Series marked_inexact() const {
    Series r = *this;
    r.exact_ = false;
    return r;
  }

  friend Series operator+(const Series& a, const Series& b) { return add_sub(a, b, false); }
  friend Series operator-(const Series& a, const Series& b) { return add_sub(a, b, true); }

  Series operator-() const {
    Series r(field_, nvars_, order_, exact_);
    for (const auto& [a, c] : terms_) r.terms_.emplace(a, field_.neg(c));
    return r;
  }

  friend Series operator*(const Series& a, const Series& b) {
    a.check_compat(b);
    long order;
    bool resexact;
    if (a.exact_ && b.exact_) {
      long degsum = (a.is_zero() || b.is_zero()) ? 0 : a.degree() + b.degree();
      if (degsum <= kExactOrderCap) {
        order = std::max({a.order_, b.order_, degsum});
        resexact = true;
      } else {
        order = std::min(a.order_, b.order_);
        resexact = false;
      }
    } else {
      order = std::min(a.order_, b.order_);
      resexact = false;
    }
    Series r(a.field_, a.nvars_, order, resexact);
    for (const auto& [am, ac] : a.terms_) {
      long da = static_cast<long>(mono_degree(am));
      if (da > order) break;
      for (const auto& [bm, bc] : b.terms_) {
        if (da + static_cast<long>(mono_degree(bm)) > order) break;  // sorted by degree
        Mono m(a.nvars_);
        for (int i = 0; i < a.nvars_; ++i) m[static_cast<std::size_t>(i)] = am[static_cast<std::size_t>(i)] + bm[static_cast<std::size_t>(i)];
        typename F::Elem prod = a.field_.mul(ac, bc);
        auto it = r.terms_.find(m);
        if (it == r.terms_.end())
          r.terms_.emplace(m, prod);
        else
          it->second = a.field_.add(it->second, prod);
      }
    }
    r.drop_zeros();
    return r;
  }

  Series scale(const Elem& c) const {
    Series r(field_, nvars_, order_, exact_);
    if (field_.is_zero(c)) return r;
    for (const auto& [a, t] : terms_) {
      Elem v = field_.mul(t, c);
      if (!field_.is_zero(v)) r.terms_.emplace(a, v);
    }
    return r;
  }

  Series pow(unsigned long e) const {
    Series acc = Series::constant(field_, nvars_, order_, field_.one());
    acc.exact_ = exact_ || e == 0;
    Series base = *this;
    while (e) {
      if (e & 1) acc = acc * base;
      base = (e >>= 1) ? base * base : base;
    }
    return acc;
  }

  // --- structure with respect to the last variable -----------------------

  long last_var_degree() const {
    long d = -1;
    for (const auto& [a, c] : terms_) d = std::max(d, static_cast<long>(a.back()));
    return d;
  }

  // Terms with X_m-exponent < d.
  Series low_part(long d) const {
    Series r(field_, nvars_, order_, exact_);
    for (const auto& [a, c] : terms_)
      if (static_cast<long>(a.back()) < d) r.terms_.emplace(a, c);
    return r;
  }

  // Terms with X_m-exponent >= d, shifted down by X_m^d.
  Series high_shift(long d) const {
    Series r(field_, nvars_, order_, exact_);
    for (const auto& [a, c] : terms_)
      if (static_cast<long>(a.back()) >= d) {
        Mono m = a;
        m.back() -= static_cast<unsigned>(d);
        r.terms_.emplace(std::move(m), c);
      }
    return r;
  }

  // The X'-coefficient of X_m^k, kept in the same variable count.
  Series last_var_coeff(long k) const {
    Series r(field_, nvars_, order_, exact_);
    for (const auto& [a, c] : terms_)
      if (static_cast<long>(a.back()) == k) {
        Mono m = a;
        m.back() = 0;
        r.terms_.emplace(std::move(m), c);
      }
    return r;
  }

  // Multiply by X_m^e (raises the order with it).
  Series mul_last_var_pow(long e) const {
    Series r(field_, nvars_, order_ + e, exact_);
    for (const auto& [a, c] : terms_) {
      Mono m = a;
      m.back() += static_cast<unsigned>(e);
      r.terms_.emplace(std::move(m), c);
    }
    return r;
  }

  // --- comparisons --------------------------------------------------------

  bool same_terms(const Series& b) const {
    if (nvars_ != b.nvars_ || terms_.size() != b.terms_.size()) return false;
    auto it = b.terms_.begin();
    for (const auto& [a, c] : terms_) {
      if (a != it->first || !field_.eq(c, it->second)) return false;
      ++it;
    }
    return true;
  }

  // Coefficient-wise consistency up to total degree L.
  bool agree_mod(const Series& b, long L) const {
    if (nvars_ != b.nvars_) return false;
    for (const auto& [a, c] : terms_) {
      if (static_cast<long>(mono_degree(a)) > L) break;
      if (!field_.agree(c, b.coeff(a))) return false;
    }
    for (const auto& [a, c] : b.terms_) {
      if (static_cast<long>(mono_degree(a)) > L) break;
      if (terms_.find(a) == terms_.end() && !field_.agree(field_.zero(), c)) return false;
    }
    return true;
  }

  std::string str() const;

private:
  void check_compat(const Series& b) const {
    if (nvars_ != b.nvars_)
      fail(errc::variable_count_mismatch, "operands have different variable counts");
    if (!field_.compatible(b.field_))
      fail(errc::out_of_domain, "operands over incompatible coefficient fields");
  }

  static Series add_sub(const Series& a, const Series& b, bool sub) {
    a.check_compat(b);
    bool resexact = a.exact_ && b.exact_;
    long order = resexact ? std::max(a.order_, b.order_) : std::min(a.order_, b.order_);
    Series r(a.field_, a.nvars_, order, resexact);
    for (const auto& [m, c] : a.terms_) {
      if (static_cast<long>(mono_degree(m)) > order) break;
      r.terms_.emplace(m, c);
    }
    for (const auto& [m, c] : b.terms_) {
      if (static_cast<long>(mono_degree(m)) > order) break;
      auto it = r.terms_.find(m);
      if (it == r.terms_.end()) {
        r.terms_.emplace(m, sub ? a.field_.neg(c) : c);
      } else {
        it->second = sub ? a.field_.sub(it->second, c) : a.field_.add(it->second, c);
      }
    }
    r.drop_zeros();
    return r;
  }

  void drop_zeros() {
    for (auto it = terms_.begin(); it != terms_.end();) {
      if (field_.is_zero(it->second))
        it = terms_.erase(it);
      else
        ++it;
    }
  }

  F field_;
  int nvars_;
  long order_;
  bool exact_;
  TermMap terms_;
};

// --- printing --------------------------------------------------------------

inline std::string mono_str(const Mono& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "X" + std::to_string(i + 1);
    if (a[i] > 1) s += "^" + std::to_string(a[i]);
  }
  return s;
}

template <class F>
std::string Series<F>::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [a, c] : terms_) {
    std::string ms = mono_str(a);
    if constexpr (std::is_same_v<Elem, Rational>) {
      Rational abs_c = c < 0 ? Rational(-c) : c;
      std::string cs = rat_str(abs_c);
      std::string term;
      if (ms.empty())
        term = cs;
      else if (abs_c == 1)
        term = ms;
      else
        term = cs + "*" + ms;
      if (out.empty())
        out = (c < 0 ? "-" : "") + term;
      else
        out += (c < 0 ? " - " : " + ") + term;
    } else {
      std::string cs = "(" + field_.str(c) + ")";
      std::string term = ms.empty() ? cs : cs + "*" + ms;
      out += out.empty() ? term : " + " + term;
    }
  }
  return out;
}

// --- basic derived operations -----------------------------------------------

// Multiplicative inverse modulo the working order via the geometric series
// around the (necessarily unit) constant term.
template <class F>
Series<F> series_invert(const Series<F>& f) {
  auto c = f.constant_term();
  if (f.field().is_zero(c)) fail(errc::not_a_unit, "constant term is zero");
  long D = f.order();
  const F& k = f.field();
  auto cinv = k.div(k.one(), c);
  // f = c (1 - h) with ord(h) >= 1
  Series<F> h = (Series<F>::constant(k, f.nvars(), D, c) - f).scale(cinv).truncated(D);
  Series<F> one = Series<F>::constant(k, f.nvars(), D, k.one());
  if (h.is_zero()) {
    Series<F> r = one.scale(cinv);
    return f.exact() ? r : r.marked_inexact();
  }
  Series<F> acc = one;
  for (long i = 0; i < D; ++i) acc = (one + h * acc).truncated(D);
  return acc.scale(cinv).marked_inexact();
}

// Order of the pure-X_m part within the working order: the regularity degree
// when it exists.
template <class F>
std::optional<long> regular_degree(const Series<F>& f) {
  for (long j = 0; j <= f.order(); ++j) {
    Mono a(static_cast<std::size_t>(f.nvars()), 0);
    a.back() = static_cast<unsigned>(j);
    if (!f.field().is_zero(f.coeff(a))) return j;
  }
  return std::nullopt;
}

template <class F>
struct WDivision {
  Series<F> q, r;
  long d;                // regularity degree of the divisor
  long reliable_order;   // q and r match the untruncated division to this degree
};

// Weierstrass division f = q g + r with deg_{X_m} r < d, for g regular in
// X_m of degree d.  Fixed-point contraction along the (X')-adic filtration:
// write g = g_low + X_m^d e with e a unit and every g_low monomial touching
// X'; then q is the unique fixed point of  q -> e^{-1} H_d(f - q g_low)
// where H_d extracts the X_m^d-and-above part shifted down.  Each pass
// gains one X'-order, so the iteration stabilizes within order+2 passes in
// the truncated ring, where the identity f = qg + r then holds exactly.
// Against the untruncated division, q and r are reliable modulo degree D-d.
template <class F>
WDivision<F> weierstrass_divide(const Series<F>& f, const Series<F>& g) {
  if (f.nvars() != g.nvars())
    fail(errc::variable_count_mismatch, "dividend and divisor variable counts differ");
  long D = std::min(f.order(), g.order());
  auto dreg = regular_degree(g.truncated(D));
  if (!dreg) fail(errc::not_regular, "divisor is not regular in the last variable up to the working order");
  long d = *dreg;

  Series<F> fD = f.in_truncated_ring(D);
  Series<F> gD = g.in_truncated_ring(D);
  Series<F> g_low = gD.low_part(d);
  Series<F> e = gD.high_shift(d);
  Series<F> einv = series_invert(e);

  Series<F> q = Series<F>::zero(f.field(), f.nvars(), D);
  bool converged = false;
  for (long it = 0; it <= D + 2; ++it) {
    Series<F> R = fD - (q * g_low).truncated(D);
    Series<F> qn = (einv * R.high_shift(d)).truncated(D);
    if (qn.same_terms(q)) {
      converged = true;
      break;
    }
    q = qn;
  }
  if (!converged) throw std::logic_error("weierstrass_divide: fixed point did not stabilize");

  Series<F> r = (fD - (q * g_low).truncated(D)).low_part(d);

  // Promote to exact when the result is checkably a polynomial identity.
  if (f.exact() && g.exact()) {
    Series<F> qE = q.as_exact_polynomial();
    Series<F> rE = r.as_exact_polynomial();
    long W = std::max({f.degree(), qE.degree() + std::max<long>(g.degree(), 0), rE.degree(), 0L});
    if (W <= kExactOrderCap) {
      Series<F> E = f.with_order(W) - qE * g - rE;
      if (E.is_zero()) return {qE, rE, d, D - d};
    }
  }
  return {q.marked_inexact(), r.marked_inexact(), d, D - d};
}

template <class F>
struct WPreparation {
  Series<F> u, w;
  long d;
};

// Weierstrass preparation g = u * w with u a unit and w = X_m^d - r monic
// with lower coefficients vanishing at X' = 0.  Computed by dividing X_m^d
// by g: X_m^d = q g + r gives w = X_m^d - r and u = q^{-1}.
template <class F>
WPreparation<F> weierstrass_prepare(const Series<F>& g) {
  long D = g.order();
  auto dreg = regular_degree(g);
  if (!dreg) fail(errc::not_regular, "input is not regular in the last variable up to the working order");
  long d = *dreg;
  Mono xm(static_cast<std::size_t>(g.nvars()), 0);
  xm.back() = static_cast<unsigned>(d);
  Series<F> xd = Series<F>::monomial(g.field(), g.nvars(), xm, g.field().one(), D);
  auto div = weierstrass_divide(xd, g);
  Series<F> u = series_invert(div.q.in_truncated_ring(D));
  Series<F> w = xd.in_truncated_ring(D) - div.r.in_truncated_ring(D);
  return {u, w, d};
}

// Euclidean division by a monic degree-d polynomial in the last variable
// (the leading coefficient must be the constant 1).  Test path for the
// uniqueness property: agrees with weierstrass_divide modulo degree D - d.
template <class F>
std::pair<Series<F>, Series<F>> poly_divide_last_var(const Series<F>& f, const Series<F>& w, long d) {
  long D = std::min(f.order(), w.order());
  Series<F> cur = f.in_truncated_ring(D);
  Series<F> wD = w.in_truncated_ring(D);
  Series<F> q = Series<F>::zero(f.field(), f.nvars(), D);
  long k;
  while ((k = cur.last_var_degree()) >= d) {
    Series<F> t = cur.last_var_coeff(k).mul_last_var_pow(k - d).in_truncated_ring(D);
    q = q + t;
    cur = (cur - (t * wD).truncated(D)).in_truncated_ring(D);
  }
  return {q, cur};
}

// The shear X_i -> X_i + X_m^{d^{m-i}} (last variable fixed); with
// inverse=true the signs flip, giving the two-sided inverse.
template <class F>
Series<F> tau_shear(const Series<F>& f, long d, bool inverse = false);

template <class F>
struct Regularized {
  Series<F> sheared;
  long d;
  long reg_degree;
};

// Search d = 1, 2, ... for a shear making f regular in the last variable.
template <class F>
Regularized<F> regularize(const Series<F>& f, long bound = 16) {
  if (f.is_zero()) fail(errc::zero_input, "cannot regularize the zero series");
  if (bound < 1) fail(errc::out_of_domain, "empty search bound");
  for (long d = 1; d <= bound; ++d) {
    Series<F> s = tau_shear(f, d);
    if (auto rd = regular_degree(s)) return {s, d, *rd};
  }
  fail(errc::regularization_failed,
       "no shear with d <= " + std::to_string(bound) + " made the series regular");
}

// Composition f(g_1, ..., g_n) for infinitesimal g_i (zero constant terms).
// Exact when everything in sight is an exact polynomial of manageable degree;
// otherwise truncated at the smallest working order among the inputs.
template <class F>
Series<F> substitute(const Series<F>& f, const std::vector<Series<F>>& gs) {
  if (static_cast<std::size_t>(f.nvars()) != gs.size())
    fail(errc::variable_count_mismatch, "one substituted series required per variable");
  const F& k = f.field();
  int m = gs.front().nvars();
  for (const auto& g : gs) {
    if (g.nvars() != m)
      fail(errc::variable_count_mismatch, "substituted series have differing variable counts");
    if (!k.compatible(g.field()))
      fail(errc::out_of_domain, "substituted series over an incompatible field");
    if (!k.is_zero(g.constant_term()))
      fail(errc::non_infinitesimal_argument, "substituted series has a nonzero constant term");
  }

  bool all_exact = f.exact();
  for (const auto& g : gs) all_exact = all_exact && g.exact();
  long workorder;
  if (all_exact) {
    long W = 0;
    for (const auto& [a, c] : f.terms()) {
      long w = 0;
      for (std::size_t i = 0; i < gs.size(); ++i)
        w += static_cast<long>(a[i]) * std::max<long>(gs[i].degree(), 0);
      W = std::max(W, w);
    }
    if (W <= kExactOrderCap) {
      workorder = std::max(W, 1L);
    } else {
      all_exact = false;
      workorder = f.order();
      for (const auto& g : gs) workorder = std::min(workorder, g.order());
    }
  } else {
    workorder = f.order();
    for (const auto& g : gs) workorder = std::min(workorder, g.order());
  }

  // Cached powers of each argument at the working order.
  std::vector<std::vector<Series<F>>> pows(gs.size());
  auto power = [&](std::size_t i, unsigned e) -> const Series<F>& {
    auto& col = pows[i];
    if (col.empty())
      col.push_back(Series<F>::constant(k, m, workorder, k.one()));
    while (col.size() <= e) {
      Series<F> next = col.back() * (all_exact ? gs[i].with_order(workorder)
                                               : gs[i].truncated(workorder));
      col.push_back(next.truncated(workorder));
    }
    return col[e];
  };

  Series<F> acc = Series<F>::zero(k, m, workorder);
  for (const auto& [a, c] : f.terms()) {
    if (static_cast<long>(mono_degree(a)) > workorder && !all_exact) continue;
    Series<F> t = Series<F>::constant(k, m, workorder, c);
    for (std::size_t i = 0; i < gs.size(); ++i)
      if (a[i] > 0) t = (t * power(i, a[i])).truncated(workorder);
    acc = acc + t;
  }
  return all_exact ? acc : acc.marked_inexact();
}

template <class F>
Series<F> tau_shear(const Series<F>& f, long d, bool inverse) {
  if (d < 1) fail(errc::out_of_domain, "shear parameter must be >= 1");
  int m = f.nvars();
  const F& k = f.field();
  if (m == 1) return f;
  // Weights d^{m-1}, ..., d, 1.
  std::vector<long> weight(static_cast<std::size_t>(m), 1);
  for (int i = m - 2; i >= 0; --i) {
    weight[static_cast<std::size_t>(i)] = weight[static_cast<std::size_t>(i) + 1] * d;
    if (weight[static_cast<std::size_t>(i)] > kExactOrderCap)
      fail(errc::out_of_domain, "shear weight overflows the supported order range");
  }
  long gorder = std::max(f.order(), weight.front());
  std::vector<Series<F>> gs;
  gs.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    Series<F> gi = Series<F>::coordinate(k, m, i, gorder);
    if (i != m - 1) {
      Mono a(static_cast<std::size_t>(m), 0);
      a.back() = static_cast<unsigned>(weight[static_cast<std::size_t>(i)]);
      gi.set_coeff(a, inverse ? k.neg(k.one()) : k.one());
    }
    gs.push_back(std::move(gi));
  }
  return substitute(f, gs);
}

// Truncated evaluation at a point (finite sum over the stored terms).
template <class F>
typename F::Elem series_eval(const Series<F>& f, const std::vector<typename F::Elem>& a) {
  if (static_cast<std::size_t>(f.nvars()) != a.size())
    fail(errc::variable_count_mismatch, "one coordinate required per variable");
  const F& k = f.field();
  auto acc = k.zero();
  for (const auto& [alpha, c] : f.terms()) {
    auto t = c;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (unsigned e = 0; e < alpha[i]; ++e) t = k.mul(t, a[i]);
    acc = k.add(acc, t);
  }
  return acc;
}

// k-th root of a series with unit constant term, by Newton iteration
// g <- g - (g^k - f) / (k g^{k-1}); quadratically convergent in the
// (X)-adic filtration from the exact constant-term root.
template <class F>
Series<F> hensel_root(const Series<F>& f, unsigned k,
                      std::optional<typename F::Elem> branch = std::nullopt) {
  if (k == 0) fail(errc::wrong_arity, "0th root");
  const F& fld = f.field();
  auto c0 = f.constant_term();
  if (fld.is_zero(c0)) fail(errc::no_constant_root, "constant term is zero");
  auto root = fld.kth_root(c0, k, branch);
  if (!root) fail(errc::no_constant_root, "constant term has no k-th root in the coefficient field");
  if (k == 1) return f;

  long D = f.order();
  auto kelem = fld.from_long(static_cast<long>(k));
  Series<F> g = Series<F>::constant(fld, f.nvars(), D, *root);
  long correct = 1;
  while (correct <= D) {
    Series<F> gk1 = g.pow(k - 1).truncated(D);
    Series<F> resid = (gk1 * g).truncated(D) - f.truncated(D);
    if (resid.is_zero()) break;
    g = (g - resid * series_invert(gk1.scale(kelem))).truncated(D);
    correct *= 2;
  }

  if (f.exact()) {
    Series<F> gE = g.as_exact_polynomial();
    if (gE.degree() * static_cast<long>(k) <= kExactOrderCap) {
      Series<F> E = gE.pow(k) - f.with_order(std::max(f.order(), gE.degree() * static_cast<long>(k)));
      if (E.is_zero()) return gE;
    }
  }
  return g.marked_inexact();
}

// Solve f_i(X, y(X)) = 0 for y with y(0) = 0, where the f_i live in
// m + n variables (X_1..X_m, Y_1..Y_n) and the Y-Jacobian at the origin is
// invertible.  Constant-Jacobian Newton gains at least one degree per pass.
template <class F>
std::vector<Series<F>> implicit_solve(const std::vector<Series<F>>& fs, int n_unknowns) {
  if (fs.empty() || n_unknowns <= 0 || fs.size() != static_cast<std::size_t>(n_unknowns))
    fail(errc::wrong_arity, "need exactly one equation per unknown");
  int n = n_unknowns;
  int nv = fs.front().nvars();
  int m = nv - n;
  if (m < 1) fail(errc::wrong_arity, "no free variables left of the unknowns");
  const F& k = fs.front().field();
  long D = fs.front().order();
  for (const auto& f : fs) {
    if (f.nvars() != nv) fail(errc::variable_count_mismatch, "equations have differing variable counts");
    D = std::min(D, f.order());
    if (!k.is_zero(f.constant_term()))
      fail(errc::not_infinitesimal, "equation has a nonzero constant term");
  }

  using Elem = typename F::Elem;
  // J[i][j] = linear coefficient of Y_j in f_i.
  std::vector<std::vector<Elem>> J(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Mono a(static_cast<std::size_t>(nv), 0);
      a[static_cast<std::size_t>(m + j)] = 1;
      J[static_cast<std::size_t>(i)].push_back(fs[static_cast<std::size_t>(i)].coeff(a));
    }
  }
  // Gauss-Jordan inverse over the coefficient field.
  std::vector<std::vector<Elem>> inv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      inv[static_cast<std::size_t>(i)].push_back(i == j ? k.one() : k.zero());
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int row = col; row < n; ++row)
      if (!k.is_zero(J[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)])) {
        piv = row;
        break;
      }
    if (piv < 0) fail(errc::singular_jacobian, "Y-Jacobian at the origin is singular");
    std::swap(J[static_cast<std::size_t>(col)], J[static_cast<std::size_t>(piv)]);
    std::swap(inv[static_cast<std::size_t>(col)], inv[static_cast<std::size_t>(piv)]);
    Elem pivinv = k.div(k.one(), J[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)]);
    for (int j = 0; j < n; ++j) {
      J[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] =
          k.mul(J[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)], pivinv);
      inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)] =
          k.mul(inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)], pivinv);
    }
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      Elem factor = J[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      if (k.is_zero(factor)) continue;
      for (int j = 0; j < n; ++j) {
        J[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] =
            k.sub(J[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)],
                  k.mul(factor, J[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)]));
        inv[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)] =
            k.sub(inv[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)],
                  k.mul(factor, inv[static_cast<std::size_t>(col)][static_cast<std::size_t>(j)]));
      }
    }
  }

  std::vector<Series<F>> ys(static_cast<std::size_t>(n), Series<F>::zero(k, m, D));
  std::vector<Series<F>> gs;
  for (long pass = 0; pass <= D; ++pass) {
    gs.clear();
    for (int i = 0; i < m; ++i) gs.push_back(Series<F>::coordinate(k, m, i, D));
    for (const auto& y : ys) gs.push_back(y);
    std::vector<Series<F>> resid;
    bool allzero = true;
    for (const auto& f : fs) {
      resid.push_back(substitute(f.truncated(D), gs).truncated(D));
      allzero = allzero && resid.back().is_zero();
    }
    if (allzero) break;
    for (int i = 0; i < n; ++i) {
      Series<F> delta = Series<F>::zero(k, m, D);
      for (int j = 0; j < n; ++j)
        delta = delta + resid[static_cast<std::size_t>(j)].scale(
                            inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      ys[static_cast<std::size_t>(i)] = (ys[static_cast<std::size_t>(i)] - delta).truncated(D);
    }
  }
  for (auto& y : ys) y = y.marked_inexact();
  return ys;
}

}  // namespace wk
