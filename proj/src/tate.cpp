#include "wk/tate.hpp"

#include <algorithm>
#include <stdexcept>

namespace wk {

namespace {

Integer p_pow(long p, long e) { return int_pow(Integer(p), static_cast<unsigned long>(e)); }

// Polynomials over F_p, used for the digit-by-digit division rounds.
using ModP = std::map<Mono, long, GradedLex>;

void modp_add(ModP& dst, const Mono& alpha, long c, long p) {
  long v = ((dst.count(alpha) ? dst[alpha] : 0) + c) % p;
  v = (v % p + p) % p;
  if (v == 0)
    dst.erase(alpha);
  else
    dst.insert_or_assign(alpha, v);
}

ModP reduction(const std::map<Mono, Integer, GradedLex>& terms, long p) {
  ModP r;
  for (const auto& [alpha, c] : terms) {
    long v = mpz_fdiv_ui(c.get_mpz_t(), static_cast<unsigned long>(p));
    if (v != 0) r.emplace(alpha, v);
  }
  return r;
}

int modp_last_degree(const ModP& f) {
  int d = 0;
  for (const auto& [alpha, c] : f) d = std::max<int>(d, static_cast<int>(alpha.back()));
  return d;
}

long modp_inv(long a, long p) {
  Integer r = mod_inverse(Integer(a), Integer(p));
  return r.get_si();
}

// Euclidean division of fbar by a divisor whose reduction is
// c * X_m^d + (X_m-degree < d), over F_p.  Returns (qbar, rbar).
std::pair<ModP, ModP> modp_divide(ModP fbar, const ModP& gbar, int d, long c, long p) {
  ModP qbar;
  long cinv = modp_inv(c, p);
  while (true) {
    int deg = modp_last_degree(fbar);
    if (fbar.empty() || deg < d) break;
    // peel the top X_m-slice
    std::vector<std::pair<Mono, long>> slice;
    for (const auto& [alpha, cc] : fbar)
      if (static_cast<int>(alpha.back()) == deg) slice.emplace_back(alpha, cc);
    for (const auto& [alpha, cc] : slice) {
      long factor = (cc * cinv) % p;
      Mono qm = alpha;
      qm.back() = static_cast<unsigned>(deg - d);
      modp_add(qbar, qm, factor, p);
      for (const auto& [beta, gc] : gbar) {
        Mono t(alpha.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = qm[i] + beta[i];
        modp_add(fbar, t, -((factor * gc) % p), p);
      }
    }
  }
  return {std::move(qbar), std::move(fbar)};
}

}  // namespace

// --- TateElement -------------------------------------------------------------

TateElement::TateElement(int nvars, long p, int prec, long scale)
    : nvars_(nvars), p_(p), prec_(prec), scale_(scale) {
  if (nvars < 1) fail(errc::variable_count_mismatch, "need at least one variable");
  if (prec < 1) fail(errc::precision_exhausted, "precision must be at least one digit");
  if (p < 2 || !int_is_prime(Integer(p))) fail(errc::out_of_domain, "p must be prime");
  pn_ = p_pow(p, prec);
}

TateElement TateElement::constant(int nvars, long p, int prec, const Integer& c) {
  TateElement f(nvars, p, prec);
  f.set_coeff(Mono(nvars, 0), c);
  return f;
}

TateElement TateElement::coordinate(int nvars, long p, int prec, int i) {
  if (i < 0 || i >= nvars) fail(errc::variable_count_mismatch, "coordinate index out of range");
  TateElement f(nvars, p, prec);
  Mono alpha(nvars, 0);
  alpha[i] = 1;
  f.set_coeff(alpha, Integer(1));
  return f;
}

TateElement TateElement::monomial(int nvars, long p, int prec, const Mono& alpha,
                                  const Integer& c) {
  if (static_cast<int>(alpha.size()) != nvars)
    fail(errc::variable_count_mismatch, "monomial exponent arity");
  TateElement f(nvars, p, prec);
  f.set_coeff(alpha, c);
  return f;
}

void TateElement::set_coeff(const Mono& alpha, const Integer& c) {
  if (static_cast<int>(alpha.size()) != nvars_)
    fail(errc::variable_count_mismatch, "exponent arity");
  Integer r = mod_reduce(c, pn_);
  if (r == 0)
    terms_.erase(alpha);
  else
    terms_.insert_or_assign(alpha, r);
}

Integer TateElement::coeff(const Mono& alpha) const {
  auto it = terms_.find(alpha);
  return it == terms_.end() ? Integer(0) : it->second;
}

long TateElement::integral_norm_val() const {
  if (terms_.empty()) fail(errc::zero_input, "norm valuation of zero");
  long w = prec_;
  for (const auto& [alpha, c] : terms_) w = std::min(w, int_vp(c, Integer(p_)));
  return w;
}

TateElement TateElement::shifted_to_scale(long w) const {
  if (w == 0) return *this;
  if (prec_ - w < 1)
    fail(errc::precision_exhausted, "no digits left after scale normalization");
  TateElement r(nvars_, p_, static_cast<int>(prec_ - w), scale_ + w);
  if (w > 0) {
    Integer pw = p_pow(p_, w);
    for (const auto& [alpha, c] : terms_) {
      if (c % pw != 0) fail(errc::out_of_domain, "residue not divisible by the requested power");
      r.set_coeff(alpha, c / pw);
    }
  } else {
    Integer pw = p_pow(p_, -w);
    for (const auto& [alpha, c] : terms_) r.set_coeff(alpha, c * pw);
  }
  return r;
}

TateElement TateElement::with_prec(int n) const {
  if (n > prec_) fail(errc::precision_exhausted, "cannot invent digits");
  TateElement r(nvars_, p_, n, scale_);
  for (const auto& [alpha, c] : terms_) r.set_coeff(alpha, c);
  return r;
}

void TateElement::check_compat(const TateElement& o) const {
  if (nvars_ != o.nvars_) fail(errc::variable_count_mismatch, "mixed variable counts");
  if (p_ != o.p_) fail(errc::out_of_domain, "mixed primes");
}

TateElement operator+(const TateElement& a, const TateElement& b) {
  a.check_compat(b);
  long s = std::min(a.scale_, b.scale_);
  long da = a.scale_ - s, db = b.scale_ - s;
  long n = std::min(da + a.prec_, db + b.prec_);
  TateElement r(a.nvars_, a.p_, static_cast<int>(n), s);
  Integer fa = p_pow(a.p_, da), fb = p_pow(a.p_, db);
  for (const auto& [alpha, c] : a.terms_) r.set_coeff(alpha, c * fa);
  for (const auto& [alpha, c] : b.terms_) r.set_coeff(alpha, r.coeff(alpha) + c * fb);
  return r;
}

TateElement operator-(const TateElement& a, const TateElement& b) { return a + (-b); }

TateElement TateElement::operator-() const {
  TateElement r(nvars_, p_, prec_, scale_);
  for (const auto& [alpha, c] : terms_) r.set_coeff(alpha, pn_ - c);
  return r;
}

TateElement operator*(const TateElement& a, const TateElement& b) {
  a.check_compat(b);
  int n = std::min(a.prec_, b.prec_);
  TateElement r(a.nvars_, a.p_, n, a.scale_ + b.scale_);
  for (const auto& [al, ca] : a.terms_)
    for (const auto& [be, cb] : b.terms_) {
      Mono t(al.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = al[i] + be[i];
      r.set_coeff(t, r.coeff(t) + ca * cb);
    }
  return r;
}

TateElement TateElement::mul_scalar(const Integer& c) const {
  TateElement r(nvars_, p_, prec_, scale_);
  for (const auto& [alpha, cc] : terms_) r.set_coeff(alpha, cc * c);
  return r;
}

TateElement TateElement::pow(unsigned long k) const {
  TateElement acc = TateElement::constant(nvars_, p_, prec_, Integer(1));
  TateElement base = *this;
  while (k) {
    if (k & 1) acc = acc * base;
    base = (k >>= 1) ? base * base : base;
  }
  return acc;
}

int TateElement::last_var_degree() const {
  int d = 0;
  for (const auto& [alpha, c] : terms_) d = std::max<int>(d, static_cast<int>(alpha.back()));
  return d;
}

bool TateElement::agree(const TateElement& o) const {
  check_compat(o);
  long s = std::min(scale_, o.scale_);
  long da = scale_ - s, db = o.scale_ - s;
  long n = std::min(da + prec_, db + o.prec_);
  Integer m = p_pow(p_, n);
  Integer fa = p_pow(p_, da), fb = p_pow(p_, db);
  auto covered = [&](const Mono& alpha) {
    return mod_reduce(coeff(alpha) * fa - o.coeff(alpha) * fb, m) == 0;
  };
  for (const auto& [alpha, c] : terms_)
    if (!covered(alpha)) return false;
  for (const auto& [alpha, c] : o.terms_)
    if (terms_.find(alpha) == terms_.end() && !covered(alpha)) return false;
  return true;
}

std::string TateElement::str() const {
  std::string poly;
  if (terms_.empty()) {
    poly = "0";
  } else {
    for (const auto& [alpha, c] : terms_) {
      std::string ms = mono_str(alpha);
      std::string term =
          ms.empty() ? c.get_str() : (c == 1 ? ms : c.get_str() + "*" + ms);
      poly += poly.empty() ? term : " + " + term;
    }
  }
  return std::to_string(p_) + "^" + std::to_string(scale_) + " * (" + poly + ") (mod " +
         std::to_string(p_) + "^" + std::to_string(prec_) + ")";
}

// --- norms and regularity -----------------------------------------------------

ValueWithInfinity gauss_norm(const TateElement& f) {
  if (f.is_zero()) return ValueWithInfinity::infinity();
  return ValueWithInfinity::finite(Rational(f.scale() + f.integral_norm_val()));
}

std::optional<TateRegularity> tate_try_regularity(const TateElement& f) {
  if (f.is_zero()) fail(errc::zero_input, "regularity of zero");
  long w = f.integral_norm_val();
  TateElement g = f.shifted_to_scale(w);
  ModP red = reduction(g.terms(), f.p());
  int d = modp_last_degree(red);
  // monic up to a unit scalar: the only term of top last-variable degree must
  // be the pure power X_m^d
  long lead = 0;
  for (const auto& [alpha, c] : red) {
    if (static_cast<int>(alpha.back()) != d) continue;
    for (std::size_t i = 0; i + 1 < alpha.size(); ++i)
      if (alpha[i] != 0) return std::nullopt;
    lead = c;
  }
  if (lead == 0) return std::nullopt;
  return TateRegularity{d, f.scale() + w, lead};
}

TateRegularity tate_regularity(const TateElement& f) {
  auto r = tate_try_regularity(f);
  if (!r) fail(errc::not_regular, "reduction is not scalar-led in the last variable");
  return *r;
}

// --- unit inversion ------------------------------------------------------------

TateElement tate_invert(const TateElement& f) {
  if (f.is_zero()) fail(errc::not_a_unit, "zero is not a unit");
  long w = f.integral_norm_val();
  TateElement g = f.shifted_to_scale(w);
  ModP red = reduction(g.terms(), f.p());
  Mono cst(static_cast<std::size_t>(f.nvars()), 0);
  if (red.size() != 1 || red.begin()->first != cst)
    fail(errc::not_a_unit, "reduction is not a nonzero scalar");
  int n = g.prec();
  // work on the integral part at scale 0: G = c0 (1 + e), e coefficientwise
  // divisible by p, so the Neumann iteration gains a digit per pass
  TateElement gi(f.nvars(), f.p(), n, 0);
  for (const auto& [alpha, c] : g.terms()) gi.set_coeff(alpha, c);
  Integer c0 = gi.coeff(cst);
  Integer c0inv = mod_inverse(c0, gi.modulus());
  TateElement one = TateElement::constant(f.nvars(), f.p(), n, Integer(1));
  TateElement e = gi.mul_scalar(c0inv) - one;
  TateElement acc = one;
  for (int i = 0; i < n; ++i) acc = one - e * acc;
  TateElement r = acc.mul_scalar(c0inv);
  // f = p^{scale_g} * G, so f^{-1} = p^{-scale_g} * G^{-1}
  TateElement out(f.nvars(), f.p(), n, -g.scale());
  for (const auto& [alpha, c] : r.terms()) out.set_coeff(alpha, c);
  return out;
}

// --- division, preparation ------------------------------------------------------

TateDivision tate_divide(const TateElement& f, const TateElement& g) {
  TateRegularity reg = tate_regularity(g);
  long wg = reg.normalizer_exp - g.scale();
  TateElement gn = g.shifted_to_scale(wg);
  int neff = std::min(f.prec(), gn.prec());
  if (neff < 1) fail(errc::precision_exhausted, "no common digits for division");
  long p = f.p();
  ModP gbar = reduction(gn.terms(), p);

  std::map<Mono, Integer, GradedLex> cur;
  Integer mod_full = p_pow(p, neff);
  for (const auto& [alpha, c] : f.terms()) {
    Integer r = mod_reduce(c, mod_full);
    if (r != 0) cur.emplace(alpha, r);
  }

  TateElement q(f.nvars(), p, neff, f.scale() - gn.scale());
  TateElement r(f.nvars(), p, neff, f.scale());
  Integer pj(1);
  for (int j = 0; j < neff && !cur.empty(); ++j) {
    ModP fbar = reduction(cur, p);
    auto [qb, rb] = modp_divide(fbar, gbar, reg.degree, reg.leading_unit, p);
    for (const auto& [alpha, c] : qb) q.set_coeff(alpha, q.coeff(alpha) + pj * c);
    for (const auto& [alpha, c] : rb) r.set_coeff(alpha, r.coeff(alpha) + pj * c);
    // subtract this digit's contribution and peel one factor of p
    std::map<Mono, Integer, GradedLex> next;
    Integer modj = p_pow(p, neff - j);
    auto addin = [&](const Mono& alpha, const Integer& c) {
      Integer v = mod_reduce((next.count(alpha) ? next[alpha] : Integer(0)) + c, modj);
      if (v == 0)
        next.erase(alpha);
      else
        next.insert_or_assign(alpha, v);
    };
    for (const auto& [alpha, c] : cur) addin(alpha, c);
    for (const auto& [alpha, c] : qb)
      for (const auto& [beta, gc] : gn.terms()) {
        Mono t(alpha.size());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = alpha[i] + beta[i];
        addin(t, -Integer(c) * gc);
      }
    for (const auto& [alpha, c] : rb) addin(alpha, -Integer(c));
    cur.clear();
    for (const auto& [alpha, c] : next) {
      if (c % p != 0) throw std::logic_error("division defect not divisible by p");
      Integer v = mod_reduce(c / p, p_pow(p, neff - j - 1));
      if (v != 0) cur.emplace(alpha, v);
    }
    pj *= p;
  }
  return {std::move(q), std::move(r), reg.degree};
}

TatePreparation tate_prepare(const TateElement& g) {
  TateRegularity reg = tate_regularity(g);
  Mono xd(static_cast<std::size_t>(g.nvars()), 0);
  xd.back() = static_cast<unsigned>(reg.degree);
  TateElement f = TateElement::monomial(g.nvars(), g.p(), g.prec(), xd, Integer(1));
  TateDivision dv = tate_divide(f, g);
  TateElement w = f.with_prec(dv.r.prec()) - dv.r;
  TateElement u = tate_invert(dv.q);
  return {std::move(u), std::move(w), reg.degree};
}

// --- shear ----------------------------------------------------------------------

TateElement tate_shear(const TateElement& f, long d, bool inverse) {
  if (d < 2) fail(errc::out_of_domain, "shear exponent must be at least 2");
  if (f.is_zero()) fail(errc::zero_input, "shear of zero");
  int m = f.nvars();
  if (!inverse) {
    // the degree bound is what makes the forward shear produce regularity;
    // the inverse map is an unconditional automorphism
    long w = f.integral_norm_val();
    ModP red = reduction(f.shifted_to_scale(w).terms(), f.p());
    long rdeg = 0;
    for (const auto& [alpha, c] : red) rdeg = std::max<long>(rdeg, mono_degree(alpha));
    if (rdeg >= d) fail(errc::degree_too_high, "reduction degree must be below the shear degree");
  }
  if (m == 1) return f;

  std::vector<long> weight(static_cast<std::size_t>(m - 1));
  for (int i = 0; i < m - 1; ++i) {
    long e = 1;
    for (int j = 0; j < m - 1 - i; ++j) e *= d;
    weight[static_cast<std::size_t>(i)] = e;
  }

  TateElement out(m, f.p(), f.prec(), f.scale());
  for (const auto& [alpha, c] : f.terms()) {
    // expand prod_i (X_i +/- X_m^{w_i})^{alpha_i} * X_m^{alpha_m}
    std::map<Mono, Integer, GradedLex> acc;
    Mono base(static_cast<std::size_t>(m), 0);
    base.back() = alpha.back();
    acc.emplace(base, c);
    for (int i = 0; i < m - 1; ++i) {
      unsigned ai = alpha[static_cast<std::size_t>(i)];
      if (ai == 0) continue;
      std::map<Mono, Integer, GradedLex> nxt;
      for (const auto& [beta, cc] : acc) {
        for (unsigned k = 0; k <= ai; ++k) {
          Integer binom;
          mpz_bin_uiui(binom.get_mpz_t(), ai, k);
          if (inverse && ((ai - k) % 2 == 1)) binom = -binom;
          Mono t = beta;
          t[static_cast<std::size_t>(i)] += k;
          t.back() += static_cast<unsigned>(weight[static_cast<std::size_t>(i)]) * (ai - k);
          Integer v = cc * binom;
          auto it = nxt.find(t);
          if (it == nxt.end())
            nxt.emplace(t, v);
          else
            it->second += v;
        }
      }
      acc = std::move(nxt);
    }
    for (const auto& [beta, cc] : acc) out.set_coeff(beta, out.coeff(beta) + cc);
  }
  return out;
}

// --- evaluation -----------------------------------------------------------------

namespace {

PAdic padic_from_residue(const Integer& c, long p, int n) {
  long v = int_vp(c, Integer(p));
  Integer u = mod_reduce(c / p_pow(p, v), p_pow(p, n - v));
  return PAdic(p, static_cast<int>(n - v), v, u);
}

}  // namespace

PAdic tate_eval(const TateElement& f, const std::vector<PAdic>& a) {
  if (static_cast<int>(a.size()) != f.nvars())
    fail(errc::variable_count_mismatch, "one coordinate per variable");
  for (const auto& ai : a) {
    if (ai.is_zero()) continue;
    if (ai.p() != f.p()) fail(errc::out_of_domain, "mixed primes");
    if (ai.val() < 0) fail(errc::out_of_domain, "coordinate outside the unit disc");
  }
  PAdic acc = PAdic::zero(f.p(), f.prec());
  for (const auto& [alpha, c] : f.terms()) {
    PAdic term = padic_from_residue(c, f.p(), f.prec());
    for (std::size_t i = 0; i < a.size(); ++i)
      if (alpha[i] > 0) term = term * a[i].pow(alpha[i]);
    acc = acc + term;
  }
  if (f.scale() != 0 && !acc.is_zero())
    acc = acc * PAdic(f.p(), f.prec(), f.scale(), Integer(1));
  return acc;
}

// --- k-th roots -----------------------------------------------------------------

TateElement tate_kth_root(const TateElement& f, unsigned k) {
  if (k == 0) fail(errc::out_of_domain, "zeroth root");
  if (k % static_cast<unsigned long>(f.p()) == 0)
    fail(errc::ramified_index, "index divisible by p");
  if (f.is_zero()) fail(errc::not_a_one_unit_times_power, "zero has no unit factorization");
  long wint = f.integral_norm_val();
  long w = f.scale() + wint;
  if (w % static_cast<long>(k) != 0)
    fail(errc::not_a_one_unit_times_power, "norm valuation not divisible by the index");
  TateElement fs = f.shifted_to_scale(wint);
  int n = fs.prec();
  Mono cst(static_cast<std::size_t>(f.nvars()), 0);
  ModP red = reduction(fs.terms(), f.p());
  if (red.size() != 1 || red.begin()->first != cst)
    fail(errc::not_a_one_unit_times_power, "reduction is not a nonzero scalar");
  // integral part at scale 0 (the p-power w/k is re-attached at the end)
  TateElement fi(f.nvars(), f.p(), n, 0);
  for (const auto& [alpha, cc] : fs.terms()) fi.set_coeff(alpha, cc);

  // scalar k-th root of the constant residue, Hensel-lifted
  Integer c0 = fi.coeff(cst);
  long r0 = 0;
  for (long t = 1; t < f.p(); ++t) {
    Integer tk = int_pow(Integer(t), k);
    if (mod_reduce(tk - c0, Integer(f.p())) == 0) {
      r0 = t;
      break;
    }
  }
  if (r0 == 0)
    fail(errc::not_a_one_unit_times_power, "constant residue has no k-th root mod p");
  PAdic c0p = PAdic::from_integer(c0, f.p(), n);
  PAdic cp = padic_kth_root(c0p, k, Integer(r0));
  Integer c = cp.residue_mod(n);

  // f = c^k (1 + e) with e p-divisible; Newton for the 1-unit part
  Integer ckinv = mod_inverse(mod_reduce(int_pow(c, k), fi.modulus()), fi.modulus());
  TateElement target = fi.mul_scalar(ckinv);
  TateElement one = TateElement::constant(f.nvars(), f.p(), n, Integer(1));
  TateElement g = one;
  for (int it = 0; it <= n + 1; ++it) {
    TateElement res = g.pow(k) - target;
    if (res.is_zero()) break;
    if (it == n + 1) throw std::logic_error("root iteration failed to converge");
    TateElement deriv = g.pow(k - 1).mul_scalar(Integer(k));
    g = g - res * tate_invert(deriv);
  }
  TateElement root = g.mul_scalar(c);
  TateElement scaled(f.nvars(), f.p(), n, w / static_cast<long>(k));
  for (const auto& [alpha, cc] : root.terms()) scaled.set_coeff(alpha, cc);
  return scaled;
}

// --- maximum principle over the Laurent coefficient field -----------------------

ValueWithInfinity laurent_gauss_norm(const Series<LaurentField>& f) {
  bool any = false;
  Rational vmin;
  for (const auto& [alpha, c] : f.terms()) {
    Rational v = c.val_finite();
    if (!any || v < vmin) vmin = v;
    any = true;
  }
  if (!any) return ValueWithInfinity::infinity();
  return ValueWithInfinity::finite(vmin);
}

ProbeResult max_principle_probe(const Series<LaurentField>& f, long budget) {
  if (f.terms().empty()) fail(errc::zero_input, "probe of the zero polynomial");
  int m = f.nvars();
  Rational vmin = laurent_gauss_norm(f).scalar();

  // residue polynomial over Q: leading t-coefficients of the norm-attaining
  // monomials
  std::map<Mono, Rational, GradedLex> residue;
  long deg = 0;
  for (const auto& [alpha, c] : f.terms()) {
    if (c.val_finite() != vmin) continue;
    residue.emplace(alpha, c.leading_coeff());
    deg = std::max<long>(deg, mono_degree(alpha));
  }

  std::vector<long> a(static_cast<std::size_t>(m), 0);
  long side = deg + 1;
  long probes = 0;
  while (true) {
    if (probes >= budget) fail(errc::budget_exhausted, "probe budget exceeded");
    ++probes;
    Rational val(0);
    for (const auto& [alpha, c] : residue) {
      Rational term = c;
      for (int i = 0; i < m; ++i)
        for (unsigned e = 0; e < alpha[static_cast<std::size_t>(i)]; ++e)
          term *= a[static_cast<std::size_t>(i)];
      val += term;
    }
    if (val != 0) break;
    // next grid point (odometer over {0..deg}^m)
    int i = 0;
    while (i < m) {
      if (++a[static_cast<std::size_t>(i)] < side) break;
      a[static_cast<std::size_t>(i)] = 0;
      ++i;
    }
    if (i == m) throw std::logic_error("nonzero residue polynomial vanished on its whole grid");
  }

  // confirm by evaluating f itself at the witness
  LaurentField L = f.field();
  std::vector<Puiseux<RationalField>> pt;
  pt.reserve(a.size());
  for (long ai : a) pt.push_back(L.from_long(ai));
  auto value = series_eval(f, pt);
  ValueWithInfinity nv = value.valuation();
  return {std::move(a), nv, probes};
}

}  // namespace wk
