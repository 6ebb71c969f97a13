#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wk/error.hpp"
#include "wk/padic.hpp"
#include "wk/puiseux.hpp"
#include "wk/rational.hpp"
#include "wk/series.hpp"
#include "wk/value.hpp"

namespace wk {

// Restricted power series over Z_p, represented exactly: an element of
// Z_p<X_1..X_m> mod p^N is a polynomial over Z/p^N (coefficients of high
// index are divisible by p^N and vanish), optionally rescaled by a power of p
// so that elements of Q_p<X> with bounded Gauss norm are also representable.
//
//   value = p^scale * sum_alpha c_alpha X^alpha,   c_alpha in [1, p^prec)
//
// The value is determined exactly mod p^(scale + prec).  Arithmetic aligns
// scales and keeps the bookkeeping honest: sums live at the coarser scale,
// products add scales, precision never exceeds what the operands support.
class TateElement {
public:
  TateElement(int nvars, long p, int prec, long scale = 0);

  static TateElement zero(int nvars, long p, int prec) { return TateElement(nvars, p, prec); }
  static TateElement constant(int nvars, long p, int prec, const Integer& c);
  static TateElement coordinate(int nvars, long p, int prec, int i);
  static TateElement monomial(int nvars, long p, int prec, const Mono& alpha, const Integer& c);

  int nvars() const { return nvars_; }
  long p() const { return p_; }
  int prec() const { return prec_; }
  long scale() const { return scale_; }
  const std::map<Mono, Integer, GradedLex>& terms() const { return terms_; }
  const Integer& modulus() const { return pn_; }

  bool is_zero() const { return terms_.empty(); }

  // c is reduced mod p^prec; a vanishing residue erases the monomial.
  void set_coeff(const Mono& alpha, const Integer& c);
  Integer coeff(const Mono& alpha) const;

  // Valuation of the Gauss norm of the integral part: min_alpha v_p(c_alpha)
  // (0 for a unit-norm element); the element's full norm adds the scale.
  long integral_norm_val() const;

  // Same value, re-expressed with the integral part divided by p^w: the scale
  // grows by w and the precision drops by w.  Requires every residue to be
  // divisible by p^w.
  TateElement shifted_to_scale(long w) const;

  TateElement with_prec(int n) const;  // n <= prec: forget high digits

  friend TateElement operator+(const TateElement& a, const TateElement& b);
  friend TateElement operator-(const TateElement& a, const TateElement& b);
  friend TateElement operator*(const TateElement& a, const TateElement& b);
  TateElement operator-() const;

  TateElement mul_scalar(const Integer& c) const;
  TateElement pow(unsigned long k) const;

  // Last-variable structure (used by division).
  int last_var_degree() const;

  // Equality of values to the precision both sides support.
  bool agree(const TateElement& o) const;

  std::string str() const;

private:
  void check_compat(const TateElement& o) const;

  int nvars_;
  long p_;
  int prec_;
  long scale_;
  Integer pn_;  // p^prec
  std::map<Mono, Integer, GradedLex> terms_;
};

// Valuation of the Gauss norm |f| = max_alpha |f_alpha| (+inf for 0).
ValueWithInfinity gauss_norm(const TateElement& f);

// Regularity in the last variable: after normalizing by a power of p the
// mod-p reduction must have the form  c * X_m^d + (terms of lower X_m-degree)
// with c a nonzero scalar.  Units of Z_p reduce onto all of the residue
// field, so a scalar leading coefficient is exactly what preparation can
// absorb into the unit factor.
struct TateRegularity {
  int degree;           // d
  long normalizer_exp;  // w: p^-w * f has Gauss norm 1
  long leading_unit;    // reduction's X_m^d coefficient, in [1, p)
};

TateRegularity tate_regularity(const TateElement& f);
std::optional<TateRegularity> tate_try_regularity(const TateElement& f);

// Shear X_i -> X_i + X_m^(d^(m-i)) for i < m (exact ring automorphism).
// Requires the mod-p reduction to be nonzero of total degree < d with d >= 2;
// the result is regular in X_m of degree < d^m.
TateElement tate_shear(const TateElement& f, long d, bool inverse = false);

// Inverse of a unit (reduction a nonzero scalar): Neumann expansion, exact
// mod p^prec.
TateElement tate_invert(const TateElement& f);

struct TateDivision {
  TateElement q;
  TateElement r;  // X_m-degree < d
  int d;
};

// Weierstrass division f = q*g + r with deg_{X_m} r < d, exact at the
// precision both operands support; g must be regular.  Works digit by digit:
// divide the mod-p reductions by the reduction of g (Euclidean division by a
// scalar-led polynomial), subtract, and the defect is divisible by p.
TateDivision tate_divide(const TateElement& f, const TateElement& g);

struct TatePreparation {
  TateElement u;  // unit
  TateElement w;  // monic in X_m of degree d, lower coefficients p-divisible
  int d;
};

// g = u * w from dividing X_m^d by g.
TatePreparation tate_prepare(const TateElement& g);

// Evaluation at a point of the closed unit polydisc (every |a_i| <= 1).
PAdic tate_eval(const TateElement& f, const std::vector<PAdic>& a);

// k-th root of an element of the form c^k * (1 + p-divisible part), p not
// dividing k.  Scalar Hensel lift for the constant, Newton for the 1-unit.
TateElement tate_kth_root(const TateElement& f, unsigned k);

// --- maximum principle over an infinite residue field ----------------------

// For a polynomial f over the truncated-Laurent coefficient field (residue
// field Q), deterministically probes integer points a in {0,1,2,...}^m until
// the residue polynomial is nonzero at a; then |f(a)| = |f|.  A nonzero
// polynomial of total degree D cannot vanish on the whole grid {0..D}^m, so
// at most (D+1)^m probes are needed.
struct ProbeResult {
  std::vector<long> witness;
  ValueWithInfinity norm_val;  // valuation of |f| = valuation of |f(witness)|
  long probes;
};

ProbeResult max_principle_probe(const Series<LaurentField>& f, long budget);

// Valuation of the Gauss norm of a polynomial over the Laurent field.
ValueWithInfinity laurent_gauss_norm(const Series<LaurentField>& f);

}  // namespace wk
