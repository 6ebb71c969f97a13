#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wk/error.hpp"
#include "wk/puiseux.hpp"
#include "wk/rational.hpp"
#include "wk/series.hpp"

namespace wk {

// Expression trees over the shared textual grammar:
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := '-' factor | power
//   power  := atom ('^' nonneg-int)?          (t may carry a rational exponent)
//   atom   := integer | 'p' | 'X'k | 't' | 't^(' rat ')'
//           | 'gamma' '(' expr ')' | 'wp' '(' expr ')'
//           | 'kfrac' '(' expr ';' expr ')' | 'sosinv' '(' expr {',' expr} ')'
//           | '@'name | '(' expr ')'
//
// gamma is the Kochen operator (1/p) wp(x)/(wp(x)^2 - 1) with wp(x) = x^p - x;
// kfrac(f; g) is f/(1 - p g); sosinv(h1,...,hn) is 1/(1 + h1^2 + ... + hn^2).
// '@'name references a bound series atom supplied programmatically.
enum class ExprKind {
  Number,   // integer literal (rationals arise via '/')
  Prime,    // the declared prime p
  Var,      // X1..Xm
  TPow,     // t^q, q rational (Puiseux contexts only)
  Add, Sub, Neg, Mul, Div, Pow,
  Gamma, Wp, KFrac, SosInv,
  Atom,     // named series bound at evaluation time
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
  ExprKind kind;
  Rational num;          // Number value; TPow exponent
  int var = 0;           // Var: 0-based coordinate index
  unsigned exp = 0;      // Pow exponent
  std::string name;      // Atom name
  std::vector<ExprPtr> kids;
};

ExprPtr make_number(const Rational& q);
ExprPtr make_var(int i);
ExprPtr make_node(ExprKind k, std::vector<ExprPtr> kids);
ExprPtr make_pow(ExprPtr base, unsigned e);
ExprPtr make_atom(const std::string& name);

// Total, deterministic parser; SyntaxError diagnostics carry the position and
// the expected token, ArityError flags wrong call shapes.
ExprPtr parse_expression(const std::string& src);

// Canonical printer; parse(expr_str(e)) reproduces e structurally.
std::string expr_str(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Largest 1-based variable index mentioned anywhere in e; 0 when none.
int expr_max_var(const ExprPtr& e);

// --- evaluation --------------------------------------------------------------

// A fraction of truncated series; denominators need not be units, only
// nonzero at the working order.
template <class F>
struct SeriesFraction {
  Series<F> num;
  Series<F> den;
};

template <class F>
struct EvalContext {
  F field;
  int nvars;
  long order;
  std::optional<long> prime;  // required by p / gamma / wp / kfrac
  std::map<std::string, Series<F>> atoms;
};

// Divide out common pure-monomial content and scale the denominator's least
// term to 1, so equal fractions have a recognizable shape.
template <class F>
SeriesFraction<F> reduce_fraction(SeriesFraction<F> fr);

template <class F>
SeriesFraction<F> cert_eval(const ExprPtr& e, const EvalContext<F>& ctx);

// Evaluate to a series, requiring every denominator to be a unit.
template <class F>
Series<F> series_from_expr(const ExprPtr& e, const EvalContext<F>& ctx);

// Evaluate a ground expression (constants, p, t-powers, arithmetic; no
// variables or series atoms) to a Puiseux element.
template <class F>
Puiseux<F> puiseux_from_expr(const ExprPtr& e, const F& field, std::optional<long> prime,
                             long trust = Puiseux<F>::kDefaultTrust);

// Evaluate at a rational point, entirely by rational arithmetic (independent
// of the series machinery; used as a cross-check oracle).  Returns nullopt on
// a pole.
std::optional<Rational> expr_eval_rational(const ExprPtr& e, const std::vector<Rational>& point,
                                           std::optional<long> prime);

}  // namespace wk
