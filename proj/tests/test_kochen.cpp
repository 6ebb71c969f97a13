#include "wk/cert.hpp"

#include <functional>
#include <random>

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "wk/fields.hpp"

using namespace wk;

namespace {

errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return errc::out_of_domain;
}

Series<RationalField> expand(const std::string& src, int nvars, long order,
                             std::optional<long> prime = std::nullopt) {
  RationalField Q;
  EvalContext<RationalField> ctx{Q, nvars, order, prime, {}};
  return series_from_expr(parse_expression(src), ctx);
}

Mono mk(std::initializer_list<unsigned> l) { return Mono(l); }

const char* kWorkedCert =
    "padic-nss p=3 prec=8 order=12 f=X1 k=1 g=0 "
    "g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X1))";

// The p-adic positivstellensatz identity, reconstructed here independently of
// the library's own synthesis, for rational-point cross-checks.
std::pair<ExprPtr, ExprPtr> nss_sides(const Certificate& c) {
  ExprPtr one_minus_pg =
      make_node(ExprKind::Sub, {make_number(Rational(1)),
                                make_node(ExprKind::Mul, {make_node(ExprKind::Prime, {}), c.g})});
  ExprPtr lhs = make_node(ExprKind::Mul, {make_pow(c.f, c.k), one_minus_pg});
  ExprPtr rhs = make_number(Rational(0));
  for (std::size_t i = 0; i < c.gs.size(); ++i) {
    ExprPtr term = make_node(ExprKind::Mul, {c.gs[i], c.hs[i]});
    rhs = i == 0 ? term : make_node(ExprKind::Add, {rhs, term});
  }
  return {lhs, rhs};
}

// Compare two expressions at a grid of rational points; pole points are
// skipped.  Returns the number of disagreements and agreements.
std::pair<long, long> grid_compare(const ExprPtr& lhs, const ExprPtr& rhs, int nvars, long prime,
                                   long lo, long hi) {
  long agree = 0, differ = 0;
  std::vector<Rational> point(static_cast<std::size_t>(nvars), Rational(lo));
  bool done = false;
  while (!done) {
    auto a = expr_eval_rational(lhs, point, prime);
    auto b = expr_eval_rational(rhs, point, prime);
    if (a && b) (*a == *b ? agree : differ)++;
    int i = 0;
    for (; i < nvars; ++i) {
      point[static_cast<std::size_t>(i)] += 1;
      if (point[static_cast<std::size_t>(i)] <= hi) break;
      point[static_cast<std::size_t>(i)] = lo;
    }
    done = i == nvars;
  }
  return {differ, agree};
}

long vp_rational(const Rational& q, long p) {
  if (q == 0) FAIL("valuation of zero requested");
  return int_vp(q.get_num(), Integer(p)) - int_vp(q.get_den(), Integer(p));
}

}  // namespace

TEST_CASE("expression parsing: worked shapes") {
  ExprPtr e = parse_expression("(1+X1)*(1-X1)");
  REQUIRE(e->kind == ExprKind::Mul);
  CHECK(e->kids[0]->kind == ExprKind::Add);
  CHECK(e->kids[1]->kind == ExprKind::Sub);
  CHECK(e->kids[0]->kids[1]->kind == ExprKind::Var);
  CHECK(e->kids[0]->kids[1]->var == 0);

  ExprPtr g = parse_expression("gamma(X1)^2");
  REQUIRE(g->kind == ExprKind::Pow);
  CHECK(g->exp == 2);
  CHECK(g->kids[0]->kind == ExprKind::Gamma);

  ExprPtr kf = parse_expression("kfrac(1; gamma(X1))");
  REQUIRE(kf->kind == ExprKind::KFrac);
  CHECK(kf->kids.size() == 2);

  ExprPtr so = parse_expression("sosinv(X1, 2*X2 + 1)");
  REQUIRE(so->kind == ExprKind::SosInv);
  CHECK(so->kids.size() == 2);

  ExprPtr tp = parse_expression("t^(1/2) + 3*t");
  CHECK(tp->kind == ExprKind::Add);
  CHECK(tp->kids[0]->kind == ExprKind::TPow);
  CHECK(tp->kids[0]->num == Rational(1, 2));

  // precedence: '^' binds above '*' binds above '+'; unary minus below '^'
  ExprPtr pr = parse_expression("1 + 2*X1^3");
  REQUIRE(pr->kind == ExprKind::Add);
  REQUIRE(pr->kids[1]->kind == ExprKind::Mul);
  CHECK(pr->kids[1]->kids[1]->kind == ExprKind::Pow);

  ExprPtr ng = parse_expression("-X1^2");
  REQUIRE(ng->kind == ExprKind::Neg);
  CHECK(ng->kids[0]->kind == ExprKind::Pow);
}

TEST_CASE("expression parsing: diagnostics") {
  // unterminated call: the error points at the end of input
  try {
    parse_expression("kfrac(1; gamma(X1)");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::syntax_error);
    CHECK(std::string(e.what()).find("end of input") != std::string::npos);
  }

  // a mid-string error carries the 1-based position
  try {
    parse_expression("1 + + 2");
    FAIL("expected a syntax error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::syntax_error);
    CHECK(std::string(e.what()).find("position 5") != std::string::npos);
  }

  CHECK(code_of([] { parse_expression("gamma(X1, X2)"); }) == errc::arity_error);
  CHECK(code_of([] { parse_expression("kfrac(X1)"); }) == errc::arity_error);
  CHECK(code_of([] { parse_expression("sosinv()"); }) == errc::arity_error);
  CHECK(code_of([] { parse_expression("wp(X1; X2)"); }) == errc::arity_error);
  CHECK(code_of([] { parse_expression("X0"); }) == errc::syntax_error);
  CHECK(code_of([] { parse_expression("2 + unknown(3)"); }) == errc::syntax_error);
  CHECK(code_of([] { parse_expression("X1^(2)"); }) == errc::syntax_error);  // parens only on t
  CHECK(code_of([] { parse_expression("(X1"); }) == errc::syntax_error);
  CHECK(code_of([] { parse_expression(""); }) == errc::syntax_error);
  CHECK(code_of([] { parse_expression("X1 X2"); }) == errc::syntax_error);
}

TEST_CASE("expression printing round-trips") {
  const char* samples[] = {
      "(1+X1)*(1-X1)",
      "gamma(X1)^2",
      "kfrac(1; gamma(X1))",
      "sosinv(X1, 2*X2 + 1, X1*X2)",
      "X1*(1-3*gamma(X1))",
      "1 - X1 - X2 - 1/2",
      "-(X1 + X2)^4*wp(X2)",
      "t^(1/2) + 3*t - t^(-2)",
      "p*X1^2/(1 + p*X2)",
      "2 - -X1",
      "wp(wp(X1))",
      "@u + X1*@v",
  };
  for (const char* s : samples) {
    ExprPtr e = parse_expression(s);
    std::string printed = expr_str(e);
    ExprPtr back = parse_expression(printed);
    CHECK_MESSAGE(expr_equal(e, back), "round trip failed for: ", s, " -> ", printed);
    CHECK(expr_str(back) == printed);  // printing is a fixed point
  }
}

TEST_CASE("series evaluation of expressions") {
  Series<RationalField> s = expand("(1+X1)*(1-X1)", 1, 8);
  CHECK(s.exact());
  CHECK(s.coeff(mk({0})) == Rational(1));
  CHECK(s.coeff(mk({2})) == Rational(-1));
  CHECK(s.term_count() == 2);

  // geometric series: a unit denominator is expanded
  Series<RationalField> geo = expand("1/(1-X1)", 1, 6);
  CHECK_FALSE(geo.exact());
  for (unsigned j = 0; j <= 6; ++j) CHECK(geo.coeff(mk({j})) == Rational(1));

  // wp over p=3 is X^3 - X
  Series<RationalField> w = expand("wp(X1)", 1, 8, 3);
  CHECK(w.coeff(mk({3})) == Rational(1));
  CHECK(w.coeff(mk({1})) == Rational(-1));
  CHECK(w.term_count() == 2);

  // constant denominators divide exactly, keeping polynomials exact
  Series<RationalField> half = expand("(X1 + X2^2)/2", 2, 8);
  CHECK(half.exact());
  CHECK(half.coeff(mk({1, 0})) == Rational(1, 2));

  CHECK(code_of([] { expand("1/(X1-X1)", 1, 8); }) == errc::zero_denominator);
  CHECK(code_of([] { expand("1/X1", 1, 8); }) == errc::not_a_unit);
  CHECK(code_of([] { expand("kfrac(1; 1/3)", 1, 8, 3); }) == errc::zero_denominator);
  CHECK(code_of([] { expand("gamma(X1)", 1, 8); }) == errc::out_of_domain);  // no prime
  CHECK(code_of([] { expand("X3", 2, 8); }) == errc::variable_count_mismatch);
  CHECK(code_of([] { expand("t + X1", 1, 8); }) == errc::out_of_domain);
}

TEST_CASE("gamma expansion matches the independently derived series") {
  // gamma_3(x) = x/3 - 2/3 x^5 - 1/3 x^7 + x^9 + x^11 + O(x^13)
  Series<RationalField> g = expand("gamma(X1)", 1, 12, 3);
  CHECK(g.coeff(mk({1})) == Rational(1, 3));
  CHECK(g.coeff(mk({3})) == Rational(0));
  CHECK(g.coeff(mk({5})) == Rational(-2, 3));
  CHECK(g.coeff(mk({7})) == Rational(-1, 3));
  CHECK(g.coeff(mk({9})) == Rational(1));
  CHECK(g.coeff(mk({11})) == Rational(1));
  for (unsigned j = 0; j <= 12; j += 2) CHECK(g.coeff(mk({j})) == Rational(0));

  // the reduced fraction has a unit denominator with constant 1
  RationalField Q;
  EvalContext<RationalField> ctx{Q, 1, 12, 3, {}};
  SeriesFraction<RationalField> fr = reduce_fraction(cert_eval(parse_expression("gamma(X1)"), ctx));
  CHECK(fr.den.constant_term() == Rational(1));
  // den = 1 - (X^3 - X)^2, scaled so the constant is 1
  CHECK(fr.den.coeff(mk({2})) == Rational(-1));
  CHECK(fr.den.coeff(mk({6})) == Rational(-1));

  // kfrac(1; gamma(X1)) agrees with directly inverting 1 - 3 gamma
  Series<RationalField> kf = expand("kfrac(1; gamma(X1))", 1, 12, 3);
  Series<RationalField> one = Series<RationalField>::constant(Q, 1, 12, Rational(1));
  Series<RationalField> direct = series_invert((one - g.scale(Rational(3))).marked_inexact());
  for (const auto& [a, c] : direct.terms()) CHECK(kf.coeff(a) == c);
  CHECK(kf.coeff(mk({1})) == Rational(1));  // 1 + 3 gamma + ... = 1 + x + ...
}

TEST_CASE("gamma is total over the implemented coefficient fields") {
  // The pole guard watches for wp(x) = +-1, but wp(x) = x^p - x vanishes mod p
  // at every integral point (Fermat), never hitting +-1 mod p; rational and
  // p-adic arguments therefore cannot reach the pole.  Pin both the modular
  // fact and the evaluations it licenses.
  for (long p : {2L, 3L, 5L, 7L}) {
    for (long r = 0; r < p; ++r) {
      long w = 0;  // r^p - r mod p
      long acc = 1 % p;
      for (long j = 0; j < p; ++j) acc = acc * r % p;
      w = ((acc - r) % p + p) % p;
      CHECK(w == 0);
    }
  }

  // gamma at awkward constants: wp(-1) = wp(0) = wp(1) = 0 for odd p,
  // so gamma is simply 0 there
  for (const char* src : {"gamma(-1)", "gamma(0)", "gamma(1)"}) {
    Series<RationalField> g = expand(src, 1, 4, 3);
    CHECK(g.is_zero());
  }

  // gamma over Q_p constants, including negative valuation
  PAdicField K{3, 8};
  EvalContext<PAdicField> ctx{K, 1, 8, 3, {}};
  ctx.atoms.emplace("u", Series<PAdicField>::constant(K, 1, 8, K.from_rational(Rational(1, 3))));
  SeriesFraction<PAdicField> g = cert_eval(parse_expression("gamma(@u)"), ctx);
  CHECK_FALSE(g.den.is_zero());
  // v(gamma(a)) = -1 - p v(a) = 2 when v(a) = -1
  PAdic val = K.div(g.num.constant_term(), g.den.constant_term());
  CHECK(val.val() == 2);

  // and over Laurent arguments with t-adic valuation: v(wp) = p v, so
  // v(gamma) = p v - 2 p v = -p v = 3 at v = -1
  RationalField Q;
  Puiseux<RationalField> gp = puiseux_from_expr(parse_expression("gamma(t^(-1))"), Q, 3);
  CHECK(gp.valuation() == ValueWithInfinity::finite(Rational(3)));
}

TEST_CASE("worked p-adic certificate verifies and mutations refute") {
  Certificate c = parse_certificate(kWorkedCert);
  CHECK(c.kind == CertKind::PAdicNSS);
  CHECK(c.p == 3);
  CHECK(c.prec == 8);
  CHECK(c.order == 12);
  CHECK(c.k == 1);
  CHECK(c.nvars == 1);
  REQUIRE(c.gs.size() == 1);
  REQUIRE(c.hs.size() == 1);

  Verdict v = verify_certificate(c);
  CHECK(v.kind == VerdictKind::Verified);
  CHECK(v.exact);

  // the same certificate with rational coefficients (no prec)
  Certificate cq = parse_certificate(
      "padic-nss p=3 order=12 f=X1 k=1 g=0 "
      "g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X1))");
  Verdict vq = verify_certificate(cq);
  CHECK(vq.kind == VerdictKind::Verified);
  CHECK(vq.exact);

  // swapping the gamma argument to a fresh variable breaks the identity at
  // total degree 2 (the independently derived discrepancy)
  Certificate bad = parse_certificate(
      "padic-nss p=3 prec=8 order=12 vars=2 f=X1 k=1 g=0 "
      "g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X2))");
  Verdict vb = verify_certificate(bad);
  CHECK(vb.kind == VerdictKind::Refuted);
  REQUIRE(vb.discrepancy_degree.has_value());
  CHECK(*vb.discrepancy_degree == 2);

  // the residual of the good certificate is identically zero
  SeriesFraction<RationalField> res = nss_residual(c);
  CHECK(res.num.is_zero());
  CHECK_FALSE(nss_residual(bad).num.is_zero());
}

TEST_CASE("single-coefficient mutations of the worked certificate all refute") {
  Certificate base = parse_certificate(kWorkedCert);
  std::mt19937_64 rng(20250819);
  int refuted = 0;
  const int kRounds = 120;
  for (int i = 0; i < kRounds; ++i) {
    Certificate c = base;
    unsigned which = static_cast<unsigned>(rng() % 3);
    unsigned deg = static_cast<unsigned>(rng() % 4);
    long delta = static_cast<long>(rng() % 5) - 2;
    if (delta == 0) delta = 1;
    ExprPtr bump = make_node(
        ExprKind::Mul, {make_number(Rational(delta)), make_pow(make_var(0), deg)});
    auto mutate = [&](ExprPtr e) { return make_node(ExprKind::Add, {e, bump}); };
    if (which == 0)
      c.f = mutate(c.f);
    else if (which == 1)
      c.gs[0] = mutate(c.gs[0]);
    else
      c.hs[0] = mutate(c.hs[0]);
    Verdict v = verify_certificate(c);
    CHECK(v.kind == VerdictKind::Refuted);
    CHECK(v.discrepancy_degree.has_value());
    if (v.kind == VerdictKind::Refuted) ++refuted;
  }
  CHECK(refuted == kRounds);
}

TEST_CASE("real certificates verify exactly") {
  // Hilbert-17 shape: (X1^2 + X2^2) * 1^2 = X1^2 + X2^2
  Verdict h17 = verify_certificate(parse_certificate("real-h17 f=X1^2+X2^2 g=1 h1=X1 h2=X2"));
  CHECK(h17.kind == VerdictKind::Verified);
  CHECK(h17.exact);

  // X1^4 = X1^3 * X1
  Verdict nss1 = verify_certificate(parse_certificate("real-nss f=X1 k=2 g1=X1^3 h1=X1"));
  CHECK(nss1.kind == VerdictKind::Verified);
  CHECK(nss1.exact);

  // X1^2 + X2^2 = (X1^2 + X2^2) * 1
  Verdict nss2 = verify_certificate(parse_certificate("real-nss f=X1 k=1 b1=X2 g1=X1^2+X2^2 h1=1"));
  CHECK(nss2.kind == VerdictKind::Verified);
  CHECK(nss2.exact);

  // a constant offset refutes at degree 0
  Verdict bad = verify_certificate(parse_certificate("real-h17 f=X1^2+X2^2+1 g=1 h1=X1 h2=X2"));
  CHECK(bad.kind == VerdictKind::Refuted);
  REQUIRE(bad.discrepancy_degree.has_value());
  CHECK(*bad.discrepancy_degree == 0);
}

TEST_CASE("lambda membership certificates") {
  // f = g * lambda with lambda = kfrac(2; gamma(X1)) in the Kochen ring
  Certificate ok = parse_certificate(
      "lambda p=3 order=12 f=wp(X1)*kfrac(2; gamma(X1)) g=wp(X1) "
      "lambda=kfrac(2; gamma(X1))");
  Verdict v = verify_certificate(ok);
  CHECK(v.kind == VerdictKind::Verified);

  // an integer lambda
  Verdict vi = verify_certificate(parse_certificate("lambda p=3 f=2*wp(X1) g=wp(X1) lambda=2"));
  CHECK(vi.kind == VerdictKind::Verified);
  CHECK(vi.exact);

  // wrong witness refutes
  Verdict vw = verify_certificate(parse_certificate("lambda p=3 f=3*wp(X1) g=wp(X1) lambda=2"));
  CHECK(vw.kind == VerdictKind::Refuted);

  // shape violations: variables, division, non-integer constants
  CHECK(code_of([] {
          parse_certificate("lambda p=3 f=X1 g=1 lambda=X1");
        }) == errc::invalid_certificate);
  CHECK(code_of([] {
          parse_certificate("lambda p=3 f=X1 g=2*X1 lambda=1/2");
        }) == errc::invalid_certificate);
  CHECK(code_of([] {
          parse_certificate("lambda p=3 f=X1 g=X1 lambda=kfrac(X1; 1)");
        }) == errc::invalid_certificate);
  CHECK(code_of([] {
          parse_certificate("lambda p=3 f=X1 g=X1 lambda=sosinv(1)");
        }) == errc::invalid_certificate);

  // gamma arguments may be arbitrary field expressions
  Certificate deep = parse_certificate(
      "lambda p=3 f=(1+gamma(X1^2-X1))*wp(X1) g=wp(X1) lambda=1+gamma(X1^2-X1)");
  CHECK(verify_certificate(deep).kind == VerdictKind::Verified);
}

TEST_CASE("lambda values are p-adically integral at rational points") {
  // Elements of the Kochen ring have |.|_p <= 1 wherever they are defined.
  const long p = 3;
  ExprPtr lam = parse_expression("kfrac(1 + gamma(X1)^2; gamma(X1)) - 2*gamma(X1*X1 - 1)");
  std::mt19937_64 rng(7);
  int checked = 0;
  for (int i = 0; i < 60; ++i) {
    long num = static_cast<long>(rng() % 41) - 20;
    long den = 1 + static_cast<long>(rng() % 9);
    if (den % p == 0) den++;
    Rational x(num, den);
    x.canonicalize();
    auto v = expr_eval_rational(lam, {x}, p);
    if (!v || *v == 0) continue;
    CHECK(vp_rational(*v, p) >= 0);
    ++checked;
  }
  CHECK(checked >= 50);
}

TEST_CASE("sosinv values lie in (0, 1] at rational points") {
  ExprPtr e = parse_expression("sosinv(X1, 2*X1 + 1, X1^2 - 3)");
  for (long n = -12; n <= 12; ++n) {
    Rational x(n, 5);
    x.canonicalize();
    auto v = expr_eval_rational(e, {x}, std::nullopt);
    REQUIRE(v.has_value());
    CHECK(*v > 0);
    CHECK(*v <= 1);
  }
}

TEST_CASE("rational-point oracle agrees with the series verdicts") {
  // degree <= 6 identities: equality on a grid is an independent route
  Certificate good = parse_certificate(kWorkedCert);
  auto [lhs, rhs] = nss_sides(good);
  auto [differ, agree] = grid_compare(lhs, rhs, good.nvars, good.p, -8, 8);
  CHECK(differ == 0);
  CHECK(agree >= 10);

  Certificate bad = parse_certificate(
      "padic-nss p=3 prec=8 order=12 vars=2 f=X1 k=1 g=0 "
      "g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X2))");
  auto [blhs, brhs] = nss_sides(bad);
  auto [bdiffer, bagree] = grid_compare(blhs, brhs, bad.nvars, bad.p, -3, 3);
  CHECK(bdiffer > 0);
  (void)bagree;

  // the real certificates, same treatment: f g^2 - sum h_i^2 vanishes on grids
  ExprPtr h17l = parse_expression("(X1^2+X2^2)*1^2");
  ExprPtr h17r = parse_expression("X1*X1 + X2*X2");
  auto [d2, a2] = grid_compare(h17l, h17r, 2, 3, -5, 5);
  CHECK(d2 == 0);
  CHECK(a2 == 121);
}

TEST_CASE("integral-valuedness certificates over Tate elements") {
  // p X1 = X1 * p
  Verdict v1 = verify_certificate(parse_certificate("integral-valued p=3 prec=8 f=3*X1 g=X1 h=3"));
  CHECK(v1.kind == VerdictKind::Verified);

  // X1^2 = X1 * X1
  Verdict v2 =
      verify_certificate(parse_certificate("integral-valued p=3 prec=8 f=X1^2 g=X1 h=X1"));
  CHECK(v2.kind == VerdictKind::Verified);

  // cofactor 1/p has norm p > 1: rejected outright, not merely refuted
  Certificate viol = parse_certificate("integral-valued p=3 prec=8 f=X1 g=3*X1 h=1/3");
  CHECK(code_of([&] { verify_certificate(viol); }) == errc::norm_violation);

  // wrong factorization refutes with the offending degree
  Verdict bad =
      verify_certificate(parse_certificate("integral-valued p=3 prec=8 f=X1^2+1 g=X1 h=X1"));
  CHECK(bad.kind == VerdictKind::Refuted);
  REQUIRE(bad.discrepancy_degree.has_value());
  CHECK(*bad.discrepancy_degree == 0);

  // a genuinely p-adic instance: f = wp(X1)^2 splits as wp * wp
  Verdict v3 = verify_certificate(
      parse_certificate("integral-valued p=3 prec=6 f=wp(X1)^2 g=wp(X1) h=wp(X1)"));
  CHECK(v3.kind == VerdictKind::Verified);
}

TEST_CASE("tate_from_series keeps scale and digits honest") {
  PAdicField K{3, 8};
  EvalContext<PAdicField> ctx{K, 1, 8, 3, {}};
  TateElement e = tate_from_series(series_from_expr(parse_expression("1/3 + X1"), ctx));
  CHECK(e.scale() == -1);
  CHECK(e.prec() == 8);  // min(-1+8, 0+8) - (-1)
  CHECK(e.coeff(mk({0})) == 1);
  CHECK(e.coeff(mk({1})) == 3);

  TateElement z = tate_from_series(series_from_expr(parse_expression("X1 - X1"), ctx));
  CHECK(z.is_zero());
  CHECK(z.scale() == 0);
}

TEST_CASE("definiteness sampling: the gamma-shaped pair is definite") {
  for (long p : {2L, 3L, 5L}) {
    int N = 8;
    TateElement x = TateElement::coordinate(1, p, N, 0);
    TateElement f = x;  // becomes x^p - x
    for (long j = 1; j < p; ++j) f = f * x;
    f = f - x;
    TateElement g = (f * f - TateElement::constant(1, p, N, Integer(1))).mul_scalar(Integer(p));
    DefinitenessReport rep = sample_p_definiteness(f, g, 1500, 42);
    CHECK_FALSE(rep.counterexample);
    CHECK(rep.checked == 1500);
    CHECK(rep.skipped == 0);  // g is p * unit at every integral point
  }
}

TEST_CASE("definiteness sampling: non-definite pairs fail fast") {
  // |1| > |p| everywhere: first sample already witnesses it
  TateElement one = TateElement::constant(1, 3, 8, Integer(1));
  TateElement three = TateElement::constant(1, 3, 8, Integer(3));
  DefinitenessReport r1 = sample_p_definiteness(one, three, 100, 1);
  CHECK(r1.counterexample);
  CHECK(r1.index == 0);
  REQUIRE(r1.witness.size() == 1);

  // |X1| <= |p| fails as soon as a unit is drawn
  TateElement x = TateElement::coordinate(1, 3, 8, 0);
  DefinitenessReport r2 = sample_p_definiteness(x, three, 100, 1);
  CHECK(r2.counterexample);
  CHECK(r2.index < 10);

  // |X1| <= |p X1| fails at any nonzero point; derived oracle: at a = 1 the
  // valuations are 0 and 1
  DefinitenessReport r3 = sample_p_definiteness(x, x.mul_scalar(Integer(3)), 100, 7);
  CHECK(r3.counterexample);
  CHECK(r3.index < 10);
}

TEST_CASE("definiteness sampling: germ variant draws from p Z_p") {
  // |X1| <= |p| holds on the maximal ideal but not globally
  TateElement x = TateElement::coordinate(1, 3, 8, 0);
  TateElement three = TateElement::constant(1, 3, 8, Integer(3));
  DefinitenessReport germ = sample_p_definiteness(x, three, 400, 5, true);
  CHECK_FALSE(germ.counterexample);
  CHECK(germ.checked == 400);
  DefinitenessReport global = sample_p_definiteness(x, three, 400, 5, false);
  CHECK(global.counterexample);
}

TEST_CASE("definiteness sampling: bookkeeping and reproducibility") {
  // At precision 1 the germ draw is identically zero, so f and g both vanish
  // mod p: every sample is skipped, none silently counted as checked.
  TateElement f = TateElement::coordinate(1, 3, 1, 0) * TateElement::coordinate(1, 3, 1, 0);
  TateElement g = TateElement::coordinate(1, 3, 1, 0);
  DefinitenessReport rep = sample_p_definiteness(f, g, 25, 9, true);
  CHECK_FALSE(rep.counterexample);
  CHECK(rep.checked == 0);
  CHECK(rep.skipped == 25);

  // identical seeds reproduce the witness exactly
  TateElement x = TateElement::coordinate(2, 5, 6, 0);
  TateElement y = TateElement::coordinate(2, 5, 6, 1);
  TateElement a = x * y;
  TateElement b = (x * y).mul_scalar(Integer(5));
  DefinitenessReport u = sample_p_definiteness(a, b, 50, 77);
  DefinitenessReport w = sample_p_definiteness(a, b, 50, 77);
  REQUIRE(u.counterexample);
  REQUIRE(w.counterexample);
  CHECK(u.index == w.index);
  CHECK(u.witness == w.witness);

  // uniform draws cover residues mod p evenly enough to trust the stream
  std::uint64_t state = 4242;
  long counts[3] = {0, 0, 0};
  for (int i = 0; i < 900; ++i) {
    Integer d = draw_padic_integer(state, 3, 1);
    counts[mpz_get_ui(d.get_mpz_t())]++;
  }
  for (long c : counts) CHECK(c > 200);
}

TEST_CASE("certificate parsing rejects malformed records") {
  CHECK(code_of([] { parse_certificate("mystery p=3 f=X1"); }) == errc::invalid_certificate);
  CHECK(code_of([] { parse_certificate("padic-nss p=3 k=1 g=0 g1=X1 h1=1"); }) ==
        errc::invalid_certificate);  // missing f
  CHECK(code_of([] { parse_certificate("padic-nss f=X1 k=1 g=0 g1=X1 h1=1"); }) ==
        errc::invalid_certificate);  // missing p
  CHECK(code_of([] { parse_certificate("padic-nss p=3 f=X1 k=1 g=0 g2=X1 h1=1"); }) ==
        errc::invalid_certificate);  // gap in g-list
  CHECK(code_of([] { parse_certificate("padic-nss p=3 f=X1 k=1 g=0 g1=X1 g1=X2 h1=1"); }) ==
        errc::invalid_certificate);  // duplicate
  CHECK(code_of([] { parse_certificate("padic-nss p=3 f=X1 k=1 g=0 g1=X1*(1 h1=1"); }) ==
        errc::invalid_certificate);  // unbalanced parens
  CHECK(code_of([] { parse_certificate("padic-nss p=3 vars=1 f=X2 k=1 g=0 g1=X2 h1=1"); }) ==
        errc::invalid_certificate);  // vars too small
  CHECK(code_of([] { parse_certificate("real-h17 f=X1 g=1"); }) == errc::invalid_certificate);
  CHECK(code_of([] { parse_certificate("integral-valued p=3 f=X1 g=X1 h=1"); }) ==
        errc::invalid_certificate);  // missing prec

  // comments and newlines are whitespace
  Certificate c = parse_certificate(
      "real-nss  # sum of squares\n f=X1 k=1 b1=X2\n g1=X1^2+X2^2 h1=1\n");
  CHECK(verify_certificate(c).kind == VerdictKind::Verified);
}

TEST_CASE("verdicts downgrade to inconclusive when precision dies") {
  // Over Q_p with tiny precision, the difference of the two sides of a true
  // identity involving 1/p^2 coefficients cannot be resolved.
  Certificate c = parse_certificate(
      "padic-nss p=3 prec=1 order=12 f=X1 k=1 g=0 g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X1))");
  Verdict v = verify_certificate(c);
  // gamma's coefficients carry 1/3: at one digit of precision the comparison
  // either survives exactly or honestly reports Inconclusive -- it must never
  // report Refuted.
  CHECK(v.kind != VerdictKind::Refuted);
}

TEST_CASE("verification order monotonicity") {
  // A refuted identity keeps its discrepancy degree as the order grows.
  std::optional<long> seen;
  for (long D : {4L, 8L, 12L, 16L}) {
    Certificate bad = parse_certificate(
        "padic-nss p=3 order=" + std::to_string(D) +
        " vars=2 f=X1 k=1 g=0 g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X2))");
    Verdict v = verify_certificate(bad);
    CHECK(v.kind == VerdictKind::Refuted);
    REQUIRE(v.discrepancy_degree.has_value());
    if (seen)
      CHECK(*v.discrepancy_degree == *seen);
    else
      seen = v.discrepancy_degree;
  }
  CHECK(*seen == 2);
}
