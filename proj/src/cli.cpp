#include "wk/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wk/cert.hpp"
#include "wk/expr.hpp"
#include "wk/puiseux.hpp"
#include "wk/series.hpp"
#include "wk/tate.hpp"

namespace wk {
namespace {

using nlohmann::json;

// Everything a subcommand can consume.  A single bag keeps the CLI11 option
// wiring flat; each subcommand registers only the flags it reads.
struct Opts {
  int vars = 0;     // 0 = infer from the expressions (largest X index)
  long order = 8;   // working truncation order D
  long p = 0;       // 0 = rational coefficients, otherwise Q_p
  int prec = 8;     // p-adic precision N
  std::string valuation = "t-adic";
  std::uint64_t seed = 0;
  bool json_out = false;
  long bound = 16;

  std::string f, g, a, b, x, branch, cert_file;
  std::vector<std::string> fs, gs, ats;
  long d = 0;
  bool inverse = false;
  unsigned k = 2;
  int unknowns = 0;  // 0 = one per equation
  long samples = 100;
  bool germ = false;
};

ValuationTag parse_tag(const std::string& s) {
  if (s == "trivial") return ValuationTag::Trivial;
  if (s == "t-adic") return ValuationTag::TAdic;
  if (s == "composite") return ValuationTag::CompositeP;
  fail(errc::out_of_domain, "unknown valuation '" + s + "' (trivial | t-adic | composite)");
}

void need_prime(const Opts& o, const std::string& what) {
  if (o.p <= 0) fail(errc::out_of_domain, what + " needs a prime (-p)");
}

// Variable count: explicit --vars wins, otherwise the largest index mentioned
// anywhere (but at least `floor_vars`, and at least 1).
int pick_vars(const Opts& o, std::initializer_list<ExprPtr> es, int floor_vars = 1) {
  if (o.vars > 0) return o.vars;
  int m = std::max(floor_vars, 1);
  for (const ExprPtr& e : es) m = std::max(m, expr_max_var(e));
  return m;
}

// Run `fn(field, prime)` over Q_p when -p was given, over Q otherwise.
template <class Fn>
int in_ring(const Opts& o, Fn&& fn) {
  if (o.p > 0) return fn(PAdicField{o.p, o.prec}, std::optional<long>(o.p));
  return fn(RationalField{}, std::optional<long>());
}

template <class F>
Series<F> series_arg(const std::string& src, const F& field, int nvars, long order,
                     std::optional<long> prime) {
  EvalContext<F> ctx{field, nvars, order, prime, {}};
  return series_from_expr(parse_expression(src), ctx);
}

// Ground expression -> rational constant; poles are reported, not propagated.
Rational ground_rational(const std::string& src, std::optional<long> prime) {
  auto q = expr_eval_rational(parse_expression(src), {}, prime);
  if (!q) fail(errc::division_by_zero, "'" + src + "' evaluates through a pole");
  return *q;
}

void emit(const Opts& o, std::ostream& out, const json& machine,
          const std::vector<std::pair<std::string, std::string>>& human) {
  if (o.json_out) {
    out << machine.dump() << "\n";
    return;
  }
  for (const auto& [key, value] : human) out << key << " = " << value << "\n";
}

// --- formal-series subcommands -----------------------------------------------

int cmd_divide(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    using F = std::decay_t<decltype(K)>;
    ExprPtr fe = parse_expression(o.f), ge = parse_expression(o.g);
    int nv = pick_vars(o, {fe, ge});
    EvalContext<F> ctx{K, nv, o.order, prime, {}};
    auto res = weierstrass_divide(series_from_expr(fe, ctx), series_from_expr(ge, ctx));
    emit(o, out,
         {{"q", res.q.str()},
          {"r", res.r.str()},
          {"d", res.d},
          {"reliable_order", res.reliable_order}},
         {{"q", res.q.str()}, {"r", res.r.str()}});
    return 0;
  });
}

int cmd_prepare(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    ExprPtr ge = parse_expression(o.g);
    auto res = weierstrass_prepare(series_arg(o.g, K, pick_vars(o, {ge}), o.order, prime));
    emit(o, out, {{"u", res.u.str()}, {"w", res.w.str()}, {"d", res.d}},
         {{"u", res.u.str()}, {"w", res.w.str()}});
    return 0;
  });
}

int cmd_shear(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    ExprPtr fe = parse_expression(o.f);
    auto s = tau_shear(series_arg(o.f, K, pick_vars(o, {fe}), o.order, prime), o.d, o.inverse);
    emit(o, out, {{"sheared", s.str()}}, {{"sheared", s.str()}});
    return 0;
  });
}

int cmd_regularize(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    ExprPtr fe = parse_expression(o.f);
    auto res = regularize(series_arg(o.f, K, pick_vars(o, {fe}), o.order, prime), o.bound);
    emit(o, out, {{"sheared", res.sheared.str()}, {"d", res.d}, {"degree", res.reg_degree}},
         {{"sheared", res.sheared.str()},
          {"d", std::to_string(res.d)},
          {"degree", std::to_string(res.reg_degree)}});
    return 0;
  });
}

int cmd_invert(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    ExprPtr fe = parse_expression(o.f);
    auto s = series_invert(series_arg(o.f, K, pick_vars(o, {fe}), o.order, prime));
    emit(o, out, {{"inverse", s.str()}}, {{"inverse", s.str()}});
    return 0;
  });
}

int cmd_subst(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    using F = std::decay_t<decltype(K)>;
    std::vector<ExprPtr> ges;
    for (const auto& src : o.gs) ges.push_back(parse_expression(src));
    int target_nv = o.vars > 0 ? o.vars : 1;
    for (const ExprPtr& e : ges) target_nv = std::max(target_nv, expr_max_var(e));
    EvalContext<F> tctx{K, target_nv, o.order, prime, {}};
    std::vector<Series<F>> gs;
    for (const ExprPtr& e : ges) gs.push_back(series_from_expr(e, tctx));
    // f lives in one variable per substituted series.
    EvalContext<F> fctx{K, static_cast<int>(gs.size()), o.order, prime, {}};
    auto s = substitute(series_from_expr(parse_expression(o.f), fctx), gs);
    emit(o, out, {{"result", s.str()}}, {{"result", s.str()}});
    return 0;
  });
}

int cmd_hensel_root(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    using F = std::decay_t<decltype(K)>;
    ExprPtr fe = parse_expression(o.f);
    Series<F> f = series_arg(o.f, K, pick_vars(o, {fe}), o.order, prime);
    std::optional<typename F::Elem> branch;
    if (!o.branch.empty()) branch = K.from_rational(ground_rational(o.branch, prime));
    auto r = hensel_root(f, o.k, branch);
    emit(o, out, {{"root", r.str()}}, {{"root", r.str()}});
    return 0;
  });
}

int cmd_ift(const Opts& o, std::ostream& out) {
  return in_ring(o, [&](const auto& K, std::optional<long> prime) {
    using F = std::decay_t<decltype(K)>;
    int n = o.unknowns > 0 ? o.unknowns : static_cast<int>(o.fs.size());
    std::vector<ExprPtr> fes;
    for (const auto& src : o.fs) fes.push_back(parse_expression(src));
    int nv = o.vars > 0 ? o.vars : n + 1;
    for (const ExprPtr& e : fes) nv = std::max(nv, expr_max_var(e));
    EvalContext<F> ctx{K, nv, o.order, prime, {}};
    std::vector<Series<F>> fs;
    for (const ExprPtr& e : fes) fs.push_back(series_from_expr(e, ctx));
    auto ys = implicit_solve(fs, n);
    int m = nv - n;
    json roots = json::array();
    std::vector<std::pair<std::string, std::string>> lines;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      roots.push_back(ys[i].str());
      lines.push_back({"X" + std::to_string(m + 1 + static_cast<int>(i)), ys[i].str()});
    }
    emit(o, out, {{"roots", roots}, {"free_vars", m}}, lines);
    return 0;
  });
}

// --- norms and Tate subcommands ----------------------------------------------

int cmd_gauss_norm(const Opts& o, std::ostream& out) {
  ExprPtr fe = parse_expression(o.f);
  ValueWithInfinity v = ValueWithInfinity::infinity();
  if (o.p > 0) {
    PAdicField K{o.p, o.prec};
    v = gauss_norm(tate_from_series(series_arg(o.f, K, pick_vars(o, {fe}), o.order, o.p)));
  } else {
    LaurentField L{};
    v = laurent_gauss_norm(series_arg(o.f, L, pick_vars(o, {fe}), o.order, std::nullopt));
  }
  emit(o, out, {{"val", v.str()}}, {{"val", v.str()}});
  return 0;
}

int cmd_tate_divide(const Opts& o, std::ostream& out) {
  need_prime(o, "tate-divide");
  PAdicField K{o.p, o.prec};
  ExprPtr fe = parse_expression(o.f), ge = parse_expression(o.g);
  int nv = pick_vars(o, {fe, ge});
  auto res = tate_divide(tate_from_series(series_arg(o.f, K, nv, o.order, o.p)),
                         tate_from_series(series_arg(o.g, K, nv, o.order, o.p)));
  emit(o, out, {{"q", res.q.str()}, {"r", res.r.str()}, {"d", res.d}},
       {{"q", res.q.str()}, {"r", res.r.str()}});
  return 0;
}

int cmd_tate_prepare(const Opts& o, std::ostream& out) {
  need_prime(o, "tate-prepare");
  PAdicField K{o.p, o.prec};
  ExprPtr ge = parse_expression(o.g);
  auto res = tate_prepare(tate_from_series(series_arg(o.g, K, pick_vars(o, {ge}), o.order, o.p)));
  emit(o, out, {{"u", res.u.str()}, {"w", res.w.str()}, {"d", res.d}},
       {{"u", res.u.str()}, {"w", res.w.str()}});
  return 0;
}

int cmd_tate_root(const Opts& o, std::ostream& out) {
  need_prime(o, "tate-root");
  PAdicField K{o.p, o.prec};
  ExprPtr fe = parse_expression(o.f);
  auto r = tate_kth_root(tate_from_series(series_arg(o.f, K, pick_vars(o, {fe}), o.order, o.p)),
                         o.k);
  emit(o, out, {{"root", r.str()}}, {{"root", r.str()}});
  return 0;
}

// --- evaluation and valuations -----------------------------------------------

template <class F>
int eval_at_infinitesimals(const F& K, std::optional<long> prime, const Opts& o,
                           std::ostream& out) {
  ExprPtr fe = parse_expression(o.f);
  int nv = pick_vars(o, {fe}, static_cast<int>(o.ats.size()));
  Series<F> f = series_arg(o.f, K, nv, o.order, prime);
  std::vector<Puiseux<F>> pts;
  for (const auto& src : o.ats)
    pts.push_back(puiseux_from_expr(parse_expression(src), K, prime));
  Puiseux<F> v = eval_infinitesimal(f, pts);
  emit(o, out, {{"value", v.str()}}, {{"value", v.str()}});
  return 0;
}

int cmd_eval(const Opts& o, std::ostream& out, bool valuation_given) {
  if (valuation_given) {
    ValuationTag tag = parse_tag(o.valuation);
    if (tag == ValuationTag::CompositeP) {
      need_prime(o, "composite-point evaluation");
      return eval_at_infinitesimals(PAdicField{o.p, o.prec}, std::optional<long>(o.p), o, out);
    }
    if (tag == ValuationTag::TAdic)
      return eval_at_infinitesimals(
          RationalField{}, o.p > 0 ? std::optional<long>(o.p) : std::optional<long>(), o, out);
    fail(errc::out_of_domain, "eval takes t-adic or composite points");
  }
  ExprPtr fe = parse_expression(o.f);
  int nv = pick_vars(o, {fe}, static_cast<int>(o.ats.size()));
  if (o.p > 0) {
    PAdicField K{o.p, o.prec};
    TateElement tf = tate_from_series(series_arg(o.f, K, nv, o.order, o.p));
    std::vector<PAdic> pts;
    for (const auto& src : o.ats)
      pts.push_back(PAdic::from_rational(ground_rational(src, o.p), o.p, o.prec));
    PAdic v = tate_eval(tf, pts);
    emit(o, out, {{"value", v.str()}}, {{"value", v.str()}});
    return 0;
  }
  RationalField K{};
  Series<RationalField> f = series_arg(o.f, K, nv, o.order, std::nullopt);
  std::vector<Rational> pts;
  for (const auto& src : o.ats) pts.push_back(ground_rational(src, std::nullopt));
  Rational v = series_eval(f, pts);
  emit(o, out, {{"value", rat_str(v)}}, {{"value", rat_str(v)}});
  return 0;
}

// Puiseux commands pick their coefficient field from the valuation tag:
// `composite` needs p-adic coefficients, the others work over Q.
template <class Fn>
int in_puiseux_ring(const Opts& o, ValuationTag tag, Fn&& fn) {
  if (tag == ValuationTag::CompositeP) {
    need_prime(o, "the composite valuation");
    return fn(PAdicField{o.p, o.prec}, std::optional<long>(o.p));
  }
  return fn(RationalField{}, o.p > 0 ? std::optional<long>(o.p) : std::optional<long>());
}

int cmd_val(const Opts& o, std::ostream& out) {
  ValuationTag tag = parse_tag(o.valuation);
  return in_puiseux_ring(o, tag, [&](const auto& K, std::optional<long> prime) {
    auto x = puiseux_from_expr(parse_expression(o.x), K, prime);
    ValueWithInfinity v = tagged_value(x, tag);
    emit(o, out, {{"val", v.str()}}, {{"val", v.str()}});
    return 0;
  });
}

int cmd_compare(const Opts& o, std::ostream& out) {
  ValuationTag tag = parse_tag(o.valuation);
  return in_puiseux_ring(o, tag, [&](const auto& K, std::optional<long> prime) {
    auto a = puiseux_from_expr(parse_expression(o.a), K, prime);
    auto b = puiseux_from_expr(parse_expression(o.b), K, prime);
    ValueWithInfinity va = tagged_value(a, tag), vb = tagged_value(b, tag);
    DominanceVerdict v = dominance_compare(a, b, tag);
    std::string relation =
        v.strictly_precedes ? "precedes" : (v.equivalent ? "equivalent" : "follows");
    json j{{"a", va.str()},
           {"b", vb.str()},
           {"precedes_eq", v.precedes_eq},
           {"strictly_precedes", v.strictly_precedes},
           {"equivalent", v.equivalent},
           {"similar", v.similar ? json(*v.similar) : json(nullptr)}};
    emit(o, out, j,
         {{"val(a)", va.str()},
          {"val(b)", vb.str()},
          {"relation", relation},
          {"similar", v.similar ? (*v.similar ? "true" : "false") : "undefined"}});
    return 0;
  });
}

int cmd_coarsen(const Opts& o, std::ostream& out) {
  need_prime(o, "coarsen");
  PAdicField K{o.p, o.prec};
  auto res = coarsen_specialize(puiseux_from_expr(parse_expression(o.x), K, o.p));
  emit(o, out,
       {{"coarse", rat_str(res.coarse)},
        {"residue", res.residue.str()},
        {"composite", res.composite.str()}},
       {{"coarse", rat_str(res.coarse)},
        {"residue", res.residue.str()},
        {"composite", res.composite.str()}});
  return 0;
}

// --- certificates and sampling -----------------------------------------------

int cmd_verify(const Opts& o, std::ostream& out) {
  std::ifstream file(o.cert_file);
  if (!file) fail(errc::invalid_certificate, "cannot open '" + o.cert_file + "'");
  std::ostringstream text;
  text << file.rdbuf();
  Certificate c = parse_certificate(text.str());
  Verdict v = verify_certificate(c);
  if (o.json_out) {
    json j{{"verdict", v.kind == VerdictKind::Verified
                           ? "verified"
                           : (v.kind == VerdictKind::Refuted ? "refuted" : "inconclusive")},
           {"order", c.order},
           {"exact", v.exact},
           {"discrepancy_degree", v.discrepancy_degree ? json(*v.discrepancy_degree) : json(nullptr)},
           {"detail", v.detail}};
    out << j.dump() << "\n";
  } else {
    switch (v.kind) {
      case VerdictKind::Verified:
        out << "verified\n";
        break;
      case VerdictKind::Refuted:
        out << "refuted\n";
        if (v.discrepancy_degree) out << "discrepancy_degree = " << *v.discrepancy_degree << "\n";
        break;
      case VerdictKind::Inconclusive:
        out << "inconclusive\n";
        if (!v.detail.empty()) out << "detail = " << v.detail << "\n";
        break;
    }
  }
  return v.kind == VerdictKind::Verified ? 0 : (v.kind == VerdictKind::Refuted ? 1 : 2);
}

int cmd_sample_definite(const Opts& o, std::ostream& out) {
  need_prime(o, "sample-definite");
  PAdicField K{o.p, o.prec};
  ExprPtr fe = parse_expression(o.f), ge = parse_expression(o.g);
  int nv = pick_vars(o, {fe, ge});
  TateElement tf = tate_from_series(series_arg(o.f, K, nv, o.order, o.p));
  TateElement tg = tate_from_series(series_arg(o.g, K, nv, o.order, o.p));
  DefinitenessReport rep = sample_p_definiteness(tf, tg, o.samples, o.seed, o.germ);
  if (o.json_out) {
    json witness = json(nullptr);
    if (rep.counterexample) {
      witness = json::array();
      for (const Integer& w : rep.witness) witness.push_back(w.get_str());
    }
    json j{{"verdict", rep.counterexample ? "counterexample" : "no counterexample"},
           {"samples", o.samples},
           {"checked", rep.checked},
           {"skipped", rep.skipped},
           {"index", rep.counterexample ? json(rep.index) : json(nullptr)},
           {"witness", witness}};
    out << j.dump() << "\n";
  } else if (rep.counterexample) {
    std::string point;
    for (const Integer& w : rep.witness) point += (point.empty() ? "" : ", ") + w.get_str();
    out << "counterexample\n"
        << "index = " << rep.index << "\n"
        << "point = (" << point << ")\n"
        << "checked = " << rep.checked << "\n"
        << "skipped = " << rep.skipped << "\n";
  } else {
    out << "no counterexample\n"
        << "samples = " << o.samples << "\n"
        << "checked = " << rep.checked << "\n"
        << "skipped = " << rep.skipped << "\n";
  }
  return rep.counterexample ? 1 : 0;
}

// --- wiring --------------------------------------------------------------------

void add_ring_flags(CLI::App* sub, Opts& o) {
  sub->add_option("--vars", o.vars, "variable count (default: inferred from the expressions)");
  sub->add_option("--order", o.order, "working truncation order D")->capture_default_str();
  sub->add_option("-p", o.p, "prime; selects p-adic coefficients");
  sub->add_option("-N", o.prec, "p-adic precision")->capture_default_str();
}

void add_json_flag(CLI::App* sub, Opts& o) {
  sub->add_flag("--json", o.json_out, "machine-readable output");
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Opts o;
  int rc = 0;
  CLI::App app{"exact Weierstrass division, Tate algebras, and p-adic certificates", "wk"};
  app.require_subcommand(1);

  auto* divide = app.add_subcommand("divide", "Weierstrass division f = q*g + r");
  add_ring_flags(divide, o);
  add_json_flag(divide, o);
  divide->add_option("--f", o.f, "dividend")->required();
  divide->add_option("--g", o.g, "divisor (regular in the last variable)")->required();
  divide->callback([&] { rc = cmd_divide(o, out); });

  auto* prepare = app.add_subcommand("prepare", "Weierstrass preparation g = u*w");
  add_ring_flags(prepare, o);
  add_json_flag(prepare, o);
  prepare->add_option("--g", o.g, "series to prepare")->required();
  prepare->callback([&] { rc = cmd_prepare(o, out); });

  auto* shear = app.add_subcommand("shear", "apply the regularizing shear of weight d");
  add_ring_flags(shear, o);
  add_json_flag(shear, o);
  shear->add_option("--f", o.f, "series to shear")->required();
  shear->add_option("--d", o.d, "shear weight (d >= 1)")->required();
  shear->add_flag("--inverse", o.inverse, "apply the inverse shear");
  shear->callback([&] { rc = cmd_shear(o, out); });

  auto* regularizec = app.add_subcommand("regularize", "find a shear making f regular");
  add_ring_flags(regularizec, o);
  add_json_flag(regularizec, o);
  regularizec->add_option("--f", o.f, "series to regularize")->required();
  regularizec->add_option("--bound", o.bound, "largest shear weight to try")->capture_default_str();
  regularizec->callback([&] { rc = cmd_regularize(o, out); });

  auto* invert = app.add_subcommand("invert", "invert a series with unit constant term");
  add_ring_flags(invert, o);
  add_json_flag(invert, o);
  invert->add_option("--f", o.f, "series to invert")->required();
  invert->callback([&] { rc = cmd_invert(o, out); });

  auto* subst = app.add_subcommand("subst", "substitute series into a series");
  add_ring_flags(subst, o);
  add_json_flag(subst, o);
  subst->add_option("--f", o.f, "outer series (one variable per --g)")->required();
  subst->add_option("--g", o.gs, "replacement series, one per variable of f")->required();
  subst->callback([&] { rc = cmd_subst(o, out); });

  auto* hensel = app.add_subcommand("hensel-root", "k-th root of a unit-constant series");
  add_ring_flags(hensel, o);
  add_json_flag(hensel, o);
  hensel->add_option("--f", o.f, "series whose root is wanted")->required();
  hensel->add_option("--k", o.k, "root exponent")->capture_default_str();
  hensel->add_option("--branch", o.branch, "constant-term root picking the branch");
  hensel->callback([&] { rc = cmd_hensel_root(o, out); });

  auto* ift = app.add_subcommand("ift", "solve f_i(X, Y) = 0 for the trailing unknowns Y");
  add_ring_flags(ift, o);
  add_json_flag(ift, o);
  ift->add_option("--f", o.fs, "equation (repeat once per unknown)")->required();
  ift->add_option("--unknowns", o.unknowns, "number of trailing unknowns (default: one per equation)");
  ift->callback([&] { rc = cmd_ift(o, out); });

  auto* gauss = app.add_subcommand(
      "gauss-norm", "Gauss valuation (p-adic with -p, else over Laurent coefficients)");
  add_ring_flags(gauss, o);
  add_json_flag(gauss, o);
  gauss->add_option("--f", o.f, "series to measure")->required();
  gauss->callback([&] { rc = cmd_gauss_norm(o, out); });

  auto* tdivide = app.add_subcommand("tate-divide", "Weierstrass division of Tate elements");
  add_ring_flags(tdivide, o);
  add_json_flag(tdivide, o);
  tdivide->add_option("--f", o.f, "dividend")->required();
  tdivide->add_option("--g", o.g, "regular divisor")->required();
  tdivide->callback([&] { rc = cmd_tate_divide(o, out); });

  auto* tprepare = app.add_subcommand("tate-prepare", "Weierstrass preparation of a Tate element");
  add_ring_flags(tprepare, o);
  add_json_flag(tprepare, o);
  tprepare->add_option("--g", o.g, "element to prepare")->required();
  tprepare->callback([&] { rc = cmd_tate_prepare(o, out); });

  auto* troot = app.add_subcommand("tate-root", "k-th root of a Tate element");
  add_ring_flags(troot, o);
  add_json_flag(troot, o);
  troot->add_option("--f", o.f, "element whose root is wanted")->required();
  troot->add_option("--k", o.k, "root exponent")->capture_default_str();
  troot->callback([&] { rc = cmd_tate_root(o, out); });

  auto* evalc = app.add_subcommand(
      "eval", "evaluate a series at a point (rational, p-adic, or infinitesimal)");
  add_ring_flags(evalc, o);
  add_json_flag(evalc, o);
  evalc->add_option("--f", o.f, "series to evaluate")->required();
  evalc->add_option("--at", o.ats, "point coordinates, one per variable")->required();
  auto* eval_tag = evalc->add_option(
      "--valuation", o.valuation, "evaluate at infinitesimal points (t-adic | composite)");
  evalc->callback([&] { rc = cmd_eval(o, out, eval_tag->count() > 0); });

  auto* val = app.add_subcommand("val", "valuation of a Puiseux element under a tag");
  add_ring_flags(val, o);
  add_json_flag(val, o);
  val->add_option("--x", o.x, "element to measure")->required();
  val->add_option("--valuation", o.valuation, "trivial | t-adic | composite")
      ->capture_default_str();
  val->callback([&] { rc = cmd_val(o, out); });

  auto* cmp = app.add_subcommand("compare", "dominance comparison of two Puiseux elements");
  add_ring_flags(cmp, o);
  add_json_flag(cmp, o);
  cmp->add_option("--a", o.a, "left element")->required();
  cmp->add_option("--b", o.b, "right element")->required();
  cmp->add_option("--valuation", o.valuation, "trivial | t-adic | composite")
      ->capture_default_str();
  cmp->callback([&] { rc = cmd_compare(o, out); });

  auto* coarsen = app.add_subcommand(
      "coarsen", "specialize a p-adic Puiseux element to its leading datum");
  add_ring_flags(coarsen, o);
  add_json_flag(coarsen, o);
  coarsen->add_option("--x", o.x, "element to coarsen")->required();
  coarsen->callback([&] { rc = cmd_coarsen(o, out); });

  auto* verify = app.add_subcommand("verify", "verify a certificate file");
  add_json_flag(verify, o);
  verify->add_option("file", o.cert_file, "certificate file")->required();
  verify->callback([&] { rc = cmd_verify(o, out); });

  auto* sample = app.add_subcommand(
      "sample-definite", "sample |f| <= |g| on Z_p^m (exit 1 on a counterexample)");
  add_ring_flags(sample, o);
  add_json_flag(sample, o);
  sample->add_option("--f", o.f, "numerator")->required();
  sample->add_option("--g", o.g, "dominating element")->required();
  sample->add_option("-n", o.samples, "number of samples")->capture_default_str();
  sample->add_option("--seed", o.seed, "sampler seed")->capture_default_str();
  sample->add_flag("--germ", o.germ, "sample from p*Z_p^m instead of Z_p^m");
  sample->callback([&] { rc = cmd_sample_definite(o, out); });

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("wk");
  for (const std::string& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return 2;
  }
  return rc;
}

}  // namespace wk
