#include "wk/cert.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "wk/fields.hpp"

namespace wk {

namespace {

// --- certificate text --------------------------------------------------------

std::string strip_comments(const std::string& text) {
  std::string out;
  bool skipping = false;
  for (char c : text) {
    if (c == '#') skipping = true;
    if (c == '\n') skipping = false;
    out.push_back(skipping ? ' ' : c == '\n' ? ' ' : c);
  }
  return out;
}

// Split "kind key=value key=value ..." where values may contain spaces inside
// parentheses (kfrac's two arguments are ';'-separated).  A new assignment
// starts at depth-0 whitespace followed by an identifier and '='.
struct RawCert {
  std::string kind;
  std::vector<std::pair<std::string, std::string>> entries;
};

bool assignment_starts_at(const std::string& s, std::size_t i) {
  if (!std::isalpha(static_cast<unsigned char>(s[i]))) return false;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
  return i < s.size() && s[i] == '=';
}

RawCert split_certificate(const std::string& text) {
  std::string s = strip_comments(text);
  std::size_t i = 0;
  auto skip_ws = [&] {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  };
  skip_ws();
  RawCert raw;
  while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '-' || s[i] == '_'))
    raw.kind.push_back(s[i++]);
  if (raw.kind.empty()) fail(errc::invalid_certificate, "missing certificate kind");
  skip_ws();
  while (i < s.size()) {
    std::string key;
    while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      key.push_back(s[i++]);
    if (key.empty() || i >= s.size() || s[i] != '=')
      fail(errc::invalid_certificate, "expected key=value near offset " + std::to_string(i));
    ++i;  // '='
    std::string value;
    int depth = 0;
    while (i < s.size()) {
      char c = s[i];
      if (c == '(') ++depth;
      if (c == ')') --depth;
      if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) {
        std::size_t j = i;
        while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
        if (j >= s.size() || assignment_starts_at(s, j)) {
          i = j;
          break;
        }
        value.push_back(c);
        ++i;
        continue;
      }
      value.push_back(c);
      ++i;
    }
    if (depth != 0) fail(errc::invalid_certificate, "unbalanced parentheses in value of '" + key + "'");
    while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back()))) value.pop_back();
    if (value.empty()) fail(errc::invalid_certificate, "empty value for '" + key + "'");
    raw.entries.emplace_back(key, value);
  }
  return raw;
}

long parse_long(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    long v = std::stol(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    fail(errc::invalid_certificate, "'" + key + "' must be an integer, got '" + value + "'");
  }
}

// Indexed key ("g3" -> ("g", 3)); plain keys have index 0.
std::pair<std::string, long> split_indexed(const std::string& key) {
  std::size_t i = key.size();
  while (i > 0 && std::isdigit(static_cast<unsigned char>(key[i - 1]))) --i;
  if (i == key.size() || i == 0) return {key, 0};
  return {key.substr(0, i), std::stol(key.substr(i))};
}

// --- identity synthesis --------------------------------------------------------

ExprPtr sum_of(const std::vector<ExprPtr>& parts) {
  if (parts.empty()) return make_number(Rational(0));
  ExprPtr acc = parts.front();
  for (std::size_t i = 1; i < parts.size(); ++i) acc = make_node(ExprKind::Add, {acc, parts[i]});
  return acc;
}

ExprPtr products_sum(const std::vector<ExprPtr>& as, const std::vector<ExprPtr>& bs) {
  std::vector<ExprPtr> parts;
  for (std::size_t i = 0; i < as.size(); ++i)
    parts.push_back(make_node(ExprKind::Mul, {as[i], bs[i]}));
  return sum_of(parts);
}

ExprPtr squares_sum(const std::vector<ExprPtr>& hs) {
  std::vector<ExprPtr> parts;
  for (const ExprPtr& h : hs) parts.push_back(make_pow(h, 2));
  return sum_of(parts);
}

// lhs - rhs for the certificate's defining identity.
std::pair<ExprPtr, ExprPtr> identity_sides(const Certificate& c) {
  switch (c.kind) {
    case CertKind::PAdicNSS: {
      ExprPtr mult = make_node(ExprKind::Sub,
                               {make_number(Rational(1)),
                                make_node(ExprKind::Mul, {make_node(ExprKind::Prime, {}), c.g})});
      return {make_node(ExprKind::Mul, {make_pow(c.f, c.k), mult}), products_sum(c.gs, c.hs)};
    }
    case CertKind::LambdaMembership:
      return {c.f, make_node(ExprKind::Mul, {c.g, c.lambda})};
    case CertKind::RealNSS: {
      ExprPtr lhs = make_pow(c.f, 2 * c.k);
      if (!c.bs.empty()) lhs = make_node(ExprKind::Add, {lhs, squares_sum(c.bs)});
      return {lhs, products_sum(c.gs, c.hs)};
    }
    case CertKind::RealH17:
      return {make_node(ExprKind::Mul, {c.f, make_pow(c.g, 2)}),
              squares_sum(c.hs)};
    case CertKind::IntegralValued:
      fail(errc::invalid_certificate, "integral-valued certificates have no series identity");
  }
  fail(errc::invalid_certificate, "unknown certificate kind");
}

// --- Kochen-ring shape ---------------------------------------------------------

// Generated from integer constants, p, and gamma(...) by ring operations.
bool zgamma_shaped(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Number:
      return e->num.get_den() == 1;
    case ExprKind::Prime:
    case ExprKind::Gamma:
      return true;
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Neg:
      for (const ExprPtr& kid : e->kids)
        if (!zgamma_shaped(kid)) return false;
      return true;
    case ExprKind::Pow:
      return zgamma_shaped(e->kids[0]);
    default:
      return false;
  }
}

// The Kochen ring: quotients a/(1 - p b) with a, b integral in gamma-values,
// closed under the ring operations.
bool lambda_shaped(const ExprPtr& e) {
  if (zgamma_shaped(e)) return true;
  switch (e->kind) {
    case ExprKind::KFrac:
      return zgamma_shaped(e->kids[0]) && zgamma_shaped(e->kids[1]);
    case ExprKind::Add:
    case ExprKind::Sub:
    case ExprKind::Mul:
    case ExprKind::Neg:
      for (const ExprPtr& kid : e->kids)
        if (!lambda_shaped(kid)) return false;
      return true;
    case ExprKind::Pow:
      return lambda_shaped(e->kids[0]);
    default:
      return false;
  }
}

// --- identity comparison ---------------------------------------------------------

template <class F>
Verdict compare_sides(const ExprPtr& lhs, const ExprPtr& rhs, const EvalContext<F>& ctx) {
  SeriesFraction<F> L = cert_eval(lhs, ctx);
  SeriesFraction<F> R = cert_eval(rhs, ctx);
  Series<F> diff = L.num * R.den - R.num * L.den;
  Verdict v;
  v.exact = diff.exact();
  if (diff.is_zero()) {
    v.kind = VerdictKind::Verified;
    v.detail = v.exact ? "identity holds exactly"
                       : "identity holds modulo degree " + std::to_string(ctx.order);
    return v;
  }
  v.kind = VerdictKind::Refuted;
  v.discrepancy_degree = static_cast<long>(mono_degree(diff.terms().begin()->first));
  v.detail = "sides differ at total degree " + std::to_string(*v.discrepancy_degree);
  return v;
}

template <class F>
Verdict verify_identity(const Certificate& c, const F& field) {
  auto [lhs, rhs] = identity_sides(c);
  EvalContext<F> ctx{field, c.nvars, c.order,
                     c.p > 0 ? std::optional<long>(c.p) : std::nullopt, {}};
  try {
    return compare_sides(lhs, rhs, ctx);
  } catch (const Error& e) {
    if (e.code() == errc::precision_exhausted)
      return Verdict{VerdictKind::Inconclusive, false, std::nullopt,
                     std::string("coefficient precision exhausted: ") + e.what()};
    throw;
  }
}

Verdict verify_integral_valued(const Certificate& c) {
  if (!c.tate_f || !c.tate_g || !c.tate_h)
    fail(errc::invalid_certificate, "integral-valued certificates need f, g, and h");
  const TateElement& h = *c.tate_h;
  ValueWithInfinity nh = gauss_norm(h);
  if (!nh.is_infinite() && nh.scalar() < 0)
    fail(errc::norm_violation, "cofactor exceeds norm 1: |h| = p^" + rat_str(-nh.scalar()));
  TateElement prod = *c.tate_g * h;
  Verdict v;
  v.exact = false;
  if (c.tate_f->agree(prod)) {
    v.kind = VerdictKind::Verified;
    v.detail = "factorization holds to the shared precision";
    return v;
  }
  TateElement diff = *c.tate_f - prod;
  v.kind = VerdictKind::Refuted;
  if (!diff.terms().empty())
    v.discrepancy_degree = static_cast<long>(mono_degree(diff.terms().begin()->first));
  v.detail = "f and g*h disagree";
  return v;
}

}  // namespace

// --- parsing -------------------------------------------------------------------

Certificate parse_certificate(const std::string& text) {
  RawCert raw = split_certificate(text);
  Certificate c;
  if (raw.kind == "padic-nss")
    c.kind = CertKind::PAdicNSS;
  else if (raw.kind == "lambda")
    c.kind = CertKind::LambdaMembership;
  else if (raw.kind == "real-nss")
    c.kind = CertKind::RealNSS;
  else if (raw.kind == "real-h17")
    c.kind = CertKind::RealH17;
  else if (raw.kind == "integral-valued")
    c.kind = CertKind::IntegralValued;
  else
    fail(errc::invalid_certificate, "unknown certificate kind '" + raw.kind + "'");

  std::map<long, ExprPtr> gs, hs, bs;
  std::optional<long> declared_vars;
  ExprPtr raw_h;  // integral-valued cofactor before Tate conversion

  for (const auto& [key, value] : raw.entries) {
    auto [stem, idx] = split_indexed(key);
    if (idx > 0 && (stem == "g" || stem == "h" || stem == "b")) {
      auto& slot = stem == "g" ? gs : stem == "h" ? hs : bs;
      if (!slot.emplace(idx, parse_expression(value)).second)
        fail(errc::invalid_certificate, "duplicate key '" + key + "'");
      continue;
    }
    if (key == "p")
      c.p = parse_long(key, value);
    else if (key == "prec")
      c.prec = static_cast<int>(parse_long(key, value));
    else if (key == "order")
      c.order = parse_long(key, value);
    else if (key == "vars")
      declared_vars = parse_long(key, value);
    else if (key == "k")
      c.k = static_cast<unsigned>(parse_long(key, value));
    else if (key == "f")
      c.f = parse_expression(value);
    else if (key == "g")
      c.g = parse_expression(value);
    else if (key == "h")
      raw_h = parse_expression(value);
    else if (key == "lambda")
      c.lambda = parse_expression(value);
    else
      fail(errc::invalid_certificate, "unknown key '" + key + "'");
  }

  auto gather = [&](std::map<long, ExprPtr>& slot, std::vector<ExprPtr>& out, const char* name) {
    long expect = 1;
    for (const auto& [idx, e] : slot) {
      if (idx != expect)
        fail(errc::invalid_certificate,
             std::string(name) + std::to_string(expect) + " is missing");
      out.push_back(e);
      ++expect;
    }
  };
  gather(gs, c.gs, "g");
  gather(hs, c.hs, "h");
  gather(bs, c.bs, "b");

  if (!c.f) fail(errc::invalid_certificate, "certificate is missing f");
  switch (c.kind) {
    case CertKind::PAdicNSS:
      if (c.p <= 0) fail(errc::invalid_certificate, "padic-nss needs p");
      if (!c.g) fail(errc::invalid_certificate, "padic-nss needs the multiplier g");
      if (c.gs.empty() || c.gs.size() != c.hs.size())
        fail(errc::invalid_certificate, "padic-nss needs matching g1..gn and h1..hn");
      break;
    case CertKind::LambdaMembership:
      if (c.p <= 0) fail(errc::invalid_certificate, "lambda needs p");
      if (!c.g || !c.lambda) fail(errc::invalid_certificate, "lambda needs g and lambda");
      if (!lambda_shaped(c.lambda))
        fail(errc::invalid_certificate,
             "lambda is not a Kochen-ring element (integers, p, gamma, ring ops, kfrac)");
      break;
    case CertKind::RealNSS:
      if (c.gs.empty() || c.gs.size() != c.hs.size())
        fail(errc::invalid_certificate, "real-nss needs matching g1..gn and h1..hn");
      break;
    case CertKind::RealH17:
      if (!c.g) fail(errc::invalid_certificate, "real-h17 needs g");
      if (c.hs.empty()) fail(errc::invalid_certificate, "real-h17 needs h1..hn");
      break;
    case CertKind::IntegralValued:
      if (c.p <= 0 || c.prec <= 0)
        fail(errc::invalid_certificate, "integral-valued needs p and prec");
      if (!c.g || !raw_h) fail(errc::invalid_certificate, "integral-valued needs g and h");
      break;
  }

  int inferred = expr_max_var(c.f);
  for (const ExprPtr& e : {c.g, c.lambda, raw_h})
    if (e) inferred = std::max(inferred, expr_max_var(e));
  for (const auto* list : {&c.gs, &c.hs, &c.bs})
    for (const ExprPtr& e : *list) inferred = std::max(inferred, expr_max_var(e));
  c.nvars = declared_vars ? static_cast<int>(*declared_vars) : std::max(inferred, 1);
  if (c.nvars < inferred)
    fail(errc::invalid_certificate, "vars= is smaller than the largest variable index used");

  if (c.kind == CertKind::IntegralValued) {
    PAdicField K{c.p, c.prec};
    EvalContext<PAdicField> ctx{K, c.nvars, c.order, c.p, {}};
    c.tate_f = tate_from_series(series_from_expr(c.f, ctx));
    c.tate_g = tate_from_series(series_from_expr(c.g, ctx));
    c.tate_h = tate_from_series(series_from_expr(raw_h, ctx));
  }
  return c;
}

// --- verification ----------------------------------------------------------------

Verdict verify_certificate(const Certificate& c) {
  if (c.kind == CertKind::IntegralValued) return verify_integral_valued(c);
  if (c.prec > 0) {
    if (c.p <= 0) fail(errc::invalid_certificate, "prec without p");
    return verify_identity(c, PAdicField{c.p, c.prec});
  }
  return verify_identity(c, RationalField{});
}

SeriesFraction<RationalField> nss_residual(const Certificate& c) {
  auto [lhs, rhs] = identity_sides(c);
  RationalField Q;
  EvalContext<RationalField> ctx{Q, c.nvars, c.order,
                                 c.p > 0 ? std::optional<long>(c.p) : std::nullopt, {}};
  SeriesFraction<RationalField> L = cert_eval(lhs, ctx);
  SeriesFraction<RationalField> R = cert_eval(rhs, ctx);
  return reduce_fraction(SeriesFraction<RationalField>{L.num * R.den - R.num * L.den,
                                                       L.den * R.den});
}

// --- sampling ---------------------------------------------------------------------

Integer draw_padic_integer(std::uint64_t& state, long p, int digits) {
  const std::uint64_t up = static_cast<std::uint64_t>(p);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % up;
  Integer acc(0);
  Integer place(1);
  for (int j = 0; j < digits; ++j) {
    std::uint64_t r;
    do {
      r = splitmix64(state);
    } while (r >= limit);
    acc += place * static_cast<unsigned long>(r % up);
    place *= p;
  }
  return acc;
}

namespace {

struct PointVal {
  bool vanished;  // value is 0 mod p^(prec): val is only a lower bound
  long val;
};

PointVal point_valuation(const TateElement& f, const std::vector<Integer>& a) {
  Integer modulus = int_pow(Integer(f.p()), static_cast<unsigned long>(f.prec()));
  Integer acc(0);
  for (const auto& [alpha, c] : f.terms()) {
    Integer term = c;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] == 0) continue;
      Integer pw;
      mpz_powm_ui(pw.get_mpz_t(), a[i].get_mpz_t(), alpha[i], modulus.get_mpz_t());
      term = term * pw % modulus;
    }
    acc = (acc + term) % modulus;
  }
  if (acc == 0) return {true, f.scale() + f.prec()};
  return {false, f.scale() + int_vp(acc, Integer(f.p()))};
}

}  // namespace

DefinitenessReport sample_p_definiteness(const TateElement& f, const TateElement& g, long samples,
                                         std::uint64_t seed, bool germ) {
  if (f.p() != g.p()) fail(errc::out_of_domain, "mismatched primes");
  if (f.nvars() != g.nvars()) fail(errc::variable_count_mismatch, "mismatched variable counts");
  const long p = f.p();
  const int m = f.nvars();
  const int digits = std::max(f.prec(), g.prec());
  DefinitenessReport rep;
  for (long s = 0; s < samples; ++s) {
    std::uint64_t state = seed + static_cast<std::uint64_t>(s);
    std::vector<Integer> a;
    a.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
      if (germ)
        a.push_back(draw_padic_integer(state, p, digits - 1) * p);
      else
        a.push_back(draw_padic_integer(state, p, digits));
    }
    PointVal vf = point_valuation(f, a);
    PointVal vg = point_valuation(g, a);
    if (!vf.vanished && vf.val < vg.val) {
      // |f(a)| > |g(a)| whether vg.val is exact or only a lower bound.
      rep.counterexample = true;
      rep.witness = std::move(a);
      rep.index = s;
      return rep;
    }
    if (!vg.vanished && vf.val >= vg.val) {
      // Covers exact vf >= vg and the vanished case's lower bound.
      ++rep.checked;
      continue;
    }
    ++rep.skipped;
  }
  return rep;
}

// --- conversions -----------------------------------------------------------------

TateElement tate_from_series(const Series<PAdicField>& s) {
  const long p = s.field().p;
  const int field_prec = s.field().prec;
  if (s.is_zero()) return TateElement::zero(s.nvars(), p, field_prec);
  long scale = 0;
  int prec = field_prec;
  bool first = true;
  for (const auto& [alpha, c] : s.terms()) {
    (void)alpha;
    long v = c.val();
    scale = first ? v : std::min(scale, v);
    first = false;
  }
  for (const auto& [alpha, c] : s.terms()) {
    (void)alpha;
    prec = std::min(prec, static_cast<int>(c.val() + c.prec() - scale));
  }
  if (prec <= 0) fail(errc::precision_exhausted, "coefficients share no digits at a common scale");
  TateElement out(s.nvars(), p, prec, scale);
  Integer mod = int_pow(Integer(p), static_cast<unsigned long>(prec));
  for (const auto& [alpha, c] : s.terms()) {
    Integer r = c.unit() * int_pow(Integer(p), static_cast<unsigned long>(c.val() - scale)) % mod;
    out.set_coeff(alpha, r);
  }
  return out;
}

}  // namespace wk
