#include "wk/expr.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "wk/fields.hpp"

namespace wk {

ExprPtr make_number(const Rational& q) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Number;
  e->num = q;
  return e;
}

ExprPtr make_var(int i) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Var;
  e->var = i;
  return e;
}

ExprPtr make_node(ExprKind k, std::vector<ExprPtr> kids) {
  auto e = std::make_shared<Expr>();
  e->kind = k;
  e->kids = std::move(kids);
  return e;
}

ExprPtr make_pow(ExprPtr base, unsigned exp) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Pow;
  e->exp = exp;
  e->kids.push_back(std::move(base));
  return e;
}

ExprPtr make_atom(const std::string& name) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::Atom;
  e->name = name;
  return e;
}

namespace {

ExprPtr make_tpow(const Rational& q) {
  auto e = std::make_shared<Expr>();
  e->kind = ExprKind::TPow;
  e->num = q;
  return e;
}

// --- lexer -------------------------------------------------------------------

enum class Tok {
  Int, Prime, Var, T, Name, AtName,
  LParen, RParen, Plus, Minus, Star, Slash, Caret, Semi, Comma,
  End,
};

struct Token {
  Tok kind;
  std::size_t pos;
  Integer value;     // Int
  int var = 0;       // Var (0-based)
  std::string text;  // Name / AtName
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::Int: return "an integer";
    case Tok::Prime: return "'p'";
    case Tok::Var: return "a variable";
    case Tok::T: return "'t'";
    case Tok::Name: return "a function name";
    case Tok::AtName: return "a series atom";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Plus: return "'+'";
    case Tok::Minus: return "'-'";
    case Tok::Star: return "'*'";
    case Tok::Slash: return "'/'";
    case Tok::Caret: return "'^'";
    case Tok::Semi: return "';'";
    case Tok::Comma: return "','";
    case Tok::End: return "end of input";
  }
  return "?";
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return cur_; }

  Token take() {
    Token t = cur_;
    advance();
    return t;
  }

  [[noreturn]] void expected(const std::string& what) const {
    std::ostringstream os;
    if (cur_.kind == Tok::End)
      os << "at end of input: expected " << what;
    else
      os << "at position " << cur_.pos + 1 << " ('" << slice(cur_) << "'): expected " << what;
    fail(errc::syntax_error, os.str());
  }

  Token require(Tok kind) {
    if (cur_.kind != kind) expected(tok_name(kind));
    return take();
  }

 private:
  std::string slice(const Token& t) const {
    std::size_t end = t.pos;
    while (end < src_.size() && !std::isspace(static_cast<unsigned char>(src_[end])) && end - t.pos < 12)
      ++end;
    return src_.substr(t.pos, std::max<std::size_t>(1, end - t.pos));
  }

  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
    cur_ = Token{Tok::End, i_, Integer(0), 0, ""};
    if (i_ >= src_.size()) return;
    char c = src_[i_];
    std::size_t start = i_;
    auto single = [&](Tok k) {
      cur_.kind = k;
      ++i_;
    };
    switch (c) {
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case '+': return single(Tok::Plus);
      case '-': return single(Tok::Minus);
      case '*': return single(Tok::Star);
      case '/': return single(Tok::Slash);
      case '^': return single(Tok::Caret);
      case ';': return single(Tok::Semi);
      case ',': return single(Tok::Comma);
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_])))
        digits.push_back(src_[i_++]);
      cur_ = Token{Tok::Int, start, Integer(digits), 0, ""};
      return;
    }
    if (c == '@') {
      ++i_;
      std::string name;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        name.push_back(src_[i_++]);
      if (name.empty())
        fail(errc::syntax_error, "at position " + std::to_string(start + 1) +
                                     ": expected a name after '@'");
      cur_ = Token{Tok::AtName, start, Integer(0), 0, name};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      if (c == 'X' && i_ + 1 < src_.size() &&
          std::isdigit(static_cast<unsigned char>(src_[i_ + 1]))) {
        ++i_;
        long idx = 0;
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
          idx = idx * 10 + (src_[i_] - '0');
          if (idx > 1000000) fail(errc::syntax_error, "variable index too large");
          ++i_;
        }
        if (idx < 1)
          fail(errc::syntax_error, "at position " + std::to_string(start + 1) +
                                       ": variable indices start at 1");
        cur_ = Token{Tok::Var, start, Integer(0), static_cast<int>(idx - 1), ""};
        return;
      }
      std::string name;
      while (i_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
        name.push_back(src_[i_++]);
      if (name == "p") {
        cur_ = Token{Tok::Prime, start, Integer(0), 0, ""};
      } else if (name == "t") {
        cur_ = Token{Tok::T, start, Integer(0), 0, ""};
      } else if (name == "gamma" || name == "wp" || name == "kfrac" || name == "sosinv") {
        cur_ = Token{Tok::Name, start, Integer(0), 0, name};
      } else {
        fail(errc::syntax_error, "at position " + std::to_string(start + 1) + ": unknown name '" +
                                     name + "'");
      }
      return;
    }
    fail(errc::syntax_error,
         "at position " + std::to_string(start + 1) + ": unexpected character '" +
             std::string(1, c) + "'");
  }

  const std::string& src_;
  std::size_t i_ = 0;
  Token cur_{Tok::End, 0, Integer(0), 0, ""};
};

// --- parser ------------------------------------------------------------------

class Parser {
 public:
  explicit Parser(const std::string& src) : lx_(src) {}

  ExprPtr parse() {
    ExprPtr e = expr();
    if (lx_.peek().kind != Tok::End) lx_.expected("an operator or end of input");
    return e;
  }

 private:
  ExprPtr expr() {
    ExprPtr e = term();
    while (lx_.peek().kind == Tok::Plus || lx_.peek().kind == Tok::Minus) {
      Tok op = lx_.take().kind;
      ExprPtr r = term();
      e = make_node(op == Tok::Plus ? ExprKind::Add : ExprKind::Sub, {e, r});
    }
    return e;
  }

  ExprPtr term() {
    ExprPtr e = factor();
    while (lx_.peek().kind == Tok::Star || lx_.peek().kind == Tok::Slash) {
      Tok op = lx_.take().kind;
      ExprPtr r = factor();
      e = make_node(op == Tok::Star ? ExprKind::Mul : ExprKind::Div, {e, r});
    }
    return e;
  }

  ExprPtr factor() {
    if (lx_.peek().kind == Tok::Minus) {
      lx_.take();
      return make_node(ExprKind::Neg, {factor()});
    }
    return power();
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (lx_.peek().kind == Tok::Caret) {
      lx_.take();
      Token e = lx_.require(Tok::Int);
      if (e.value > Integer(1000000)) fail(errc::syntax_error, "exponent too large");
      return make_pow(base, static_cast<unsigned>(mpz_get_ui(e.value.get_mpz_t())));
    }
    return base;
  }

  // The exponent of t: either a plain nonnegative integer or '(' [-] a [/ b] ')'.
  Rational t_exponent() {
    if (lx_.peek().kind == Tok::Int) {
      return Rational(lx_.take().value);
    }
    lx_.require(Tok::LParen);
    bool neg = false;
    if (lx_.peek().kind == Tok::Minus) {
      lx_.take();
      neg = true;
    }
    Integer a = lx_.require(Tok::Int).value;
    Integer b(1);
    if (lx_.peek().kind == Tok::Slash) {
      lx_.take();
      b = lx_.require(Tok::Int).value;
      if (b == 0) fail(errc::syntax_error, "zero denominator in a t-exponent");
    }
    lx_.require(Tok::RParen);
    Rational q(a, b);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  }

  std::vector<ExprPtr> call_args(const std::string& name) {
    lx_.require(Tok::LParen);
    if (lx_.peek().kind == Tok::RParen)
      fail(errc::arity_error, name + " needs at least one argument");
    std::vector<ExprPtr> args;
    args.push_back(expr());
    if (name == "kfrac") {
      if (lx_.peek().kind == Tok::RParen || lx_.peek().kind == Tok::Comma)
        fail(errc::arity_error, "kfrac takes two arguments separated by ';'");
      lx_.require(Tok::Semi);
      args.push_back(expr());
    } else if (name == "sosinv") {
      while (lx_.peek().kind == Tok::Comma) {
        lx_.take();
        args.push_back(expr());
      }
    } else {  // gamma, wp
      if (lx_.peek().kind == Tok::Comma || lx_.peek().kind == Tok::Semi)
        fail(errc::arity_error, name + " takes exactly one argument");
    }
    lx_.require(Tok::RParen);
    return args;
  }

  ExprPtr atom() {
    const Token& t = lx_.peek();
    switch (t.kind) {
      case Tok::Int:
        return make_number(Rational(lx_.take().value));
      case Tok::Prime:
        lx_.take();
        return make_node(ExprKind::Prime, {});
      case Tok::Var: {
        Token v = lx_.take();
        return make_var(v.var);
      }
      case Tok::T: {
        lx_.take();
        if (lx_.peek().kind == Tok::Caret) {
          lx_.take();
          return make_tpow(t_exponent());
        }
        return make_tpow(Rational(1));
      }
      case Tok::AtName:
        return make_atom(lx_.take().text);
      case Tok::Name: {
        std::string name = lx_.take().text;
        std::vector<ExprPtr> args = call_args(name);
        if (name == "gamma") return make_node(ExprKind::Gamma, std::move(args));
        if (name == "wp") return make_node(ExprKind::Wp, std::move(args));
        if (name == "kfrac") return make_node(ExprKind::KFrac, std::move(args));
        return make_node(ExprKind::SosInv, std::move(args));
      }
      case Tok::LParen: {
        lx_.take();
        ExprPtr e = expr();
        lx_.require(Tok::RParen);
        return e;
      }
      default:
        lx_.expected("a value");
    }
  }

  Lexer lx_;
};

// Precedence levels for the printer: sum < product < prefix minus < power < atom.
int level(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Add:
    case ExprKind::Sub:
      return 1;
    case ExprKind::Mul:
    case ExprKind::Div:
      return 2;
    case ExprKind::Neg:
      return 3;
    case ExprKind::Pow:
      return 4;
    case ExprKind::TPow:
      // t needs parentheses under '^' and looks like a power itself.
      return 4;
    case ExprKind::Number:
      // negative or fractional literals print with structure
      return (e->num < 0 || e->num.get_den() != 1) ? 2 : 5;
    default:
      return 5;
  }
}

void print(const ExprPtr& e, std::ostream& os, int parent_level, bool right_side) {
  int mine = level(e);
  bool parens = mine < parent_level || (mine == parent_level && right_side && mine <= 2);
  if (parens) os << '(';
  switch (e->kind) {
    case ExprKind::Number:
      os << rat_str(e->num);
      break;
    case ExprKind::Prime:
      os << 'p';
      break;
    case ExprKind::Var:
      os << 'X' << (e->var + 1);
      break;
    case ExprKind::TPow:
      if (e->num == 1) {
        os << 't';
      } else if (e->num.get_den() == 1 && e->num > 0) {
        os << "t^" << e->num.get_num().get_str();
      } else {
        os << "t^(" << rat_str(e->num) << ')';
      }
      break;
    case ExprKind::Add:
      print(e->kids[0], os, mine, false);
      os << " + ";
      print(e->kids[1], os, mine, true);
      break;
    case ExprKind::Sub:
      print(e->kids[0], os, mine, false);
      os << " - ";
      print(e->kids[1], os, mine, true);
      break;
    case ExprKind::Mul:
      print(e->kids[0], os, mine, false);
      os << '*';
      print(e->kids[1], os, mine, true);
      break;
    case ExprKind::Div:
      print(e->kids[0], os, mine, false);
      os << '/';
      print(e->kids[1], os, mine, true);
      break;
    case ExprKind::Neg:
      os << '-';
      print(e->kids[0], os, mine, true);
      break;
    case ExprKind::Pow:
      print(e->kids[0], os, mine + 1, false);
      os << '^' << e->exp;
      break;
    case ExprKind::Gamma:
    case ExprKind::Wp: {
      os << (e->kind == ExprKind::Gamma ? "gamma(" : "wp(");
      print(e->kids[0], os, 0, false);
      os << ')';
      break;
    }
    case ExprKind::KFrac:
      os << "kfrac(";
      print(e->kids[0], os, 0, false);
      os << "; ";
      print(e->kids[1], os, 0, false);
      os << ')';
      break;
    case ExprKind::SosInv: {
      os << "sosinv(";
      for (std::size_t i = 0; i < e->kids.size(); ++i) {
        if (i) os << ", ";
        print(e->kids[i], os, 0, false);
      }
      os << ')';
      break;
    }
    case ExprKind::Atom:
      os << '@' << e->name;
      break;
  }
  if (parens) os << ')';
}

}  // namespace

ExprPtr parse_expression(const std::string& src) { return Parser(src).parse(); }

std::string expr_str(const ExprPtr& e) {
  std::ostringstream os;
  print(e, os, 0, false);
  return os.str();
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Number:
    case ExprKind::TPow:
      return a->num == b->num;
    case ExprKind::Var:
      return a->var == b->var;
    case ExprKind::Atom:
      return a->name == b->name;
    case ExprKind::Pow:
      if (a->exp != b->exp) return false;
      break;
    default:
      break;
  }
  if (a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!expr_equal(a->kids[i], b->kids[i])) return false;
  return true;
}

int expr_max_var(const ExprPtr& e) {
  int m = e->kind == ExprKind::Var ? e->var + 1 : 0;
  for (const ExprPtr& kid : e->kids) m = std::max(m, expr_max_var(kid));
  return m;
}

// --- series-fraction evaluation ----------------------------------------------

namespace {

template <class F>
SeriesFraction<F> fr_const(const EvalContext<F>& ctx, const typename F::Elem& c) {
  return {Series<F>::constant(ctx.field, ctx.nvars, ctx.order, c),
          Series<F>::constant(ctx.field, ctx.nvars, ctx.order, ctx.field.one())};
}

template <class F>
SeriesFraction<F> fr_add(const SeriesFraction<F>& a, const SeriesFraction<F>& b) {
  return {a.num * b.den + b.num * a.den, a.den * b.den};
}

template <class F>
SeriesFraction<F> fr_mul(const SeriesFraction<F>& a, const SeriesFraction<F>& b) {
  return {a.num * b.num, a.den * b.den};
}

template <class F>
SeriesFraction<F> fr_pow(const SeriesFraction<F>& a, unsigned e, const EvalContext<F>& ctx) {
  SeriesFraction<F> acc = fr_const(ctx, ctx.field.one());
  for (unsigned i = 0; i < e; ++i) acc = fr_mul(acc, a);
  return acc;
}

template <class F>
long ctx_prime(const EvalContext<F>& ctx, const char* who) {
  if (!ctx.prime) fail(errc::out_of_domain, std::string(who) + " needs a declared prime");
  return *ctx.prime;
}

// wp(x) = x^p - x on a fraction n/d:  (n^p - n d^{p-1}) / d^p.
template <class F>
SeriesFraction<F> fr_wp(const SeriesFraction<F>& a, long p, const EvalContext<F>& ctx) {
  Series<F> np = a.num;
  Series<F> dp1 = Series<F>::constant(ctx.field, ctx.nvars, ctx.order, ctx.field.one());
  for (long i = 1; i < p; ++i) {
    np = np * a.num;
    dp1 = dp1 * a.den;
  }
  return {np - a.num * dp1, dp1 * a.den};
}

}  // namespace

template <class F>
SeriesFraction<F> reduce_fraction(SeriesFraction<F> fr) {
  const F& k = fr.num.field();
  int m = fr.num.nvars();
  if (!fr.num.is_zero() && !fr.den.is_zero()) {
    Mono content(static_cast<std::size_t>(m), 0u);
    bool first = true;
    for (const Series<F>* s : {&fr.num, &fr.den}) {
      for (const auto& [a, c] : s->terms()) {
        (void)c;
        for (int i = 0; i < m; ++i)
          content[static_cast<std::size_t>(i)] =
              first ? a[static_cast<std::size_t>(i)]
                    : std::min(content[static_cast<std::size_t>(i)], a[static_cast<std::size_t>(i)]);
        first = false;
      }
    }
    if (mono_degree(content) > 0) {
      auto shift = [&](const Series<F>& s) {
        Series<F> r(k, m, s.order(), s.exact());
        for (const auto& [a, c] : s.terms()) {
          Mono b = a;
          for (int i = 0; i < m; ++i) b[static_cast<std::size_t>(i)] -= content[static_cast<std::size_t>(i)];
          r.set_coeff(b, c);
        }
        return r;
      };
      fr.num = shift(fr.num);
      fr.den = shift(fr.den);
    }
  }
  if (!fr.den.is_zero()) {
    typename F::Elem lead = fr.den.terms().begin()->second;
    if (!k.eq(lead, k.one())) {
      typename F::Elem inv = k.div(k.one(), lead);
      fr.num = fr.num.scale(inv);
      fr.den = fr.den.scale(inv);
    }
  }
  return fr;
}

template <class F>
SeriesFraction<F> cert_eval(const ExprPtr& e, const EvalContext<F>& ctx) {
  switch (e->kind) {
    case ExprKind::Number:
      return fr_const(ctx, ctx.field.from_rational(e->num));
    case ExprKind::Prime:
      return fr_const(ctx, ctx.field.from_long(ctx_prime(ctx, "the literal p")));
    case ExprKind::Var: {
      if (e->var >= ctx.nvars)
        fail(errc::variable_count_mismatch,
             "X" + std::to_string(e->var + 1) + " exceeds the declared variable count");
      SeriesFraction<F> r = fr_const(ctx, ctx.field.one());
      r.num = Series<F>::coordinate(ctx.field, ctx.nvars, e->var, ctx.order);
      return r;
    }
    case ExprKind::TPow: {
      if constexpr (std::is_same_v<F, LaurentField>) {
        if (e->num.get_den().fits_slong_p() && e->num.get_num().fits_slong_p()) {
          return fr_const(ctx, ctx.field.t_power(e->num.get_num().get_si(),
                                                 e->num.get_den().get_si()));
        }
        fail(errc::out_of_domain, "t-exponent out of range");
      } else {
        fail(errc::out_of_domain, "t-powers need a valued coefficient field");
      }
    }
    case ExprKind::Atom: {
      auto it = ctx.atoms.find(e->name);
      if (it == ctx.atoms.end())
        fail(errc::out_of_domain, "unbound series atom '@" + e->name + "'");
      const Series<F>& s = it->second;
      if (s.nvars() != ctx.nvars)
        fail(errc::variable_count_mismatch, "series atom '@" + e->name +
                                                "' has the wrong variable count");
      SeriesFraction<F> r = fr_const(ctx, ctx.field.one());
      r.num = (s.exact() && ctx.order > s.order()) ? s.with_order(ctx.order)
                                                   : s.in_truncated_ring(ctx.order);
      return r;
    }
    case ExprKind::Add:
      return fr_add(cert_eval(e->kids[0], ctx), cert_eval(e->kids[1], ctx));
    case ExprKind::Sub: {
      SeriesFraction<F> b = cert_eval(e->kids[1], ctx);
      b.num = -b.num;
      return fr_add(cert_eval(e->kids[0], ctx), b);
    }
    case ExprKind::Neg: {
      SeriesFraction<F> a = cert_eval(e->kids[0], ctx);
      a.num = -a.num;
      return a;
    }
    case ExprKind::Mul:
      return fr_mul(cert_eval(e->kids[0], ctx), cert_eval(e->kids[1], ctx));
    case ExprKind::Div: {
      SeriesFraction<F> a = cert_eval(e->kids[0], ctx);
      SeriesFraction<F> b = cert_eval(e->kids[1], ctx);
      if (b.num.is_zero())
        fail(errc::zero_denominator, "division by a series that vanishes at this order");
      return {a.num * b.den, a.den * b.num};
    }
    case ExprKind::Pow:
      return fr_pow(cert_eval(e->kids[0], ctx), e->exp, ctx);
    case ExprKind::Wp:
      return fr_wp(cert_eval(e->kids[0], ctx), ctx_prime(ctx, "wp"), ctx);
    case ExprKind::Gamma: {
      long p = ctx_prime(ctx, "gamma");
      SeriesFraction<F> w = fr_wp(cert_eval(e->kids[0], ctx), p, ctx);
      Series<F> den = (w.num * w.num - w.den * w.den).scale(ctx.field.from_long(p));
      if (den.is_zero())
        fail(errc::gamma_pole, "wp of the argument is a square root of 1; gamma is undefined");
      return {w.num * w.den, den};
    }
    case ExprKind::KFrac: {
      long p = ctx_prime(ctx, "kfrac");
      SeriesFraction<F> f = cert_eval(e->kids[0], ctx);
      SeriesFraction<F> g = cert_eval(e->kids[1], ctx);
      Series<F> den = g.den - g.num.scale(ctx.field.from_long(p));
      if (den.is_zero())
        fail(errc::zero_denominator, "1 - p g vanishes at this order");
      return {f.num * g.den, f.den * den};
    }
    case ExprKind::SosInv: {
      SeriesFraction<F> s = fr_const(ctx, ctx.field.zero());
      for (const ExprPtr& kid : e->kids) {
        SeriesFraction<F> h = cert_eval(kid, ctx);
        s = fr_add(s, fr_mul(h, h));
      }
      Series<F> den = s.den + s.num;
      if (den.is_zero())
        fail(errc::zero_denominator, "1 + sum of squares vanishes at this order");
      return {s.den, den};
    }
  }
  fail(errc::out_of_domain, "unhandled expression node");
}

template <class F>
Series<F> series_from_expr(const ExprPtr& e, const EvalContext<F>& ctx) {
  SeriesFraction<F> fr = reduce_fraction(cert_eval(e, ctx));
  if (fr.den.is_zero()) fail(errc::zero_denominator, "denominator vanishes at this order");
  // Constant denominator: a plain field division.
  if (fr.den.terms().size() == 1 && fr.den.terms().begin()->first == Mono(static_cast<std::size_t>(ctx.nvars), 0u)) {
    typename F::Elem c = fr.den.terms().begin()->second;
    return fr.num.scale(ctx.field.div(ctx.field.one(), c));
  }
  if (!fr.den.is_unit())
    fail(errc::not_a_unit, "expression is not a series: denominator has no constant term");
  return (fr.num * series_invert(fr.den)).truncated(ctx.order);
}

template <class F>
Puiseux<F> puiseux_from_expr(const ExprPtr& e, const F& field, std::optional<long> prime,
                             long trust) {
  using P = Puiseux<F>;
  auto rec = [&](auto&& self, const ExprPtr& n) -> P {
    auto need_prime = [&](const char* who) -> long {
      if (!prime) fail(errc::out_of_domain, std::string(who) + " needs a declared prime");
      return *prime;
    };
    auto wp_of = [&](const P& x, long p) -> P {
      return x.pow(static_cast<unsigned long>(p)) - x;
    };
    switch (n->kind) {
      case ExprKind::Number:
        return P::constant(field, field.from_rational(n->num), trust);
      case ExprKind::Prime:
        return P::constant(field, field.from_long(need_prime("the literal p")), trust);
      case ExprKind::TPow: {
        if (!n->num.get_den().fits_slong_p() || !n->num.get_num().fits_slong_p())
          fail(errc::out_of_domain, "t-exponent out of range");
        return P::monomial(field, field.one(), n->num.get_num().get_si(),
                           n->num.get_den().get_si(), trust);
      }
      case ExprKind::Add:
        return self(self, n->kids[0]) + self(self, n->kids[1]);
      case ExprKind::Sub:
        return self(self, n->kids[0]) - self(self, n->kids[1]);
      case ExprKind::Neg:
        return -self(self, n->kids[0]);
      case ExprKind::Mul:
        return self(self, n->kids[0]) * self(self, n->kids[1]);
      case ExprKind::Div:
        return self(self, n->kids[0]) / self(self, n->kids[1]);
      case ExprKind::Pow:
        return self(self, n->kids[0]).pow(n->exp);
      case ExprKind::Wp:
        return wp_of(self(self, n->kids[0]), need_prime("wp"));
      case ExprKind::Gamma: {
        long p = need_prime("gamma");
        P w = wp_of(self(self, n->kids[0]), p);
        P den = (w * w - P::constant(field, field.one(), trust)) *
                P::constant(field, field.from_long(p), trust);
        if (den.is_provably_zero())
          fail(errc::gamma_pole, "wp of the argument is a square root of 1; gamma is undefined");
        return w / den;
      }
      case ExprKind::KFrac: {
        long p = need_prime("kfrac");
        P f = self(self, n->kids[0]);
        P g = self(self, n->kids[1]);
        P den = P::constant(field, field.one(), trust) -
                g * P::constant(field, field.from_long(p), trust);
        if (den.is_provably_zero()) fail(errc::zero_denominator, "1 - p g is zero");
        return f / den;
      }
      case ExprKind::SosInv: {
        P s = P::constant(field, field.one(), trust);
        for (const ExprPtr& kid : n->kids) {
          P h = self(self, kid);
          s = s + h * h;
        }
        if (s.is_provably_zero()) fail(errc::zero_denominator, "1 + sum of squares is zero");
        return P::constant(field, field.one(), trust) / s;
      }
      case ExprKind::Var:
      case ExprKind::Atom:
        fail(errc::out_of_domain, "variables make no sense for a single valued element");
    }
    fail(errc::out_of_domain, "unhandled expression node");
  };
  return rec(rec, e);
}

std::optional<Rational> expr_eval_rational(const ExprPtr& e, const std::vector<Rational>& point,
                                           std::optional<long> prime) {
  auto need_prime = [&](const char* who) -> long {
    if (!prime) fail(errc::out_of_domain, std::string(who) + " needs a declared prime");
    return *prime;
  };
  auto wp_of = [&](const Rational& x, long p) {
    return Rational(rat_pow(x, p) - x);
  };
  switch (e->kind) {
    case ExprKind::Number:
      return e->num;
    case ExprKind::Prime:
      return Rational(need_prime("the literal p"));
    case ExprKind::Var:
      if (static_cast<std::size_t>(e->var) >= point.size())
        fail(errc::variable_count_mismatch, "point has too few coordinates");
      return point[static_cast<std::size_t>(e->var)];
    case ExprKind::Add: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      auto b = expr_eval_rational(e->kids[1], point, prime);
      if (!a || !b) return std::nullopt;
      return Rational(*a + *b);
    }
    case ExprKind::Sub: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      auto b = expr_eval_rational(e->kids[1], point, prime);
      if (!a || !b) return std::nullopt;
      return Rational(*a - *b);
    }
    case ExprKind::Neg: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      if (!a) return std::nullopt;
      return Rational(-*a);
    }
    case ExprKind::Mul: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      auto b = expr_eval_rational(e->kids[1], point, prime);
      if (!a || !b) return std::nullopt;
      return Rational(*a * *b);
    }
    case ExprKind::Div: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      auto b = expr_eval_rational(e->kids[1], point, prime);
      if (!a || !b || *b == 0) return std::nullopt;
      return Rational(*a / *b);
    }
    case ExprKind::Pow: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      if (!a) return std::nullopt;
      return rat_pow(*a, static_cast<long>(e->exp));
    }
    case ExprKind::Wp: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      if (!a) return std::nullopt;
      return wp_of(*a, need_prime("wp"));
    }
    case ExprKind::Gamma: {
      auto a = expr_eval_rational(e->kids[0], point, prime);
      if (!a) return std::nullopt;
      long p = need_prime("gamma");
      Rational w = wp_of(*a, p);
      Rational den((w * w - 1) * p);
      if (den == 0) return std::nullopt;
      return Rational(w / den);
    }
    case ExprKind::KFrac: {
      auto f = expr_eval_rational(e->kids[0], point, prime);
      auto g = expr_eval_rational(e->kids[1], point, prime);
      if (!f || !g) return std::nullopt;
      Rational den(1 - *g * need_prime("kfrac"));
      if (den == 0) return std::nullopt;
      return Rational(*f / den);
    }
    case ExprKind::SosInv: {
      Rational s(1);
      for (const ExprPtr& kid : e->kids) {
        auto h = expr_eval_rational(kid, point, prime);
        if (!h) return std::nullopt;
        s += *h * *h;
      }
      if (s == 0) return std::nullopt;
      return Rational(1 / s);
    }
    case ExprKind::TPow:
    case ExprKind::Atom:
      fail(errc::out_of_domain, "expression cannot be evaluated at a rational point");
  }
  return std::nullopt;
}

template struct SeriesFraction<RationalField>;
template struct SeriesFraction<PAdicField>;
template struct SeriesFraction<LaurentField>;

template SeriesFraction<RationalField> reduce_fraction(SeriesFraction<RationalField>);
template SeriesFraction<PAdicField> reduce_fraction(SeriesFraction<PAdicField>);
template SeriesFraction<LaurentField> reduce_fraction(SeriesFraction<LaurentField>);

template SeriesFraction<RationalField> cert_eval(const ExprPtr&, const EvalContext<RationalField>&);
template SeriesFraction<PAdicField> cert_eval(const ExprPtr&, const EvalContext<PAdicField>&);
template SeriesFraction<LaurentField> cert_eval(const ExprPtr&, const EvalContext<LaurentField>&);

template Series<RationalField> series_from_expr(const ExprPtr&, const EvalContext<RationalField>&);
template Series<PAdicField> series_from_expr(const ExprPtr&, const EvalContext<PAdicField>&);
template Series<LaurentField> series_from_expr(const ExprPtr&, const EvalContext<LaurentField>&);

template Puiseux<RationalField> puiseux_from_expr(const ExprPtr&, const RationalField&,
                                                  std::optional<long>, long);
template Puiseux<PAdicField> puiseux_from_expr(const ExprPtr&, const PAdicField&,
                                               std::optional<long>, long);

}  // namespace wk
