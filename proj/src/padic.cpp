#include "wk/padic.hpp"

#include <algorithm>

namespace wk {

namespace {

void check_context(long p, int prec) {
  if (p < 2 || !int_is_prime(Integer(p))) fail(errc::out_of_domain, "p must be prime");
  if (prec < 1) fail(errc::out_of_domain, "precision must be >= 1");
}

Integer p_power(long p, long e) { return int_pow(Integer(p), static_cast<unsigned long>(e)); }

}  // namespace

PAdic PAdic::make(long p, int prec, long v, const Integer& u) {
  PAdic x;
  x.p_ = p;
  x.prec_ = prec;
  x.zero_ = false;
  x.v_ = v;
  x.u_ = mod_reduce(u, p_power(p, prec));
  return x;
}

PAdic::PAdic(long p, int prec, long v, const Integer& unit) {
  check_context(p, prec);
  if (mpz_divisible_ui_p(unit.get_mpz_t(), static_cast<unsigned long>(p)))
    fail(errc::out_of_domain, "unit part divisible by p");
  *this = make(p, prec, v, unit);
}

PAdic PAdic::zero(long p, int prec) {
  check_context(p, prec);
  PAdic x;
  x.p_ = p;
  x.prec_ = prec;
  return x;
}

PAdic PAdic::from_rational(const Rational& q, long p, int prec) {
  check_context(p, prec);
  if (q == 0) return zero(p, prec);
  Integer pz(p);
  long v = rat_vp(q, pz);
  Rational u = q / rat_pow(Rational(pz), v);  // now vp(u) = 0
  Integer m = p_power(p, prec);
  Integer num = mod_reduce(u.get_num(), m);
  Integer den = mod_reduce(u.get_den(), m);
  return make(p, prec, v, num * mod_inverse(den, m));
}

ValueWithInfinity PAdic::valuation() const {
  return zero_ ? ValueWithInfinity::infinity() : ValueWithInfinity::finite(Rational(v_));
}

long PAdic::val() const {
  if (zero_) fail(errc::zero_input, "valuation of exact zero");
  return v_;
}

const Integer& PAdic::unit() const {
  if (zero_) fail(errc::zero_input, "unit part of exact zero");
  return u_;
}

Integer PAdic::residue_mod(int k) const {
  if (zero_) return Integer(0);
  if (v_ < 0) fail(errc::out_of_domain, "negative valuation has no integer residue");
  if (v_ + prec_ < k) fail(errc::precision_exhausted, "residue requested beyond known precision");
  return mod_reduce(u_ * p_power(p_, v_), p_power(p_, k));
}

std::string PAdic::str() const {
  if (zero_) return "0";
  return std::to_string(p_) + "^" + std::to_string(v_) + " * " + u_.get_str() +
         " (mod " + std::to_string(p_) + "^" + std::to_string(prec_) + ")";
}

PAdic padic_add_signed(const PAdic& a, const PAdic& b, bool subtract) {
  if (a.p_ != b.p_) fail(errc::out_of_domain, "mixed primes");
  long p = a.p_;
  int prec = std::min(a.prec_, b.prec_);
  if (a.zero_ && b.zero_) return PAdic::zero(p, prec);
  if (a.zero_) {
    PAdic r = PAdic::make(p, b.prec_, b.v_, subtract ? Integer(-b.u_) : b.u_);
    return r;
  }
  if (b.zero_) return PAdic::make(p, a.prec_, a.v_, a.u_);

  // Exact cancellation is only reportable when the operands are identical
  // representations of opposite (for +) or equal (for -) elements.
  if (a.v_ == b.v_ && a.prec_ == b.prec_) {
    Integer m = int_pow(Integer(p), static_cast<unsigned long>(a.prec_));
    Integer s = subtract ? Integer(a.u_ - b.u_) : Integer(a.u_ + b.u_);
    if (mod_reduce(s, m) == 0) return PAdic::zero(p, prec);
  }

  // The sum is known modulo p^M with M = min over operands of v + prec.
  long vmin = std::min(a.v_, b.v_);
  long M = std::min(a.v_ + a.prec_, b.v_ + b.prec_);
  long K = M - vmin;  // >= 1
  Integer m = int_pow(Integer(p), static_cast<unsigned long>(K));
  Integer s = a.u_ * int_pow(Integer(p), static_cast<unsigned long>(a.v_ - vmin));
  Integer t = b.u_ * int_pow(Integer(p), static_cast<unsigned long>(b.v_ - vmin));
  s = subtract ? Integer(s - t) : Integer(s + t);
  s = mod_reduce(s, m);
  if (s == 0)
    fail(errc::precision_exhausted,
         "operands cancel to the full known precision; leading digit unknown");
  long w = int_vp(s, Integer(p));
  Integer u = s / int_pow(Integer(p), static_cast<unsigned long>(w));
  PAdic r;
  r.p_ = p;
  r.prec_ = static_cast<int>(K - w);
  r.zero_ = false;
  r.v_ = vmin + w;
  r.u_ = mod_reduce(u, int_pow(Integer(p), static_cast<unsigned long>(K - w)));
  return r;
}

PAdic operator+(const PAdic& a, const PAdic& b) { return padic_add_signed(a, b, false); }
PAdic operator-(const PAdic& a, const PAdic& b) { return padic_add_signed(a, b, true); }

PAdic PAdic::operator-() const {
  if (zero_) return *this;
  return make(p_, prec_, v_, Integer(-u_));
}

PAdic operator*(const PAdic& a, const PAdic& b) {
  if (a.p_ != b.p_) fail(errc::out_of_domain, "mixed primes");
  int prec = std::min(a.prec_, b.prec_);
  if (a.zero_ || b.zero_) return PAdic::zero(a.p_, prec);
  PAdic r;
  r.p_ = a.p_;
  r.prec_ = prec;
  r.zero_ = false;
  r.v_ = a.v_ + b.v_;
  r.u_ = mod_reduce(a.u_ * b.u_, int_pow(Integer(a.p_), static_cast<unsigned long>(prec)));
  return r;
}

PAdic operator/(const PAdic& a, const PAdic& b) {
  if (a.p_ != b.p_) fail(errc::out_of_domain, "mixed primes");
  if (b.zero_) fail(errc::division_by_zero, "p-adic division by exact zero");
  int prec = std::min(a.prec_, b.prec_);
  if (a.zero_) return PAdic::zero(a.p_, prec);
  Integer m = int_pow(Integer(a.p_), static_cast<unsigned long>(prec));
  PAdic r;
  r.p_ = a.p_;
  r.prec_ = prec;
  r.zero_ = false;
  r.v_ = a.v_ - b.v_;
  r.u_ = mod_reduce(a.u_ * mod_inverse(b.u_, m), m);
  return r;
}

PAdic PAdic::pow(unsigned long e) const {
  PAdic acc = PAdic::from_rational(Rational(1), p_, prec_);
  PAdic base = *this;
  while (e) {
    if (e & 1) acc = acc * base;
    base = base * base;
    e >>= 1;
  }
  return acc;
}

Rational artin_schreier(const Rational& a, long p) {
  return rat_pow(a, p) - a;
}

std::optional<Rational> kochen_gamma(const Rational& a, long p) {
  Rational w = artin_schreier(a, p);
  Rational d = w * w - 1;
  if (d == 0) return std::nullopt;
  return w / (d * Rational(p));
}

PAdic kochen_gamma(const PAdic& a) {
  long p = a.p();
  PAdic one = PAdic::from_rational(Rational(1), p, a.prec());
  PAdic w = a.pow(static_cast<unsigned long>(p)) - a;
  if (w.is_zero()) return w;  // gamma(0-ish) = 0 / (0 - 1) = 0
  PAdic d = w * w - one;      // valuation(w) != 0, so no catastrophic cancellation
  PAdic pp = PAdic::from_rational(Rational(p), p, a.prec());
  return w / (d * pp);
}

PAdic padic_kth_root(const PAdic& a, unsigned k, std::optional<Integer> branch) {
  if (k == 0) fail(errc::wrong_arity, "0th root");
  long p = a.p();
  if (k % static_cast<unsigned long>(p) == 0)
    fail(errc::ramified_index, "root index divisible by p");
  if (a.is_zero()) return a;
  if (a.val() % static_cast<long>(k) != 0)
    fail(errc::no_root, "valuation not divisible by root index");

  int N = a.prec();
  Integer pz(p), m = int_pow(pz, static_cast<unsigned long>(N));
  Integer u = a.unit();

  // Root of y^k = u mod p.  p ∤ k and p ∤ c make every such root simple.
  Integer u0 = mod_reduce(u, pz);
  Integer c0(-1);
  if (branch) {
    Integer b0 = mod_reduce(*branch, pz);
    if (b0 == 0) fail(errc::bad_branch, "branch hint divisible by p");
    Integer bk;
    mpz_powm_ui(bk.get_mpz_t(), b0.get_mpz_t(), k, pz.get_mpz_t());
    if (bk != u0) fail(errc::bad_branch, "branch hint is not a k-th root mod p");
    c0 = b0;
  } else {
    for (Integer c(1); c < pz; ++c) {
      Integer ck;
      mpz_powm_ui(ck.get_mpz_t(), c.get_mpz_t(), k, pz.get_mpz_t());
      if (ck == u0) {
        c0 = c;
        break;  // smallest admissible residue; a 1-unit picks up c0 = 1
      }
    }
    if (c0 < 0) fail(errc::no_root, "unit part has no k-th root mod p");
  }

  // Newton iteration y <- y - (y^k - u) / (k y^(k-1)) mod p^N; quadratic, so
  // a handful of rounds reach full precision.
  Integer y = c0;
  for (int it = 0; it < N + 2; ++it) {
    Integer yk1, f, df;
    mpz_powm_ui(yk1.get_mpz_t(), y.get_mpz_t(), k - 1, m.get_mpz_t());
    f = mod_reduce(yk1 * y - u, m);
    if (f == 0) break;
    df = mod_reduce(Integer(k) * yk1, m);
    y = mod_reduce(y - f * mod_inverse(df, m), m);
  }
  return PAdic(p, N, a.val() / static_cast<long>(k), y);
}

}  // namespace wk
