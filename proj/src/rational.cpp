#include "wk/rational.hpp"

namespace wk {

long int_vp(const Integer& n, const Integer& p) {
  if (n == 0) fail(errc::zero_input, "valuation of zero integer");
  Integer m = abs(n);
  long v = 0;
  Integer q, r;
  for (;;) {
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t());
    if (r != 0) break;
    m = q;
    ++v;
  }
  return v;
}

long rat_vp(const Rational& q, const Integer& p) {
  if (q == 0) fail(errc::zero_input, "valuation of zero rational");
  long v = 0;
  if (q.get_num() != 0 && mpz_divisible_p(q.get_num().get_mpz_t(), p.get_mpz_t()))
    v += int_vp(q.get_num(), p);
  if (mpz_divisible_p(q.get_den().get_mpz_t(), p.get_mpz_t()))
    v -= int_vp(q.get_den(), p);
  return v;
}

Integer int_pow(const Integer& b, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), b.get_mpz_t(), e);
  return r;
}

Rational rat_pow(const Rational& b, long e) {
  if (e == 0) return Rational(1);
  if (e < 0) {
    if (b == 0) fail(errc::division_by_zero, "0 raised to a negative power");
    return rat_pow(Rational(1) / b, -e);
  }
  Rational r;
  mpz_pow_ui(r.get_num().get_mpz_t(), b.get_num().get_mpz_t(), static_cast<unsigned long>(e));
  mpz_pow_ui(r.get_den().get_mpz_t(), b.get_den().get_mpz_t(), static_cast<unsigned long>(e));
  return r;  // powers of a canonical fraction stay canonical
}

Integer mod_inverse(const Integer& a, const Integer& m) {
  Integer r;
  if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()))
    fail(errc::not_a_unit, "no inverse mod " + m.get_str());
  return r;
}

Integer mod_reduce(const Integer& a, const Integer& m) {
  Integer r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

std::optional<Rational> rational_kth_root(const Rational& a, unsigned k) {
  if (k == 0) fail(errc::wrong_arity, "0th root");
  if (k == 1) return a;
  if (a == 0) return Rational(0);
  if (a < 0 && k % 2 == 0) return std::nullopt;
  Integer num = abs(a.get_num()), den = a.get_den();
  Integer rn, rd;
  if (!mpz_root(rn.get_mpz_t(), num.get_mpz_t(), k)) return std::nullopt;
  if (!mpz_root(rd.get_mpz_t(), den.get_mpz_t(), k)) return std::nullopt;
  Rational r(a < 0 ? Integer(-rn) : rn, rd);
  r.canonicalize();
  return r;
}

bool int_is_prime(const Integer& p) {
  return mpz_probab_prime_p(p.get_mpz_t(), 40) != 0;
}

std::string rat_str(const Rational& q) { return q.get_str(); }

}  // namespace wk
