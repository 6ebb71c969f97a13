#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wk/expr.hpp"
#include "wk/tate.hpp"

namespace wk {

// Certificates are closed identities whose truth implies the property they
// advertise; verification re-evaluates both sides and compares.
//
//   padic-nss        f^k (1 - p g)      = sum_i g_i h_i
//   lambda           f                  = g * lambda, lambda a Kochen-ring element
//   real-nss         f^(2k) + sum b_i^2 = sum_i g_i h_i
//   real-h17         f g^2              = sum_i h_i^2
//   integral-valued  f                  = g h with |h| <= 1, over p-adic Tate elements
enum class CertKind { PAdicNSS, LambdaMembership, RealNSS, RealH17, IntegralValued };

struct Certificate {
  CertKind kind;
  long p = 0;       // 0 when no prime is declared
  int prec = 0;     // > 0 selects p-adic coefficients at this precision
  long order = 12;  // working truncation order for series comparison
  int nvars = 1;
  unsigned k = 1;
  ExprPtr f, g, lambda;
  std::vector<ExprPtr> gs, hs, bs;
  std::optional<TateElement> tate_f, tate_g, tate_h;
};

enum class VerdictKind { Verified, Refuted, Inconclusive };

struct Verdict {
  VerdictKind kind;
  // True when both sides were compared as exact polynomials; false means the
  // identity was only checked modulo the working order.
  bool exact = false;
  std::optional<long> discrepancy_degree;  // least total degree where the sides differ
  std::string detail;
};

// Parse the one-record certificate format:
//
//   padic-nss p=3 prec=8 order=12 f=X1 k=1 g=0 g1=X1*(1-3*gamma(X1)) h1=kfrac(1; gamma(X1))
//
// The leading word picks the kind (padic-nss | lambda | real-nss | real-h17 |
// integral-valued); the rest are key=value assignments whose values use the
// expression grammar and may contain spaces inside parentheses.  Indexed keys
// g1..gn, h1..hn, b1..bn collect the certificate's lists; vars= overrides the
// inferred variable count; '#' starts a comment.
Certificate parse_certificate(const std::string& text);

Verdict verify_certificate(const Certificate& c);

// The identity residual (lhs - rhs) after clearing denominators, over the
// rationals; exposed so independent checks can inspect what was compared.
SeriesFraction<RationalField> nss_residual(const Certificate& c);

// Draw points of Z_p^m (of pZ_p^m when `germ`), uniformly mod p^N, and test
// |f(a)| <= |g(a)| at each.  Stops at the first counterexample.  Samples where
// neither valuation is resolved mod p^N are skipped and counted.
struct DefinitenessReport {
  bool counterexample = false;
  std::vector<Integer> witness;  // coordinates of the failing point
  long index = -1;               // 0-based sample number of the counterexample
  long checked = 0;
  long skipped = 0;
};

DefinitenessReport sample_p_definiteness(const TateElement& f, const TateElement& g, long samples,
                                         std::uint64_t seed, bool germ = false);

// Split-mix generator: a weak but fully reproducible stream, one per sample.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform draw from [0, p^digits) via per-digit rejection sampling.
Integer draw_padic_integer(std::uint64_t& state, long p, int digits);

// Reinterpret a polynomial with p-adic coefficients as a Tate element; the
// result's scale is the least coefficient valuation.  Coefficient precision
// caps the result's precision.
TateElement tate_from_series(const Series<PAdicField>& s);

}  // namespace wk
