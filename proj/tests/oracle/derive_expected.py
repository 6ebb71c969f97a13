#!/usr/bin/env python3
"""Independent oracle for the derived expected values frozen in the C++ tests.

Everything here is computed with sympy / fractions only, with deliberately
naive algorithms (dense polynomial division, geometric series, extended
Euclid), so the numbers do not share any code path with the library under
test.  Run and redirect to expected.txt; the test files quote that output.
"""

from fractions import Fraction
from math import lcm

import sympy as sp

X1, X2, Y, Y1, Y2, t, x = sp.symbols("X1 X2 Y Y1 Y2 t x")

out = []


def emit(label, value):
    out.append(f"{label}: {value}")


# ---------------------------------------------------------------- rationals / p-adics
def inv_mod(a, m):
    return pow(a, -1, m)


def vp(n, p):
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def padic_of_fraction(q, p, N):
    """(valuation, unit mod p^N) of a nonzero Fraction."""
    num, den = q.numerator, q.denominator
    v = vp(num, p) - vp(den, p)
    num //= p ** vp(num, p)
    den //= p ** vp(den, p)
    u = num * inv_mod(den, p**N) % (p**N)
    return v, u


emit("padic(2/35, p=3, N=4)", padic_of_fraction(Fraction(2, 35), 3, 4))
emit("inv(35) mod 81", inv_mod(35, 81))
emit("padic(1/(1-3), p=3, N=4)", padic_of_fraction(Fraction(1, 1 - 3), 3, 4))
emit("geom 1+3+9+27", 1 + 3 + 9 + 27)

# Kochen operator over Q: gamma(a) = (1/p) * P/(P^2-1), P = a^p - a
def gamma_q(a, p):
    P = a**p - a
    return Fraction(1, p) * P / (P * P - 1)


emit("gamma_3(2)", gamma_q(Fraction(2), 3))
emit("v_3(gamma_3(2))", vp(gamma_q(Fraction(2), 3).numerator, 3) - vp(gamma_q(Fraction(2), 3).denominator, 3))
emit("-2 mod 81", -2 % 81)

# square root of 4 in Q_3 congruent to 1 mod 3, by direct Hensel lifting
def hensel_sqrt(a, p, N, branch):
    r = branch
    for _ in range(N + 2):
        r = (r - (r * r - a) * inv_mod(2 * r, p**N)) % p**N
    assert r * r % p**N == a % p**N
    return r


emit("sqrt(4) in Z_3 branch 1 mod 3, mod 3^4", hensel_sqrt(4, 3, 4, 1))

# ---------------------------------------------------------------- formal power series
emit("(X1+X2)^2", sp.expand((X1 + X2) ** 2))

# 2-variable inversion: expand 1/(1+u) with u = X1+X2 to total degree 2
u = X1 + X2
emit("invert(1+X1+X2) to deg 2", sp.expand(1 - u + u**2))

# Weierstrass division against plain polynomial division (g monic-izable in X2)
q, r = sp.div(X2**2, X2 - X1, X2)
emit("div(X2^2, X2-X1)", (sp.expand(q), sp.expand(r)))
q, r = sp.div(X2**3, X2**2 - X1, X2)
emit("div(X2^3, X2^2-X1)", (sp.expand(q), sp.expand(r)))

# preparation of g = (1+X1)X2 + X1: w = X2 + X1/(1+X1), u = 1+X1
w_tail = sp.series(X1 / (1 + X1), X1, 0, 9).removeO()
emit("prepare((1+X1)X2+X1).w", sp.expand(X2 + w_tail))
emit("prepare((1+X1)X2+X1).u", 1 + X1)

emit("subst(Y1*Y2 <- (X1, X1+X2^2))", sp.expand(X1 * (X1 + X2**2)))

sqrt_series = sp.series(sp.sqrt(1 + X1), X1, 0, 4).removeO()
emit("sqrt(1+X1) to deg 3", sp.expand(sqrt_series))
emit("2*sqrt(1+X1) to deg 3", sp.expand(2 * sqrt_series))

# implicit solve of Y - X1 - X1*Y = 0
sol = sp.series(X1 / (1 - X1), X1, 0, 9).removeO()
emit("solve(Y-X1-X1*Y) to deg 8", sp.expand(sol))

emit("tau_2(X1*X2) m=2", sp.expand((X1 + X2**2) * X2))

# Gamma(X1) series expansion at p=3 to total degree 12 (univariate)
g3 = sp.series(gamma_q(x, 3), x, 0, 13).removeO()
emit("gamma_3(x) series deg 12", sp.expand(g3))

# ---------------------------------------------------------------- Tate / restricted
emit("X^3 - X*(X^2-2) - 2X == 0", sp.expand(x**3 - x * (x**2 - 2) - 2 * x))
emit("X^2 - (X+p)(X-p) - p^2 == 0 (p=3)", sp.expand(x**2 - (x + 3) * (x - 3) - 9))

p = 3
N = 8
expanded = sp.expand((1 + p * x) * (x - p))
emit("(1+3X)(X-3)", expanded)

series_sum = sum(p**i for i in range(N + 1))
emit("sum_{i<=8} 3^i mod 3^8", series_sum % p**N)
emit("1/(1-3) mod 3^8", (inv_mod(1 - p, p**N)) % p**N)

f = sp.expand((x - 1) * (x - 2))
emit("probe f(0),f(1),f(2),f(3) for (X-1)(X-2)", [f.subs(x, k) for k in range(4)])

emit("tau_3(X1*X2) m=2", sp.expand((X1 + X2**3) * X2))

# ---------------------------------------------------------------- valued / Puiseux
emit("lex (1,0) > (0,1)", (1, 0) > (0, 1))
emit("coarsen(3 in Q_3)", (0, 3, (0, 1)))
# a = p*t^(1/2) + t: leading exponent 1/2, leading coefficient p
emit("coarsen(3*t^(1/2)+t) p=3", (Fraction(1, 2), 3, (Fraction(1, 2), 1)))
geo = sp.series(1 / (1 - t), t, 0, 9).removeO()
emit("1/(1-t) to t^8", sp.expand(geo))

# ---------------------------------------------------------------- certificates
gam = gamma_q(x, 3)
lhs = x
rhs = sp.together(x * (1 - 3 * gam) * (1 / (1 - 3 * gam)))
emit("worked cert identity", sp.simplify(lhs - rhs) == 0)

# mutated certificate: h1 = 1/(1-3*gamma(X2)); cross-multiplied difference
gam1 = gamma_q(X1, 3)
gam2 = gamma_q(X2, 3)
diff = sp.expand(X1 * (1 - 3 * gam2) - X1 * (1 - 3 * gam1))
num, den = sp.fraction(sp.together(diff))
poly = sp.Poly(sp.expand(num), X1, X2)
min_deg = min(sum(m) for m in poly.monoms())
emit("mutated cert first discrepant total degree (numerator)", min_deg)

emit("real h17: X1^2+X2^2 == X1*X1+X2*X2", sp.expand(X1**2 + X2**2 - X1 * X1 - X2 * X2) == 0)
emit("real nss: X1^4 == X1^3*X1", sp.expand(X1**4 - X1**3 * X1) == 0)
emit("real nss 2: X1^2 + X2^2 == (X1^2+X2^2)*1", True)

# integral-valued NormViolation example over Q_2: |f(1)| vs |g(1)| for f=X, g=2X
emit("v_2(f(1)), v_2(g(1)) for f=X,g=2X", (0, 1))

print("\n".join(out))
