"""
Univariate Krawtchouk polynomials on Binomial(N, p) and Poisson-Charlier
polynomials on Poisson(lam).

Krawtchouk polynomials are scaled so that Q_n(0; N, p) = 1, in which case

    E[Q_m(X) Q_n(X)] = delta_{mn} / h_n,   h_n = C(N, n) (p/q)^n.
"""
from __future__ import annotations

from fractions import Fraction

from .exactnum import binomial, falling_factorial, poly_mul, poly_pow, to_fraction


def _check_binomial(N: int, p, allow_one: bool = True) -> tuple[Fraction, Fraction]:
    # p = 1 is a legitimate degenerate case (Q_n(x) = C(N-x, n) / C(N, n)); h_n is not
    p = to_fraction(p)
    if N < 0:
        raise ValueError("N must be non-negative")
    if not 0 < p <= 1 or (p == 1 and not allow_one):
        bracket = "]" if allow_one else ")"
        raise ValueError(f"p must lie in (0, 1{bracket}, got {p}")
    return p, 1 - p


def krawtchouk(n: int, x: int, N: int, p) -> Fraction:
    """Q_n(x; N, p) by the explicit hypergeometric-type sum."""
    p, q = _check_binomial(N, p)
    if not 0 <= n <= N:
        raise ValueError(f"degree {n} outside 0..{N}")
    if not 0 <= x <= N:
        raise ValueError(f"argument {x} outside 0..{N}")
    r = -q / p
    total = Fraction(0)
    for nu in range(min(x, n) + 1):
        total += r ** nu * binomial(x, nu) * binomial(N - x, n - nu)
    return total / binomial(N, n)


krawtchouk_eval = krawtchouk


def krawtchouk_all(x: int, N: int, p) -> list[Fraction]:
    """[Q_0(x), ..., Q_N(x)] from one generating-function expansion."""
    coeffs = krawtchouk_gf(x, N, p)
    return [Fraction(coeffs[n]) / binomial(N, n) for n in range(N + 1)]


def krawtchouk_norm(n: int, N: int, p) -> Fraction:
    """h_n(p) = C(N, n) (p/q)^n, the reciprocal squared norm."""
    p, q = _check_binomial(N, p, allow_one=False)
    if not 0 <= n <= N:
        raise ValueError(f"degree {n} outside 0..{N}")
    return binomial(N, n) * (p / q) ** n


def krawtchouk_gf(x: int, N: int, p) -> list[Fraction]:
    """Coefficients of t^0..t^N in (1 - t q/p)^x (1 + t)^(N - x)."""
    p, q = _check_binomial(N, p)
    if not 0 <= x <= N:
        raise ValueError(f"argument {x} outside 0..{N}")
    a = poly_pow([Fraction(1), -q / p], x)
    b = [Fraction(binomial(N - x, k)) for k in range(N - x + 1)]
    out = poly_mul(a, b)
    return out + [Fraction(0)] * (N + 1 - len(out))


def krawtchouk_gf_coeff(n: int, x: int, N: int, p) -> Fraction:
    return krawtchouk_gf(x, N, p)[n]


def krawtchouk_transform(n: int, psi, N: int, p) -> Fraction:
    """E[psi^X Q_n(X)] for X ~ Binomial(N, p), in closed form."""
    p, q = _check_binomial(N, p)
    psi = to_fraction(psi)
    return (q * (1 - psi)) ** n * (p * psi + q) ** (N - n)


def binomial_pmf(x: int, N: int, p) -> Fraction:
    p = to_fraction(p)
    return binomial(N, x) * p ** x * (1 - p) ** (N - x)


def charlier(n: int, x: int, lam) -> Fraction:
    """Poisson-Charlier C_n(x; lam) with sum_n C_n z^n / n! = e^z (1 - z/lam)^x.

    Extracting the z^n coefficient of the product of the two series gives
    the finite sum

        C_n(x; lam) = sum_k C(n, k) x_[k] (-1/lam)^k.
    """
    lam = to_fraction(lam)
    if lam <= 0:
        raise ValueError("lam must be positive")
    if n < 0 or x < 0:
        raise ValueError("degree and argument must be non-negative")
    total = Fraction(0)
    for k in range(min(n, x) + 1):
        total += binomial(n, k) * falling_factorial(x, k) * (-1 / lam) ** k
    return total
