"""
Reproducing kernel polynomials Q_n(x, y; N, p) on the multinomial.

Q_n(x, y) is the sum over all orthonormal polynomials of total degree n of
Q°(x) Q°(y).  It does not depend on which orthonormal system is used and
has the explicit form

    Q_n(x, y) = sum_{z <= x, y; |z| <= n} C(N, |z|) C(N - |z|, n - |z|) (-1)^{n - |z|}
                * C(|z|; z) prod_j x_j[z_j] y_j[z_j] p_j^{-z_j} / N[|z|]^2

where a[k] is the falling factorial.  Three algebraically distinct
evaluation routes are provided (raw falling factorials, centred falling
factorials, sub-sampling probabilities) and are expected to agree exactly.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import exp, factorial
from typing import Sequence

from .exactnum import (
    binomial,
    enumerate_configurations,
    falling_factorial,
    multinomial_coeff,
    multinomial_pmf,
    poly_mul,
    simplex,
    sub_configurations,
    to_fraction,
)
from .krawtchouk import charlier


def _check_pair(x, y, p):
    x, y = tuple(int(v) for v in x), tuple(int(v) for v in y)
    if len(x) != len(y) or len(x) != len(p):
        raise ValueError("x, y and p must have the same dimension")
    if sum(x) != sum(y):
        raise ValueError(f"|x| = {sum(x)} differs from |y| = {sum(y)}")
    if any(v < 0 for v in x + y):
        raise ValueError("counts must be non-negative")
    return x, y


def _kernel_weights(N: int, n: int, k: int) -> int:
    return binomial(N, k) * binomial(N - k, n - k) * (-1) ** (n - k)


@lru_cache(maxsize=200_000)
def _diagonal_sums(x: tuple, y: tuple, p: tuple) -> tuple:
    # S_k = sum_{|z| = k, z <= x, y} C(k; z) x[z] y[z] p^-z, via a product of
    # exponential generating polynomials (one per cell)
    poly = [Fraction(1)]
    for xj, yj, pj in zip(x, y, p):
        fac = [
            Fraction(falling_factorial(xj, t) * falling_factorial(yj, t), factorial(t)) / pj ** t
            for t in range(min(xj, yj) + 1)
        ]
        poly = poly_mul(poly, fac)
    return tuple(factorial(k) * c for k, c in enumerate(poly))


def kernel_all(x: Sequence[int], y: Sequence[int], p: Sequence) -> list[Fraction]:
    """[Q_0(x, y), ..., Q_N(x, y)] exactly."""
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    if y < x:
        x, y = y, x
    return list(_kernel_all_cached(x, y, p))


@lru_cache(maxsize=200_000)
def _kernel_all_cached(x: tuple, y: tuple, p: tuple) -> tuple:
    N = sum(x)
    S = _diagonal_sums(x, y, p)
    S = [s / falling_factorial(N, k) ** 2 for k, s in enumerate(S)]
    out = []
    for n in range(N + 1):
        out.append(sum((_kernel_weights(N, n, k) * S[k] for k in range(min(n, len(S) - 1) + 1)), Fraction(0)))
    return tuple(out)


def kernel_eval(n: int, x: Sequence[int], y: Sequence[int], p: Sequence) -> Fraction:
    """Q_n(x, y; N, p) with N = |x| = |y|."""
    N = sum(x)
    if not 0 <= n <= N:
        raise ValueError(f"degree {n} outside 0..{N}")
    return kernel_all(x, y, p)[n]


def kernel_eval_centered(n: int, x: Sequence[int], y: Sequence[int], p: Sequence) -> Fraction:
    """Q_n via centred falling factorials x[z] - N[|z|] p^z, for 1 <= n <= N.

    The z-sum runs over every z with 1 <= |z| <= n, not only z <= x, y:
    once centred, terms with z outside the box no longer vanish.
    """
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    N = sum(x)
    if n == 0:
        raise ValueError("centred form holds for 1 <= n <= N only")
    if not 1 <= n <= N:
        raise ValueError(f"degree {n} outside 1..{N}")
    d = len(p)
    total = Fraction(0)
    for k in range(1, n + 1):
        Nk = falling_factorial(N, k)
        inner = Fraction(0)
        for z in enumerate_configurations(k, d):
            pz = _ppow(p, z)
            xc = _ff(x, z) - Nk * pz
            yc = _ff(y, z) - Nk * pz
            inner += multinomial_coeff(k, z) * xc * yc / pz
        total += _kernel_weights(N, n, k) * inner / Nk ** 2
    return total


def hypergeom_prob(z: Sequence[int], x: Sequence[int]) -> Fraction:
    """Chance that a size-|z| subsample without replacement from x has counts z."""
    if len(z) != len(x):
        raise ValueError("dimension mismatch")
    if any(a > b or a < 0 for a, b in zip(z, x)):
        raise ValueError(f"z = {tuple(z)} is not <= x = {tuple(x)}")
    num = 1
    for a, b in zip(z, x):
        num *= binomial(b, a)
    return Fraction(num, binomial(sum(x), sum(z)))


def _hyper0(z, x) -> Fraction:
    # hypergeometric probability, zero outside the box
    if any(a > b for a, b in zip(z, x)):
        return Fraction(0)
    return hypergeom_prob(z, x)


def kernel_eval_hypergeom(n: int, x: Sequence[int], y: Sequence[int], p: Sequence) -> Fraction:
    """Q_n in terms of subsampling probabilities relative to their multinomial means."""
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    N = sum(x)
    if not 1 <= n <= N:
        raise ValueError(f"degree {n} outside 1..{N}")
    d = len(p)
    total = Fraction(0)
    for k in range(1, n + 1):
        inner = Fraction(0)
        for z in enumerate_configurations(k, d):
            mz = multinomial_coeff(k, z) * _ppow(p, z)
            inner += mz * (_hyper0(z, x) / mz - 1) * (_hyper0(z, y) / mz - 1)
        total += _kernel_weights(N, n, k) * inner
    return total


def _ppow(p, z) -> Fraction:
    out = Fraction(1)
    for pj, zj in zip(p, z):
        out *= pj ** zj
    return out


def _ff(x, z) -> int:
    out = 1
    for a, b in zip(x, z):
        out *= falling_factorial(a, b)
    return out


def poisson_kernel_lhs(rho, x, y, p) -> Fraction:
    """1 + sum_{n >= 1} rho^n Q_n(x, y)."""
    rho = to_fraction(rho)
    return sum((rho ** n * q for n, q in enumerate(kernel_all(x, y, p))), Fraction(0))


def poisson_kernel_rhs(rho, x, y, p) -> Fraction:
    """The same quantity as the bivariate law of two multinomial samples
    sharing z common draws, divided by m(x) m(y)."""
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    rho = to_fraction(rho)
    N = sum(x)
    total = Fraction(0)
    for z in sub_configurations([min(a, b) for a, b in zip(x, y)]):
        k = sum(z)
        xz = tuple(a - b for a, b in zip(x, z))
        yz = tuple(a - b for a, b in zip(y, z))
        term = rho ** k * (1 - rho) ** (N - k) * multinomial_coeff(N, z) * _ppow(p, z)
        term *= multinomial_coeff(N - k, xz) * _ppow(p, xz)
        term *= multinomial_coeff(N - k, yz) * _ppow(p, yz)
        total += term
    return total / (multinomial_pmf(x, p) * multinomial_pmf(y, p))


def poisson_kernel_min_rho(p) -> Fraction:
    """Smallest rho for which the Poisson kernel is a probability law."""
    p = simplex(p)
    return -1 / (1 / min(p) - 1)


def kernel_recursion(n: int, x, y, p) -> Fraction:
    """Q_n(x, y; N) rebuilt from kernels at N - 1 by conditioning on the last drop.

    Q_n(x, y; N) = sum_{i,j} (x_i y_j / N^2)
                   * [Q_n(x - e_i, y - e_j; N-1) + (delta_ij / p_i - 1) Q_{n-1}(...; N-1)]
    """
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    N = sum(x)
    if N < 1 or n < 1:
        raise ValueError("recursion needs N >= 1 and n >= 1")
    d = len(p)
    total = Fraction(0)
    for i in range(d):
        if x[i] == 0:
            continue
        xi = x[:i] + (x[i] - 1,) + x[i + 1:]
        for j in range(d):
            if y[j] == 0:
                continue
            yj = y[:j] + (y[j] - 1,) + y[j + 1:]
            sub = kernel_all(xi, yj, p)
            cur = sub[n] if n <= N - 1 else Fraction(0)
            prev = sub[n - 1] if n - 1 <= N - 1 else Fraction(0)
            coef = (1 / p[i] if i == j else 0) - 1
            total += Fraction(x[i] * y[j], N * N) * (cur + coef * prev)
    return total


def kernel_transform(n: int, s, t, N: int, p) -> Fraction:
    """E[prod s_i^{X_i} t_j^{Y_j} Q_n(X, Y)] for independent multinomial X, Y."""
    p = simplex(p)
    s = [to_fraction(v) for v in s]
    t = [to_fraction(v) for v in t]
    Ts = sum(a * b for a, b in zip(p, s))
    Tt = sum(a * b for a, b in zip(p, t))
    D = sum(a * b * c for a, b, c in zip(p, s, t))
    return binomial(N, n) * (Ts * Tt) ** (N - n) * (D - Ts * Tt) ** n


def kernel_bound(n: int, N: int, p) -> Fraction:
    """C(N, n) (1/min p - 1)^n, attained at x = y = N e_j for the smallest p_j."""
    p = simplex(p)
    return binomial(N, n) * (1 / min(p) - 1) ** n


# product-Poisson limit

def poisson_limit_kernel(n: int, x: Sequence[int], y: Sequence[int], mu: Sequence) -> Fraction:
    """Q^P_n(x, y; mu) on the product of Poisson(mu_i) laws."""
    mu = tuple(to_fraction(m) for m in mu)
    if any(m <= 0 for m in mu):
        raise ValueError("Poisson means must be positive")
    if len(x) != len(mu) or len(y) != len(mu):
        raise ValueError("dimension mismatch")
    if n < 0:
        raise ValueError("degree must be non-negative")
    M = sum(mu)
    sx, sy = sum(x), sum(y)
    total = Fraction(0)
    for z in sub_configurations([min(a, b) for a, b in zip(x, y)], n):
        k = sum(z)
        prod_term = Fraction(1)
        for a, b, m, c in zip(x, y, mu, z):
            prod_term *= Fraction(falling_factorial(a, c) * falling_factorial(b, c), factorial(c)) / m ** c
        total += M ** (n - k) / factorial(n - k) * charlier(n - k, sx + sy - 2 * k, M) * prod_term
    return total


def poisson_limit_poisson_kernel(rho, x, y, mu) -> float:
    """Closed form of 1 + sum_n rho^n Q^P_n(x, y; mu), for 0 <= rho <= 1."""
    rho = to_fraction(rho)
    mu = tuple(to_fraction(m) for m in mu)
    M = sum(mu)
    sx, sy = sum(x), sum(y)
    total = Fraction(0)
    for z in sub_configurations([min(a, b) for a, b in zip(x, y)]):
        k = sum(z)
        term = rho ** k * (1 - rho) ** (sx + sy - 2 * k)
        for a, b, m, c in zip(x, y, mu, z):
            term *= Fraction(falling_factorial(a, c) * falling_factorial(b, c), factorial(c)) / m ** c
        total += term
    return exp(float(M * rho)) * float(total)


def poisson_limit_series(rho, x, y, mu, n_max: int = 30) -> tuple[float, float]:
    """Partial sum 1 + sum_{n=1}^{n_max} rho^n Q^P_n and a residual estimate.

    The residual is |rho| times the magnitude of the last included term,
    a heuristic rather than a bound.
    """
    rho = to_fraction(rho)
    total = Fraction(0)
    last = Fraction(0)
    for n in range(n_max + 1):
        last = rho ** n * poisson_limit_kernel(n, x, y, mu)
        total += last
    return float(total), abs(float(rho)) * abs(float(last))


def embed_poisson(x: Sequence[int], N: int) -> tuple:
    """Append the slack cell so a small count vector lives in a total-N configuration."""
    if sum(x) > N:
        raise ValueError("counts exceed N")
    return tuple(x) + (N - sum(x),)


def multinomial_from_means(mu: Sequence, N: int) -> tuple:
    """(mu / N, 1 - |mu| / N) as exact cell probabilities."""
    mu = [to_fraction(m) for m in mu]
    p = [m / N for m in mu]
    return tuple(p) + (1 - sum(p),)
