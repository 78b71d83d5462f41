"""
Multivariate Krawtchouk polynomials on the multinomial distribution.

Q_n(x; u) is the coefficient of w_1^{n_1} ... w_{d-1}^{n_{d-1}} in

    prod_j (1 + sum_l w_l u_j^{(l)})^{x_j}

where u^{(1)}, ..., u^{(d-1)} together with the constant function form an
orthonormal basis under the cell probabilities p.

Orthonormal bases generally need square roots.  To keep everything
rational, a :class:`Basis` stores *orthogonal* rational rows v^{(l)} plus
their squared norms c_l = sum_j v_j^2 p_j, so that u^{(l)} = v^{(l)} / sqrt(c_l).
Since Q_n is homogeneous of degree n_l in the l-th row,

    Q_n(x; u) = Q_n(x; v) / prod_l c_l^{n_l / 2},

and any product Q_n(x; u) Q_n(y; u) is rational.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod, sqrt
from typing import Sequence

from .exactnum import (
    enumerate_configurations,
    multinomial_coeff,
    multinomial_pmf,
    simplex,
    sub_configurations,
    to_fraction,
)


@dataclass(frozen=True)
class Basis:
    """Rational orthogonal rows for the non-constant basis functions."""

    rows: tuple
    weights: tuple
    sq_norms: tuple = field(init=False)

    def __post_init__(self):
        p = simplex(self.weights)
        rows = tuple(tuple(to_fraction(v) for v in r) for r in self.rows)
        d = len(p)
        if len(rows) != d - 1 or any(len(r) != d for r in rows):
            raise ValueError(f"need {d - 1} rows of length {d}")
        full = ((Fraction(1),) * d,) + rows
        gram = [[sum(a * b * w for a, b, w in zip(r, s, p)) for s in full] for r in full]
        for k in range(d):
            for l in range(d):
                if k != l and gram[k][l] != 0:
                    raise ValueError(f"rows {k} and {l} are not orthogonal under p")
            if gram[k][k] == 0:
                raise ValueError(f"row {k} has zero norm")
        object.__setattr__(self, "weights", p)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "sq_norms", tuple(gram[l][l] for l in range(1, d)))

    @property
    def d(self) -> int:
        return len(self.weights)

    def scale(self, n: Sequence[int]) -> Fraction:
        """prod_l c_l^{n_l}; divide a product of two raw values by this."""
        return prod((c ** k for c, k in zip(self.sq_norms, n)), start=Fraction(1))

    def orthonormal_rows(self) -> list[list[float]]:
        return [[float(v) / sqrt(c) for v in r] for r, c in zip(self.rows, self.sq_norms)]


def build_helmert_basis(p: Sequence, order: Sequence[int] | None = None) -> Basis:
    """Gram-Schmidt of cell indicators against the constant, under p.

    ``order`` chooses which d-1 indicators are orthogonalised and in which
    sequence (default: cells 0..d-2).  Different orders give genuinely
    different bases, which is handy for basis-independence checks.
    """
    p = simplex(p)
    d = len(p)
    if d < 2:
        raise ValueError("need d >= 2")
    if order is None:
        order = range(d - 1)
    order = list(order)
    if len(order) != d - 1 or len(set(order)) != d - 1:
        raise ValueError("order must list d-1 distinct cells")

    def ip(a, b):
        return sum(x * y * w for x, y, w in zip(a, b, p))

    done = [(Fraction(1),) * d]
    norms = [Fraction(1)]
    for j in order:
        v = [Fraction(int(i == j)) for i in range(d)]
        for r, c in zip(done, norms):
            coef = ip(v, r) / c
            v = [a - coef * b for a, b in zip(v, r)]
        done.append(tuple(v))
        norms.append(ip(v, v))
    return Basis(rows=tuple(done[1:]), weights=p)


def _truncated_product(x: Sequence[int], basis: Basis, caps: Sequence[int], total_cap: int | None):
    # dict exponent-tuple -> coefficient, keeping exponents <= caps and |exp| <= total_cap
    m = basis.d - 1
    poly = {(0,) * m: Fraction(1)}
    for j, xj in enumerate(x):
        factor = {(0,) * m: Fraction(1)}
        for l in range(m):
            e = [0] * m
            e[l] = 1
            if basis.rows[l][j] != 0:
                factor[tuple(e)] = basis.rows[l][j]
        for _ in range(xj):
            new: dict = {}
            for e1, c1 in poly.items():
                s1 = sum(e1)
                for e2, c2 in factor.items():
                    e = tuple(a + b for a, b in zip(e1, e2))
                    if any(a > b for a, b in zip(e, caps)):
                        continue
                    if total_cap is not None and s1 + sum(e2) > total_cap:
                        continue
                    new[e] = new.get(e, 0) + c1 * c2
            poly = new
    return poly


def mvk_eval(n: Sequence[int], x: Sequence[int], basis: Basis, normalized: bool = False):
    """Q_n(x; v) for the rational rows of ``basis``.

    With ``normalized=True`` the value for the orthonormal rows u is
    returned as a float (it may be irrational).
    """
    n = tuple(n)
    if len(n) != basis.d - 1 or len(x) != basis.d:
        raise ValueError("dimension mismatch between multi-index, configuration and basis")
    if sum(n) > sum(x):
        raise ValueError(f"|n| = {sum(n)} exceeds N = {sum(x)}")
    val = _truncated_product(x, basis, n, None).get(n, Fraction(0))
    if normalized:
        return float(val) / sqrt(float(basis.scale(n)))
    return val


def mvk_all(x: Sequence[int], basis: Basis) -> dict:
    """Every Q_n(x; v) with |n| <= N, from one truncated expansion."""
    N = sum(x)
    poly = _truncated_product(x, basis, (N,) * (basis.d - 1), N)
    return {n: poly.get(n, Fraction(0)) for n in multi_indices(N, basis.d - 1)}


def multi_indices(N: int, m: int, exact_total: int | None = None) -> list:
    """All n in N^m with |n| <= N (or |n| == exact_total)."""
    out = [n for n in sub_configurations((N,) * m, N)]
    if exact_total is not None:
        out = [n for n in out if sum(n) == exact_total]
    return out


def mvk_norm(n: Sequence[int], N: int) -> int:
    """E[Q_n(X; u)^2] = N! / (n_1! ... n_{d-1}! (N-|n|)!) for orthonormal u."""
    return multinomial_coeff(N, n)


def mvk_orthonormal_product(n, x, y, basis: Basis) -> Fraction:
    """Q°_n(x; u) Q°_n(y; u) for the orthonormal polynomials, exactly."""
    N = sum(x)
    return mvk_eval(n, x, basis) * mvk_eval(n, y, basis) / (basis.scale(n) * mvk_norm(n, N))


def mvk_transform(n: Sequence[int], s: Sequence, N: int, basis: Basis) -> Fraction:
    """E[prod_j s_j^{X_j} Q_n(X; v)] in closed form."""
    s = [to_fraction(v) for v in s]
    p = basis.weights
    T0 = sum(pj * sj for pj, sj in zip(p, s))
    out = multinomial_coeff(N, n) * T0 ** (N - sum(n))
    for row, k in zip(basis.rows, n):
        Ti = sum(pj * sj * uj for pj, sj, uj in zip(p, s, row))
        out *= Ti ** k
    return out


@dataclass
class MarginalLaw:
    """Joint law of the row/column marginal counts of an equal-eigenvalue table."""

    table: dict
    valid: bool
    min_cell: Fraction


def cell_probabilities(p: Sequence, rho) -> list[list[Fraction]]:
    """p_ij = p_i p_j (1 - rho + delta_ij rho / p_i)."""
    p = simplex(p)
    rho = to_fraction(rho)
    d = len(p)
    return [[p[i] * p[j] * (1 - rho) + (p[i] * rho if i == j else 0) for j in range(d)] for i in range(d)]


def contingency_marginal_law(N: int, p: Sequence, rho) -> MarginalLaw:
    """Distribution of (X, Y) after N independent drops into the d x d table.

    Built by convolving one drop at a time.  A rho outside the
    non-negativity range still yields a table (the signed measure), but
    ``valid`` is False.
    """
    cells = cell_probabilities(p, rho)
    d = len(cells)
    min_cell = min(min(r) for r in cells)
    zero = (0,) * d
    law = {(zero, zero): Fraction(1)}
    for _ in range(N):
        new: dict = {}
        for (x, y), w in law.items():
            for i in range(d):
                for j in range(d):
                    c = cells[i][j]
                    if c == 0:
                        continue
                    key = (_bump(x, i), _bump(y, j))
                    new[key] = new.get(key, 0) + w * c
        law = new
    return MarginalLaw(table=law, valid=min_cell >= 0, min_cell=min_cell)


def _bump(x: tuple, i: int) -> tuple:
    return x[:i] + (x[i] + 1,) + x[i + 1:]


def expectation(f, N: int, p: Sequence) -> Fraction:
    """E[f(X)] for X ~ Multinomial(N, p) by exact enumeration."""
    p = simplex(p)
    return sum((multinomial_pmf(x, p) * f(x) for x in enumerate_configurations(N, len(p))), Fraction(0))
