"""
Duplication (hypergroup) structure of the kernel polynomials.

For a second binomial parameter p_dup with q_dup = 1 - p_dup <= min_j p_j,

    K(x, y, z) = sum_n Q_n(z; N, p_dup) Q_n(x, y; N, p) >= 0

and phi_{x,y}(z) = C(N, z) p_dup^z q_dup^(N-z) K(x, y, z) is a probability
law on 0..N with

    Q_n(x, y; N, p) = h_n(p_dup) E_phi[Q_n(Z; N, p_dup)].

N - Z has the law of the number of thinned matches between two trial
sequences with counts x and y (see :func:`matching_simulate`).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exactnum import (
    binomial,
    multinomial_coeff,
    multinomial_pmf,
    poly_add,
    poly_mul,
    poly_pow,
    poly_trim,
    simplex,
    sub_configurations,
    to_fraction,
)
from .kernel import _check_pair, _ppow, kernel_all
from .krawtchouk import binomial_pmf, krawtchouk_all, krawtchouk_norm


class InadmissibleError(ValueError):
    pass


def is_admissible(p: Sequence, p_dup) -> bool:
    """1 - p_dup <= min_j p_j (boundary included)."""
    return 1 - to_fraction(p_dup) <= min(simplex(p))


def _require_admissible(p, p_dup):
    if not is_admissible(p, p_dup):
        q = 1 - to_fraction(p_dup)
        raise InadmissibleError(
            f"q_dup = 1 - p_dup = {q} exceeds min_j p_j = {min(simplex(p))}; "
            "need 1 - p_dup <= min_j p_j"
        )


def triple_sum_K(x, y, z: int, p, p_dup) -> Fraction:
    """K(x, y, z) = sum_n Q_n(z; N, p_dup) Q_n(x, y; N, p)."""
    N = sum(x)
    kern = kernel_all(x, y, p)
    kraw = krawtchouk_all(z, N, p_dup)
    return sum((a * b for a, b in zip(kern, kraw)), Fraction(0))


def triple_sum_table(x, y, p, p_dup) -> list[Fraction]:
    N = sum(x)
    kern = kernel_all(x, y, p)
    return [sum((a * b for a, b in zip(kern, krawtchouk_all(z, N, p_dup))), Fraction(0)) for z in range(N + 1)]


@dataclass
class MixingMeasure:
    masses: list  # Fractions indexed by z = 0..N

    @property
    def N(self) -> int:
        return len(self.masses) - 1

    def mean(self) -> Fraction:
        return sum((z * m for z, m in enumerate(self.masses)), Fraction(0))

    def expect(self, f) -> Fraction:
        return sum((f(z) * m for z, m in enumerate(self.masses)), Fraction(0))


def _signed_measure(x, y, p, p_dup) -> list[Fraction]:
    N = sum(x)
    return [binomial_pmf(z, N, p_dup) * k for z, k in enumerate(triple_sum_table(x, y, p, p_dup))]


def mixing_measure(x, y, p, p_dup) -> MixingMeasure:
    """phi_{x,y} built from the triple sum K."""
    _require_admissible(p, p_dup)
    return MixingMeasure(_signed_measure(x, y, p, p_dup))


def mixing_measure_explicit(x, y, p, p_dup) -> MixingMeasure:
    """phi_{x,y} from its direct inversion as a sum over shared counts z <= x, y."""
    _require_admissible(p, p_dup)
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    q = 1 - to_fraction(p_dup)
    N = sum(x)
    masses = [Fraction(0)] * (N + 1)
    for z in sub_configurations([min(a, b) for a, b in zip(x, y)]):
        k = sum(z)
        xz = tuple(a - b for a, b in zip(x, z))
        yz = tuple(a - b for a, b in zip(y, z))
        w = q ** k * multinomial_coeff(N, z) * _ppow(p, z)
        w *= multinomial_coeff(N - k, xz) * _ppow(p, xz) * multinomial_coeff(N - k, yz) * _ppow(p, yz)
        # (1 - psi)^k psi^(N-k): mass on chi = N - k + j is C(k, j) (-1)^j
        for j in range(k + 1):
            masses[N - k + j] += (-1) ** j * binomial(k, j) * w
    norm = multinomial_pmf(x, p) * multinomial_pmf(y, p)
    return MixingMeasure([m / norm for m in masses])


def duplication_identity(n: int, x, y, p, p_dup) -> tuple[Fraction, Fraction]:
    """(Q_n(x, y; N, p), h_n(p_dup) E_phi[Q_n(Z; N, p_dup)]); the two must agree."""
    phi = mixing_measure(x, y, p, p_dup)
    N = phi.N
    rhs = krawtchouk_norm(n, N, p_dup) * sum(
        (m * krawtchouk_all(z, N, p_dup)[n] for z, m in enumerate(phi.masses)), Fraction(0)
    )
    return kernel_all(x, y, p)[n], rhs


def triple_product_1d(x: int, y: int, z: int, N: int, r, s) -> Fraction:
    """sum_n h_n(s) Q_n(x; N, s) Q_n(y; N, s) Q_n(z; N, r)."""
    qx, qy = krawtchouk_all(x, N, s), krawtchouk_all(y, N, s)
    qz = krawtchouk_all(z, N, r)
    return sum((krawtchouk_norm(n, N, s) * qx[n] * qy[n] * qz[n] for n in range(N + 1)), Fraction(0))


def triple_product_admissible(r, s) -> bool:
    r, s = to_fraction(r), to_fraction(s)
    return 1 - r <= min(s, 1 - s)


# matching interpretation

def match_probability(rr: int, x, y, p, q) -> Fraction:
    """P(a given set of rr trial positions all lie in the thinned match set), given counts x, y."""
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    q = to_fraction(q)
    N = sum(x)
    total = Fraction(0)
    for z in sub_configurations([min(a, b) for a, b in zip(x, y)]):
        if sum(z) != rr:
            continue
        xz = tuple(a - b for a, b in zip(x, z))
        yz = tuple(a - b for a, b in zip(y, z))
        w = q ** rr * multinomial_coeff(rr, z) * _ppow(p, z)
        w *= multinomial_coeff(N - rr, xz) * _ppow(p, xz) * multinomial_coeff(N - rr, yz) * _ppow(p, yz)
        total += w
    return total / (multinomial_pmf(x, p) * multinomial_pmf(y, p))


def thinned_match_pgf(x, y, p, q) -> list[Fraction]:
    """pgf of |R| in psi by inclusion-exclusion over joint match probabilities."""
    N = sum(x)
    out: list = []
    for r in range(N + 1):
        coef = binomial(N, r) * (-1) ** r * match_probability(r, x, y, p, q)
        out = poly_add(out, [coef * c for c in poly_pow([Fraction(1), Fraction(-1)], r)])
    return poly_trim(out)


def transform_pgf(x, y, p, q) -> list[Fraction]:
    """pgf of N - Z in psi, sum_n (q(psi - 1))^n (p_dup + q psi)^(N-n) Q_n(x, y)."""
    q = to_fraction(q)
    pd = 1 - q
    N = sum(x)
    out: list = []
    for n, Qn in enumerate(kernel_all(x, y, p)):
        term = poly_mul(poly_pow([-q, q], n), poly_pow([pd, q], N - n))
        out = poly_add(out, [Qn * c for c in term])
    return poly_trim(out)


def match_binomial_moment(rr: int, x, y, p, q) -> Fraction:
    """E[C(|R|, rr)] = C(N, rr) * P(rr given positions all matched and kept)."""
    return binomial(sum(x), rr) * match_probability(rr, x, y, p, q)


def matching_simulate(x, y, p, q, replicates: int, seed: int = 0, chunks: int = 1) -> np.ndarray:
    """Empirical law of Z = N - |R| over 0..N.

    The first sequence is a fixed realisation of the counts x, the second
    a uniformly shuffled realisation of y.  Each matched pair of colour k
    is kept with probability q / p_k.  Work is split into ``chunks``
    independent streams spawned from ``seed``; counts are merged by
    integer addition.
    """
    if replicates <= 0:
        raise ValueError("replicates must be positive")
    _require_admissible(p, 1 - to_fraction(q))
    p = simplex(p)
    x, y = _check_pair(x, y, p)
    N = sum(x)
    tau = np.array([float(to_fraction(q) / pj) for pj in p])
    xi = np.repeat(np.arange(len(p)), x)
    eta0 = np.repeat(np.arange(len(p)), y)
    counts = np.zeros(N + 1, dtype=np.int64)
    sizes = [replicates // chunks + (i < replicates % chunks) for i in range(chunks)]
    for ss, size in zip(np.random.SeedSequence(seed).spawn(chunks), sizes):
        if size == 0:
            continue
        rng = np.random.default_rng(ss)
        perm = rng.random((size, N)).argsort(axis=1)
        eta = eta0[perm]
        matched = eta == xi
        kept = rng.random((size, N)) < tau[xi]
        R = (matched & kept).sum(axis=1)
        counts += np.bincount(N - R, minlength=N + 1)
    return counts / replicates
