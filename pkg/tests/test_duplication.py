from fractions import Fraction
from itertools import permutations
from math import comb

import numpy as np
import pytest

from krawkernel.duplication import (
    InadmissibleError,
    duplication_identity,
    is_admissible,
    match_binomial_moment,
    matching_simulate,
    mixing_measure,
    mixing_measure_explicit,
    thinned_match_pgf,
    transform_pgf,
    triple_product_1d,
    triple_product_admissible,
    triple_sum_K,
)
from krawkernel.exactnum import enumerate_configurations
from krawkernel.kernel import kernel_all
from krawkernel.krawtchouk import krawtchouk, krawtchouk_norm

from conftest import P3

GRID3 = enumerate_configurations(3, 3)


def _min_K(p, pd, N=3):
    grid = enumerate_configurations(N, len(p))
    return min(triple_sum_K(x, y, z, p, pd) for x in grid for y in grid for z in range(N + 1))


def test_K_diagonal_at_zero_is_positive():
    for x in GRID3:
        assert triple_sum_K(x, x, 0, P3, Fraction(4, 5)) > 0


@pytest.mark.parametrize("pd,nonneg", [
    (Fraction(4, 5), True),
    (Fraction(3, 4), True),
    (Fraction(3, 4) + Fraction(1, 50), True),
    (Fraction(3, 4) - Fraction(1, 50), False),
    (Fraction(7, 10), False),
])
def test_admissibility_iff(pd, nonneg):
    assert is_admissible(P3, pd) == nonneg
    assert (_min_K(P3, pd) >= 0) == nonneg


def test_inadmissible_rejected_with_diagnostic():
    with pytest.raises(InadmissibleError, match="min_j p_j = 1/4"):
        mixing_measure((3, 0, 0), (0, 3, 0), P3, Fraction(7, 10))


def test_measures_are_probability_laws_and_routes_agree():
    for N in range(1, 5):
        grid = enumerate_configurations(N, 3)
        for pd in (Fraction(3, 4), Fraction(4, 5), Fraction(1)):
            for x in grid:
                for y in grid:
                    phi = mixing_measure(x, y, P3, pd)
                    assert sum(phi.masses) == 1 and min(phi.masses) >= 0
                    assert phi.masses == mixing_measure_explicit(x, y, P3, pd).masses
                    # E[Z] = N p_dup - q Q_1(x, y)
                    assert phi.mean() == N * pd - (1 - pd) * kernel_all(x, y, P3)[1]


def test_two_cell_case_is_eagleson():
    s = Fraction(3, 5)
    p = (s, 1 - s)
    N = 4
    for a in range(N + 1):
        for b in range(N + 1):
            phi = mixing_measure((a, N - a), (b, N - b), p, s)
            for n in range(N + 1):
                assert krawtchouk(n, a, N, s) * krawtchouk(n, b, N, s) == phi.expect(lambda z: krawtchouk(n, z, N, s))


def test_duplication_identity_grid():
    pd = Fraction(4, 5)
    for x in GRID3:
        for y in GRID3:
            assert duplication_identity(0, x, y, P3, pd) == (1, 1)
            for n in range(4):
                lhs, rhs = duplication_identity(n, x, y, P3, pd)
                assert lhs == rhs
                assert abs(lhs) <= krawtchouk_norm(n, 3, pd)


def test_triple_product_boundary():
    s = Fraction(2, 5)
    r = 1 - min(s, 1 - s)
    assert triple_product_admissible(r, s) and not triple_product_admissible(r - Fraction(1, 50), s)
    rng = range(5)
    assert min(triple_product_1d(a, b, c, 4, r, s) for a in rng for b in rng for c in rng) >= 0
    assert min(triple_product_1d(a, b, c, 4, r - Fraction(1, 50), s) for a in rng for b in rng for c in rng) < 0


@pytest.mark.parametrize("s", [Fraction(1, 2), Fraction(3, 5), Fraction(4, 5)])
def test_triple_product_equal_parameters(s):
    rng = range(5)
    assert min(triple_product_1d(a, b, c, 4, s, s) for a in rng for b in rng for c in rng) >= 0


# matching interpretation, checked against exhaustive permutation enumeration

def _thin_step(dist, keep):
    out = [Fraction(0)] * (len(dist) + 1)
    for k, v in enumerate(dist):
        out[k] += v * (1 - keep)
        out[k + 1] += v * keep
    return out


def _match_law(x, y, p, q):
    """Exact law of |R|, averaging over every ordering of the second sequence."""
    d = len(p)
    xi = [j for j in range(d) for _ in range(x[j])]
    eta = [j for j in range(d) for _ in range(y[j])]
    N = len(xi)
    law = [Fraction(0)] * (N + 1)
    perms = list(permutations(eta))
    for perm in perms:
        dist = [Fraction(1)]
        for a, b in zip(xi, perm):
            if a == b:
                dist = _thin_step(dist, q / p[a])
        for k, v in enumerate(dist):
            law[k] += v
    return [v / len(perms) for v in law]


@pytest.mark.parametrize("x,y", [((2, 1, 1), (1, 2, 1)), ((3, 1, 0), (2, 1, 1)), ((2, 2, 0), (2, 2, 0))])
def test_matches_have_law_of_N_minus_Z(x, y):
    q = Fraction(1, 4)
    law = _match_law(x, y, P3, q)
    phi = mixing_measure(x, y, P3, 1 - q).masses
    N = sum(x)
    assert [phi[N - r] for r in range(N + 1)] == law
    for r in range(N + 1):
        assert match_binomial_moment(r, x, y, P3, q) == sum(comb(k, r) * law[k] for k in range(N + 1))


def test_uniform_case_has_no_thinning():
    p = (Fraction(1, 3),) * 3
    x, y = (2, 1, 1), (1, 1, 2)
    raw = [Fraction(0)] * 5
    perms = list(permutations([j for j in range(3) for _ in range(y[j])]))
    xi = [j for j in range(3) for _ in range(x[j])]
    for perm in perms:
        raw[sum(a == b for a, b in zip(xi, perm))] += Fraction(1, len(perms))
    phi = mixing_measure(x, y, p, Fraction(2, 3)).masses
    assert [phi[4 - r] for r in range(5)] == raw


def test_pgf_routes_agree():
    q = Fraction(1, 4)
    for N in range(1, 5):
        grid = enumerate_configurations(N, 3)
        for x in grid:
            for y in grid:
                assert thinned_match_pgf(x, y, P3, q) == transform_pgf(x, y, P3, q)


def test_simulation_is_seeded_and_close():
    x, y, q = (3, 2, 1), (2, 2, 2), Fraction(1, 4)
    a = matching_simulate(x, y, P3, q, 20_000, seed=11, chunks=3)
    b = matching_simulate(x, y, P3, q, 20_000, seed=11, chunks=3)
    assert np.array_equal(a, b)
    exact = np.array([float(v) for v in mixing_measure(x, y, P3, 1 - q).masses])
    assert 0.5 * np.abs(a - exact).sum() < 0.02


def test_simulated_binomial_moments_within_three_se():
    x, y, q = (2, 2, 1), (1, 2, 2), Fraction(1, 4)
    reps = 40_000
    emp = matching_simulate(x, y, P3, q, reps, seed=3)
    N = sum(x)
    R = np.arange(N, -1, -1)  # index z -> |R| = N - z
    for r in range(1, 4):
        vals = np.array([comb(int(k), r) for k in R], dtype=float)
        mean = float((emp * vals).sum())
        sd = float(np.sqrt((emp * vals ** 2).sum() - mean ** 2))
        exact = float(match_binomial_moment(r, x, y, P3, q))
        assert abs(mean - exact) <= 3 * sd / np.sqrt(reps) + 1e-12


def test_simulation_argument_errors():
    with pytest.raises(ValueError):
        matching_simulate((1, 1, 1), (1, 1, 1), P3, Fraction(1, 4), 0)
    with pytest.raises(InadmissibleError):
        matching_simulate((1, 1, 1), (1, 1, 1), P3, Fraction(1, 3), 10)
