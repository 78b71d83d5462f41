"""
Acceptance suite: twelve end-to-end criteria at their stated tolerances
and time limits.

Each test records one ``PASS``/``FAIL`` line; pytest prints them in an
"acceptance criteria" section at the end of the run.  Run directly
(``python tests/test_acceptance.py``) for the twelve lines without pytest.
"""
from __future__ import annotations

import math
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

from krawkernel import chain, duplication, gof, kernel, mvk
from krawkernel.chain import LumpedChain, UrnChainSpec
from krawkernel.exactnum import enumerate_configurations, multinomial_pmf
from krawkernel.kernel import kernel_all
from krawkernel.krawtchouk import krawtchouk_all

P = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
DEFAULT_P = {2: (Fraction(2, 5), Fraction(3, 5)), 3: P}

_results: dict[int, str] = {}


def _criterion(number: int, title: str, limit: float):
    """Time the body, assert the time limit, print one status line."""

    def wrap(body):
        def run():
            t0 = time.perf_counter()
            status, note = "FAIL", ""
            try:
                note = body() or ""
                elapsed = time.perf_counter() - t0
                if elapsed >= limit:
                    raise AssertionError(f"took {elapsed:.1f}s, limit {limit:.0f}s")
                status = "PASS"
            except AssertionError as exc:
                note = str(exc).splitlines()[0] if str(exc) else "assertion failed"
                raise
            finally:
                elapsed = time.perf_counter() - t0
                line = f"{status}  criterion {number:2d}: {title} ({elapsed:.1f}s) {note}".rstrip()
                _results[number] = line
                if __name__ == "__main__":
                    print(line, flush=True)

        run.__name__ = body.__name__
        run.__doc__ = body.__doc__
        return run

    return wrap


def _grid(max_N, max_d):
    for d in range(2, max_d + 1):
        for N in range(1, max_N + 1):
            yield N, DEFAULT_P[d], enumerate_configurations(N, d)


def _full_grid_min(fn):
    states = enumerate_configurations(3, 3)
    return min(fn(x, y) for x in states for y in states)


@_criterion(1, "Poisson kernel equals shared-draw bivariate law", 10)
def test_poisson_kernel_identity():
    states = enumerate_configurations(3, 3)
    for rho in (Fraction(-1, 3), Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
        for x in states:
            for y in states:
                assert kernel.poisson_kernel_lhs(rho, x, y, P) == kernel.poisson_kernel_rhs(rho, x, y, P), (rho, x, y)
    return f"{len(states) ** 2 * 5} exact pairs"


@_criterion(2, "Poisson kernel nonnegativity boundary at rho = -1/3", 10)
def test_poisson_kernel_boundary():
    at = _full_grid_min(lambda x, y: kernel.poisson_kernel_rhs(Fraction(-1, 3), x, y, P))
    past = _full_grid_min(lambda x, y: kernel.poisson_kernel_rhs(Fraction(-1, 3) - Fraction(1, 100), x, y, P))
    assert at >= 0, f"min {at} at rho = -1/3"
    assert past < 0, f"min {past} at rho = -1/3 - 1/100"
    return f"min {at} / {float(past):.3g}"


@_criterion(3, "orthogonality, reproducing property and delta sum", 30)
def test_orthogonality_reproducing_delta():
    checked = 0
    for N, p, states in _grid(4, 3):
        m = {x: multinomial_pmf(x, p) for x in states}
        K = {(x, y): kernel_all(x, y, p) for x in states for y in states}
        basis = mvk.build_helmert_basis(p)
        Q = {x: mvk.mvk_all(x, basis) for x in states}
        idx = mvk.multi_indices(N, len(p) - 1)
        for a in idx:
            for b in idx:
                lhs = sum(m[x] * Q[x][a] * Q[x][b] for x in states)
                rhs = basis.scale(a) * mvk.mvk_norm(a, N) if a == b else 0
                assert lhs == rhs, (N, p, a, b)
        for x in states:
            for y in states:
                assert sum(K[x, y]) == (1 / m[y] if x == y else 0), (x, y)
                for n in range(N + 1):
                    for k in range(N + 1):
                        rep = sum(m[z] * K[x, z][n] * K[z, y][k] for z in states)
                        assert rep == (K[x, y][n] if n == k else 0), (x, y, n, k)
                checked += 1
    return f"{checked} pairs"


@_criterion(4, "three kernel forms agree and the N-recursion holds", 30)
def test_kernel_forms_and_recursion():
    count = 0
    for N, p, states in _grid(4, 3):
        for x in states:
            for y in states:
                allv = kernel_all(x, y, p)
                for n in range(N + 1):
                    a = kernel.kernel_eval(n, x, y, p)
                    assert a == allv[n], (n, x, y)
                    # the alternative forms and the recursion start at degree 1; Q_0 = 1
                    if n >= 1:
                        assert kernel.kernel_eval_hypergeom(n, x, y, p) == a, (n, x, y)
                        assert kernel.kernel_eval_centered(n, x, y, p) == a, (n, x, y)
                        assert kernel.kernel_recursion(n, x, y, p) == a, (n, x, y)
                    count += 1
    return f"{count} values"


@_criterion(5, "duplication admissibility boundary and identity", 30)
def test_duplication_boundary_and_identity():
    states = enumerate_configurations(3, 3)
    z = range(4)
    at = min(duplication.triple_sum_K(x, y, k, P, Fraction(3, 4)) for x in states for y in states for k in z)
    past = min(duplication.triple_sum_K(x, y, k, P, Fraction(3, 4) - Fraction(1, 50)) for x in states for y in states for k in z)
    assert at >= 0, f"K min {at} at p_dup = 3/4"
    assert past < 0, f"K min {past} at p_dup = 3/4 - 1/50"
    for x in states:
        for y in states:
            for n in range(4):
                lhs, rhs = duplication.duplication_identity(n, x, y, P, Fraction(4, 5))
                assert lhs == rhs, (n, x, y)
    return f"K min {at} / {float(past):.3g}"


@_criterion(6, "thinned matches realise the mixing measure", 60)
def test_matching():
    q = Fraction(1, 4)
    worst = 0.0
    for x, y in [((3, 2, 1), (2, 2, 2)), ((6, 0, 0), (4, 1, 1)), ((2, 2, 2), (2, 2, 2))]:
        emp = duplication.matching_simulate(x, y, P, q, 100_000, seed=11)
        phi = duplication.mixing_measure(x, y, P, 1 - q).masses
        tv = 0.5 * sum(abs(e - float(f)) for e, f in zip(emp, phi))
        worst = max(worst, tv)
        assert tv < 0.01, (x, y, tv)
    for N, p, states in _grid(4, 3):
        for x in states:
            for y in states:
                assert duplication.thinned_match_pgf(x, y, p, q) == duplication.transform_pgf(x, y, p, q), (x, y)
    return f"worst TV {worst:.4f}"


@_criterion(7, "chi-squared components sum, dfs and null means", 120)
def test_gof_decomposition():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(100):
        N, d, r = int(rng.integers(1, 6)), int(rng.integers(2, 5)), int(rng.integers(2, 201))
        w = rng.integers(1, 6, size=d)
        p = tuple(Fraction(int(v), int(w.sum())) for v in w)
        sample = rng.multinomial(N, [float(v) for v in p], size=r).tolist()
        total = gof.total_chi_squared(sample, p)
        s = sum(gof.components(sample, p))
        worst = max(worst, abs(s - total) / max(abs(total), 1e-300))
    assert worst <= 1e-10, f"relative error {worst:.2e}"
    for d in range(2, 6):
        for N in range(1, 8):
            assert sum(gof.degrees_of_freedom(i, d) for i in range(1, N + 1)) == comb(N + d - 1, d - 1) - 1
    sims = np.array([gof.components(rng.multinomial(3, [0.5, 0.25, 0.25], size=2000).tolist(), P) for _ in range(500)])
    means, se = sims.mean(axis=0), sims.std(axis=0, ddof=1) / math.sqrt(500)
    for i in range(1, 4):
        assert abs(means[i - 1] - comb(i + 1, 1)) <= 3 * se[i - 1], (i, means[i - 1], se[i - 1])
    return f"sum rel err {worst:.1e}; null means {np.round(means, 2).tolist()}"


@_criterion(8, "chi-squared cutoff window at N = 100", 60)
def test_cutoff():
    spec = UrnChainSpec(100, P, 1)
    cells = []
    for c in (-3.0, 0.0, 3.0):
        b = chain.cutoff_bounds((100, 0, 0), c, spec)
        chi2 = chain.chi2_distance_spectral((100, 0, 0), b.l, spec)
        assert b.lower <= chi2 <= b.upper, (c, b, chi2)
        assert b.upper == pytest.approx(math.expm1(math.exp(-c)))
        cells.append(f"{b.lower:.3g}<={chi2:.3g}<={b.upper:.3g}")
    for N in range(1, 6):
        s = UrnChainSpec(N, P, 1)
        Pm = chain.transition_matrix(s)
        for x0 in enumerate_configurations(N, 3):
            for l in (0, 1, 3, 10, 40):
                a, b = chain.chi2_distance_spectral(x0, l, s), chain.chi2_distance_exact(x0, l, s, Pm)
                assert abs(a - b) <= 1e-9 * max(1.0, abs(b)), (N, x0, l, a, b)
    return "; ".join(cells)


@_criterion(9, "TV bound and l1/l2 disparity at p_i = 1/32", 60)
def test_tv_bound_and_disparity():
    spec = UrnChainSpec(5, P, 1)
    l = math.ceil(5 * (math.log(5) + 3))
    Pm = chain.transition_matrix(spec)
    worst = max(chain.tv_distance_exact(x0, l, spec, Pm) for x0 in enumerate_configurations(5, 3))
    assert worst <= math.exp(-3), f"TV {worst} at l = {l}"
    pi = Fraction(1, 32)
    ps = (pi, (1 - pi) / 2, (1 - pi) / 2)
    s = UrnChainSpec(5, ps, 1)
    Pm = chain.transition_matrix(s)
    x0 = (5, 0, 0)
    l_tv = next(k for k in range(200) if chain.tv_distance_exact(x0, k, s, Pm) <= 0.1)
    l_chi = next(k for k in range(200) if chain.chi2_distance_spectral(x0, k, s) <= 0.1)
    assert l_tv < l_chi, f"TV <= 0.1 first at l = {l_tv}, chi2 <= 0.1 first at l = {l_chi}; no strict gap"
    return f"TV {worst:.2e}; l_tv {l_tv} < l_chi2 {l_chi}"


@_criterion(10, "spectrum of the N = 3 urn chain", 10)
def test_spectrum():
    rep = chain.eigenstructure_check(UrnChainSpec(3, P, 1), tol=1e-8)
    assert rep.ok, rep
    ev = np.sort(rep.eigenvalues)[::-1]
    expected = np.repeat([1 - n / 3 for n in range(4)], [1, 2, 3, 4])
    assert np.max(np.abs(ev - expected)) <= 1e-8
    return f"max deviation {np.max(np.abs(ev - expected)):.1e}"


@_criterion(11, "product-Poisson limit of the kernels", 30)
def test_poisson_limit():
    mu = (Fraction(1), Fraction(2))
    x, y = (1, 0), (0, 1)

    def err(N):
        p = kernel.multinomial_from_means(mu, N)
        X, Y = kernel.embed_poisson(x, N), kernel.embed_poisson(y, N)
        K = kernel_all(X, Y, p)
        return max(abs(float(K[n] - kernel.poisson_limit_kernel(n, x, y, mu))) for n in range(4))

    e100, e400 = err(100), err(400)
    assert e400 * 2 <= e100, (e100, e400)
    return f"max err {e100:.3g} -> {e400:.3g}"


@_criterion(12, "lumped birth-death moments", 10)
def test_lumped_moments():
    L = LumpedChain(20, Fraction(1, 2))
    K = np.array([[float(v) for v in row] for row in L.matrix()])
    v = np.zeros(21)
    v[20] = 1.0
    xs = np.arange(21.0)
    worst = 0.0
    for l in range(51):
        mom = chain.lumped_moments(L, l)
        worst = max(worst, abs(mom.mean - v @ xs), abs(mom.second_moment - v @ xs ** 2))
        v = v @ K
    assert worst <= 1e-9, worst
    for N in range(1, 25):
        for pi in (Fraction(1, 2), Fraction(1, 7), Fraction(5, 6)):
            a, b, c = chain.square_in_krawtchouk(N, pi)
            assert a + b + c == 0 and a == pi ** 2 * N * (N - 1)
    return f"max moment error {worst:.1e}"


if __name__ == "__main__":
    tests = [v for k, v in list(globals().items()) if k.startswith("test_")]
    failed = 0
    for t in tests:
        try:
            t()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
