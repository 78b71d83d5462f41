"""
Exact identity suites, shared by the ``verify`` subcommand and the tests.

Every check is an exhaustive scan over a small grid and compares exact
rationals with ``==``.  A check returns a :class:`Check` carrying a short
name, a one-line description of the identity and a pass flag.
"""
from __future__ import annotations

import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

from . import chain, duplication, gof, kernel, krawtchouk, mvk
from .exactnum import binomial, enumerate_configurations, multinomial_pmf, simplex, to_fraction

DEFAULT_P = {2: (Fraction(2, 5), Fraction(3, 5)), 3: (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))}


@dataclass
class Check:
    suite: str
    name: str
    description: str
    passed: bool
    detail: str = ""
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        extra = f" [{self.detail}]" if self.detail else ""
        return f"{flag}  {self.suite}.{self.name}: {self.description}{extra} ({self.seconds:.2f}s)"


def _run(suite: str, name: str, description: str, fn: Callable[[], tuple[bool, str]]) -> Check:
    t0 = time.perf_counter()
    try:
        ok, detail = fn()
    except Exception as exc:  # a crash is a failed identity, not a crashed run
        ok, detail = False, f"{type(exc).__name__}: {exc}"
    return Check(suite, name, description, ok, detail, time.perf_counter() - t0)


def _grids(max_N: int, max_d: int):
    for d in range(2, max_d + 1):
        p = DEFAULT_P.get(d) or tuple(Fraction(1, d) for _ in range(d))
        for N in range(1, max_N + 1):
            yield N, p


def _count_bad(pairs) -> tuple[bool, str]:
    bad = sum(1 for a, b in pairs if a != b)
    return bad == 0, f"{bad} mismatches" if bad else ""


# univariate

def suite_krawtchouk(max_N: int = 6, **_) -> list[Check]:
    ps = [Fraction(1, 2), Fraction(1, 3), Fraction(3, 5)]

    def orth():
        pairs = []
        for N in range(1, max_N + 1):
            for p in ps:
                Q = [krawtchouk.krawtchouk_all(x, N, p) for x in range(N + 1)]
                w = [krawtchouk.binomial_pmf(x, N, p) for x in range(N + 1)]
                for m in range(N + 1):
                    for n in range(N + 1):
                        lhs = sum(w[x] * Q[x][m] * Q[x][n] for x in range(N + 1))
                        rhs = 1 / krawtchouk.krawtchouk_norm(n, N, p) if m == n else 0
                        pairs.append((lhs, rhs))
        return _count_bad(pairs)

    def gf():
        pairs = []
        for N in range(1, max_N + 1):
            for p in ps:
                for x in range(N + 1):
                    co = krawtchouk.krawtchouk_gf(x, N, p)
                    pairs += [(co[n], binomial(N, n) * krawtchouk.krawtchouk(n, x, N, p)) for n in range(N + 1)]
        return _count_bad(pairs)

    def transform():
        pairs = []
        for N in range(1, max_N + 1):
            for p in ps:
                for psi in (Fraction(0), Fraction(1, 2), Fraction(1), Fraction(2)):
                    for n in range(N + 1):
                        brute = sum(krawtchouk.binomial_pmf(x, N, p) * psi ** x * krawtchouk.krawtchouk(n, x, N, p)
                                    for x in range(N + 1))
                        pairs.append((brute, krawtchouk.krawtchouk_transform(n, psi, N, p)))
        return _count_bad(pairs)

    return [
        _run("krawtchouk", "orthogonality", "binomial-weighted orthogonality with squared norms 1/h_n", orth),
        _run("krawtchouk", "generating_function", "t^n coefficient of the generating function is C(N,n) Q_n", gf),
        _run("krawtchouk", "transform", "closed-form transform equals the brute-force expectation", transform),
    ]


# multivariate

def suite_mvk(max_N: int = 4, max_d: int = 3, **_) -> list[Check]:
    def orth():
        pairs = []
        for N, p in _grids(max_N, max_d):
            basis = mvk.build_helmert_basis(p)
            states = enumerate_configurations(N, len(p))
            vals = {x: mvk.mvk_all(x, basis) for x in states}
            idx = mvk.multi_indices(N, len(p) - 1)
            for a, m in enumerate(idx):
                for n in idx[a:]:
                    lhs = sum(multinomial_pmf(x, p) * vals[x][m] * vals[x][n] for x in states)
                    rhs = basis.scale(n) * mvk.mvk_norm(n, N) if m == n else 0
                    pairs.append((lhs, rhs))
        return _count_bad(pairs)

    def transform():
        pairs = []
        for N, p in _grids(max_N, max_d):
            basis = mvk.build_helmert_basis(p)
            d = len(p)
            s = [Fraction(1), Fraction(1, 2), Fraction(0)][:d]
            for n in mvk.multi_indices(N, d - 1):
                brute = mvk.expectation(
                    lambda x: mvk.mvk_eval(n, x, basis) * _prod_pow(s, x), N, p)
                pairs.append((brute, mvk.mvk_transform(n, s, N, basis)))
        return _count_bad(pairs)

    def marginal():
        pairs = []
        for N, p in _grids(min(max_N, 3), max_d):
            for rho in (Fraction(0), Fraction(1, 2), Fraction(1)):
                law = mvk.contingency_marginal_law(N, p, rho).table
                for (x, y), w in law.items():
                    pairs.append((w, multinomial_pmf(x, p) * multinomial_pmf(y, p)
                                  * kernel.poisson_kernel_lhs(rho, x, y, p)))
        return _count_bad(pairs)

    return [
        _run("mvk", "orthogonality", "multinomial orthogonality with squared norm N!/(n! (N-|n|)!)", orth),
        _run("mvk", "transform", "closed-form transform equals the brute-force expectation", transform),
        _run("mvk", "marginal_law", "marginal-count law of the equal-correlation table equals m(x)m(y)(Poisson kernel)", marginal),
    ]


def _prod_pow(s, x) -> Fraction:
    out = Fraction(1)
    for a, k in zip(s, x):
        out *= a ** k
    return out


# kernel

def suite_kernel(max_N: int = 4, max_d: int = 3, **_) -> list[Check]:
    def forms():
        pairs = []
        for N, p in _grids(max_N, max_d):
            states = enumerate_configurations(N, len(p))
            for x in states:
                for y in states:
                    for n in range(1, N + 1):
                        q = kernel.kernel_eval(n, x, y, p)
                        pairs.append((q, kernel.kernel_eval_centered(n, x, y, p)))
                        pairs.append((q, kernel.kernel_eval_hypergeom(n, x, y, p)))
        return _count_bad(pairs)

    def recursion():
        pairs = []
        for N, p in _grids(max_N, max_d):
            if N < 2:
                continue
            states = enumerate_configurations(N, len(p))
            for x in states:
                for y in states:
                    for n in range(1, N + 1):
                        pairs.append((kernel.kernel_eval(n, x, y, p), kernel.kernel_recursion(n, x, y, p)))
        return _count_bad(pairs)

    def delta():
        pairs = []
        for N, p in _grids(max_N, max_d):
            states = enumerate_configurations(N, len(p))
            for x in states:
                for y in states:
                    target = 1 / multinomial_pmf(y, p) if x == y else 0
                    pairs.append((sum(kernel.kernel_all(x, y, p)), target))
        return _count_bad(pairs)

    def reproducing():
        pairs = []
        for N, p in _grids(min(max_N, 3), max_d):
            states = enumerate_configurations(N, len(p))
            m = {y: multinomial_pmf(y, p) for y in states}
            for x in states:
                for x2 in states:
                    for a in range(N + 1):
                        for b in range(N + 1):
                            lhs = sum(m[y] * kernel.kernel_all(x, y, p)[a] * kernel.kernel_all(y, x2, p)[b]
                                      for y in states)
                            pairs.append((lhs, kernel.kernel_all(x, x2, p)[a] if a == b else 0))
        return _count_bad(pairs)

    def basis_free():
        pairs = []
        for N, p in _grids(max_N, max_d):
            d = len(p)
            if d < 3:
                continue
            bases = [mvk.build_helmert_basis(p), mvk.build_helmert_basis(p, order=[d - 1, 0])]
            states = enumerate_configurations(N, d)
            for basis in bases:
                vals = {x: mvk.mvk_all(x, basis) for x in states}
                for x in states:
                    for y in states:
                        for n in range(N + 1):
                            s = sum(vals[x][k] * vals[y][k] / (basis.scale(k) * mvk.mvk_norm(k, N))
                                    for k in mvk.multi_indices(N, d - 1, exact_total=n))
                            pairs.append((s, kernel.kernel_all(x, y, p)[n]))
        return _count_bad(pairs)

    def permutation():
        pairs = []
        for N, p in _grids(min(max_N, 3), max_d):
            d = len(p)
            states = enumerate_configurations(N, d)
            for sigma in permutations(range(d)):
                ps = tuple(p[i] for i in sigma)
                for x in states:
                    for y in states:
                        xs = tuple(x[i] for i in sigma)
                        ys = tuple(y[i] for i in sigma)
                        pairs.append((kernel.kernel_all(xs, ys, ps), kernel.kernel_all(x, y, p)))
        return _count_bad(pairs)

    def poisson():
        pairs = []
        for N, p in _grids(min(max_N, 3), max_d):
            states = enumerate_configurations(N, len(p))
            for rho in (Fraction(-1, 3), Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1)):
                for x in states:
                    for y in states:
                        pairs.append((kernel.poisson_kernel_lhs(rho, x, y, p), kernel.poisson_kernel_rhs(rho, x, y, p)))
        return _count_bad(pairs)

    def bound():
        bad = 0
        for N, p in _grids(max_N, max_d):
            states = enumerate_configurations(N, len(p))
            for n in range(N + 1):
                b = kernel.kernel_bound(n, N, p)
                worst = max(abs(kernel.kernel_all(x, y, p)[n]) for x in states for y in states)
                bad += worst != b
        return bad == 0, f"{bad} grids where the maximum differs from the bound" if bad else ""

    return [
        _run("kernel", "three_forms", "explicit, centred and sub-sampling forms agree", forms),
        _run("kernel", "recursion_in_N", "recursion from N-1 to N reproduces every kernel", recursion),
        _run("kernel", "delta_sum", "sum over n of Q_n(x,y) is delta_xy / m(y)", delta),
        _run("kernel", "reproducing", "sum_y m(y) Q_a(x,y) Q_b(y,x') = delta_ab Q_a(x,x')", reproducing),
        _run("kernel", "basis_independence", "two Gram-Schmidt bases give the same kernel", basis_free),
        _run("kernel", "permutation", "kernel invariant under a common permutation of x, y, p", permutation),
        _run("kernel", "poisson_kernel", "1 + sum rho^n Q_n equals the shared-count probability form", poisson),
        _run("kernel", "tight_bound", "max |Q_n| equals C(N,n)(1/min p - 1)^n", bound),
    ]


# duplication

def suite_duplication(max_N: int = 3, p=None, boundary: bool = False, **_) -> list[Check]:
    p = simplex(p) if p is not None else DEFAULT_P[3]
    pmin = min(p)
    N = max_N
    states = enumerate_configurations(N, len(p))
    admissible_pd = 1 - pmin + Fraction(1, 20)

    def routes():
        pairs = []
        for x in states:
            for y in states:
                a = duplication.mixing_measure(x, y, p, admissible_pd).masses
                b = duplication.mixing_measure_explicit(x, y, p, admissible_pd).masses
                pairs.append((a, b))
        return _count_bad(pairs)

    def identity():
        pairs = []
        for x in states:
            for y in states:
                for n in range(N + 1):
                    pairs.append(duplication.duplication_identity(n, x, y, p, admissible_pd))
        return _count_bad(pairs)

    def pgf():
        pairs = []
        q = 1 - admissible_pd
        for n_ in range(1, min(N, 4) + 1):
            for x in enumerate_configurations(n_, len(p)):
                for y in enumerate_configurations(n_, len(p)):
                    pairs.append((duplication.thinned_match_pgf(x, y, p, q), duplication.transform_pgf(x, y, p, q)))
        return _count_bad(pairs)

    checks = [
        _run("duplication", "two_routes", "mixing measure from K equals the direct inversion", routes),
        _run("duplication", "identity", "Q_n(x,y) = h_n(p_dup) E_phi[Q_n(Z; N, p_dup)]", identity),
        _run("duplication", "match_pgf", "inclusion-exclusion pgf of the thinned matches equals the transform pgf", pgf),
    ]
    if boundary:
        checks += boundary_checks(N, p)
    return checks


def boundary_checks(N: int, p, step=Fraction(1, 50)) -> list[Check]:
    """K >= 0 exactly at 1 - p_dup = min p and somewhere negative just beyond."""
    p = simplex(p)
    states = enumerate_configurations(N, len(p))
    edge = 1 - min(p)

    def min_K(pd):
        return min(duplication.triple_sum_K(x, y, z, p, pd) for x in states for y in states for z in range(N + 1))

    def at_edge():
        m = min_K(edge)
        return m >= 0, f"min K = {m} at p_dup = {edge}"

    def beyond():
        m = min_K(edge - step)
        return m < 0, f"min K = {m} at p_dup = {edge - step}"

    def inside():
        m = min_K(min(Fraction(1), edge + step))
        return m >= 0, f"min K = {m} at p_dup = {min(Fraction(1), edge + step)}"

    def triple():
        bad = []
        for sv in (Fraction(2, 5), Fraction(1, 2)):
            r_edge = 1 - min(sv, 1 - sv)
            lo = min(duplication.triple_product_1d(a, b, c, 4, r_edge, sv)
                     for a in range(5) for b in range(5) for c in range(5))
            lo2 = min(duplication.triple_product_1d(a, b, c, 4, r_edge - step, sv)
                      for a in range(5) for b in range(5) for c in range(5))
            if not (lo >= 0 and lo2 < 0):
                bad.append(str(sv))
        return not bad, f"failed for s = {', '.join(bad)}" if bad else ""

    return [
        _run("duplication", "boundary_nonnegative", "K >= 0 on the full grid at 1 - p_dup = min p", at_edge),
        _run("duplication", "boundary_negative", "K has a negative entry once 1 - p_dup exceeds min p", beyond),
        _run("duplication", "interior_nonnegative", "K >= 0 strictly inside the admissible range", inside),
        _run("duplication", "triple_product_boundary", "1-d triple product sum is non-negative exactly when 1 - r <= min(s, 1-s)", triple),
    ]


# goodness of fit

def suite_gof(max_N: int = 4, max_d: int = 3, **_) -> list[Check]:
    import numpy as np

    rng = np.random.default_rng(20240601)

    def decomposition():
        bad = 0
        for N, p in _grids(max_N, max_d):
            pf = [float(v) for v in p]
            sample = [tuple(int(v) for v in row) for row in rng.multinomial(N, pf, size=25)]
            comps, _, r = gof._exact_components(sample, p)
            bad += sum(comps[1:], Fraction(0)) != gof._configuration_chi_squared(sample, p)
        return bad == 0, f"{bad} samples" if bad else ""

    def df_sum():
        bad = sum(
            sum(gof.degrees_of_freedom(i, d) for i in range(1, N + 1)) != binomial(N + d - 1, d - 1) - 1
            for N in range(1, 21) for d in range(2, 7)
        )
        return bad == 0, ""

    def subsample():
        bad = 0
        for N, p in _grids(min(max_N, 3), max_d):
            pf = [float(v) for v in p]
            sample = [tuple(int(v) for v in row) for row in rng.multinomial(N, pf, size=20)]
            for i in range(1, N + 1):
                a, b = gof.component_stat(i, sample, p), gof.subsample_form_stat(i, sample, p)
                bad += abs(a - b) > 1e-10 * max(1.0, abs(a))
        return bad == 0, f"{bad} mismatches" if bad else ""

    return [
        _run("gof", "decomposition", "components add up to the configuration-space Pearson statistic", decomposition),
        _run("gof", "df_bookkeeping", "sum_i C(i+d-2, d-2) = C(N+d-1, d-1) - 1", df_sum),
        _run("gof", "subsample_form", "sub-sampling form equals the kernel double sum", subsample),
    ]


# urn chains

def suite_chain(max_N: int = 3, max_d: int = 3, **_) -> list[Check]:
    specs = []
    for N, p in _grids(max_N, max_d):
        for z in sorted({1, min(2, N), N}):
            for pd in (Fraction(1), 1 - min(p)):
                specs.append(chain.UrnChainSpec(N, p, z, pd))

    def mech():
        return _count_bad((chain.transition_matrix(s), chain.transition_matrix_spectral(s)) for s in specs)

    def stationary():
        bad = 0
        for s in specs:
            P = chain.transition_matrix(s)
            m = chain.stationary(s)
            bad += chain._vec_mat(m, P) != m
            n = len(m)
            bad += any(m[i] * P[i][j] != m[j] * P[j][i] for i in range(n) for j in range(n))
        return bad == 0, f"{bad} failures" if bad else ""

    def eigenfunction():
        pairs = []
        for s in specs:
            P = chain.transition_matrix(s)
            states = enumerate_configurations(s.N, s.d)
            for w in states:
                for a, x in enumerate(states):
                    for n in range(s.N + 1):
                        lhs = sum(P[a][b] * kernel.kernel_all(y, w, s.p)[n] for b, y in enumerate(states))
                        pairs.append((lhs, s.eigenvalues[n] * kernel.kernel_all(x, w, s.p)[n]))
        return _count_bad(pairs)

    def spectrum():
        devs = [chain.eigenstructure_check(s).max_deviation for s in specs]
        return max(devs) <= 1e-8, f"max deviation {max(devs):.1e}"

    def lumping():
        bad = 0
        for s in specs:
            if s.z != 1:
                continue
            P = chain.transition_matrix(s)
            states = enumerate_configurations(s.N, s.d)
            L = chain.LumpedChain(s.N, s.p[0], s.p_dup).matrix()
            for a, x in enumerate(states):
                row = [Fraction(0)] * (s.N + 1)
                for b, y in enumerate(states):
                    row[y[0]] += P[a][b]
                bad += row != L[x[0]]
        return bad == 0, f"{bad} rows" if bad else ""

    return [
        _run("chain", "mechanism_vs_spectral", "urn mechanism matrix equals m(y) sum_n rho_n Q_n(x,y)", mech),
        _run("chain", "stationary_reversible", "multinomial is stationary and detailed balance holds", stationary),
        _run("chain", "kernel_eigenfunctions", "P applied to Q_n(., w) multiplies it by rho_n", eigenfunction),
        _run("chain", "spectrum", "eigenvalues rho_n with multiplicity C(n+d-2, d-2)", spectrum),
        _run("chain", "lumping", "colour-1 count is the birth-death chain with rates alpha, beta", lumping),
    ]


def suite_lancaster(N: int = 3, p=None, rho: Sequence | None = None, z: int = 1, p_dup=None, **_) -> list[Check]:
    """Non-negativity of m(x)m(y)(1 + sum rho_n Q_n(x,y)) for one sequence rho.

    Without ``rho`` the extreme sequence rho_n = Q_n(z; N, p_dup) is used.
    The check passes when the scan completes; the detail reports the
    minimum entry and whether the joint law is a probability law.
    """
    p = simplex(p) if p is not None else DEFAULT_P[3]
    if rho is None:
        pd = to_fraction(p_dup) if p_dup is not None else Fraction(1)
        rho = krawtchouk.krawtchouk_all(z, N, pd)[1:]
    rho = [to_fraction(r) for r in rho]

    def scan():
        m = chain.lancaster_min_entry(rho, N, p)
        nu = chain.lancaster_representing_law(rho, N, p)
        status = "non-negative" if m >= 0 else "NEGATIVE"
        return True, f"min entry {m} ({status}); representing law min {min(nu)}"

    return [_run("lancaster", "nonnegativity_scan", "minimum entry of the Lancaster joint law", scan)]


SUITES = {
    "krawtchouk": suite_krawtchouk,
    "mvk": suite_mvk,
    "kernel": suite_kernel,
    "duplication": suite_duplication,
    "gof": suite_gof,
    "chain": suite_chain,
    "lancaster": suite_lancaster,
}


def run_suites(names: Sequence[str] | None = None, **options) -> list[Check]:
    names = list(names) if names else [n for n in SUITES if n != "lancaster"]
    out: list[Check] = []
    for name in names:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
        out += SUITES[name](**options)
    return out
