"""
Extreme-point Ehrenfest urn chains with multinomial stationary law.

An urn holds N balls of d colours.  One step picks z balls uniformly
without replacement; a picked ball of colour j turns into colour k != j
with probability p_k / p_dup and keeps colour j with probability
(p_j - q) / p_dup, where q = 1 - p_dup <= min_j p_j.

The transition law is m(y) sum_n rho_n Q_n(x, y; N, p) with
rho_n = Q_n(z; N, p_dup), each rho_n repeated C(n+d-2, d-2) times, so the
chi-squared distance from a start x0 after l steps is

    chi2_x0(l) = sum_{n >= 1} rho_n^(2 l) Q_n(x0, x0; N, p).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .exactnum import (
    binomial,
    enumerate_configurations,
    falling_factorial,
    multinomial_pmf,
    simplex,
    state_index,
    sub_configurations,
    to_fraction,
)
from .kernel import kernel_all
from .krawtchouk import krawtchouk_all, krawtchouk_norm, binomial_pmf

DEFAULT_STATE_CAP = 5000


class StateSpaceTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class UrnChainSpec:
    N: int
    p: tuple
    z: int = 1
    p_dup: Fraction = Fraction(1)

    def __post_init__(self):
        p = simplex(self.p)
        p_dup = to_fraction(self.p_dup)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "p_dup", p_dup)
        if self.N < 1:
            raise ValueError("N must be positive")
        if not 1 <= self.z <= self.N:
            raise ValueError(f"z = {self.z} must lie in 1..N = {self.N}")
        if not 0 < p_dup <= 1:
            raise ValueError("p_dup must lie in (0, 1]")
        if 1 - p_dup > min(p):
            raise ValueError(
                f"inadmissible: q = 1 - p_dup = {1 - p_dup} > min_j p_j = {min(p)}; "
                "need 1 - p_dup <= min_j p_j"
            )

    @property
    def d(self) -> int:
        return len(self.p)

    @property
    def q(self) -> Fraction:
        return 1 - self.p_dup

    @cached_property
    def eigenvalues(self) -> list[Fraction]:
        """rho_0..rho_N with rho_n = Q_n(z; N, p_dup)."""
        return krawtchouk_all(self.z, self.N, self.p_dup)

    def multiplicity(self, n: int) -> int:
        return binomial(n + self.d - 2, self.d - 2)

    @cached_property
    def recolour(self) -> list[list[Fraction]]:
        """Row j: law of the new colour of a picked ball of colour j."""
        p, pd, q = self.p, self.p_dup, self.q
        return [[(p[k] - q if k == j else p[k]) / pd for k in range(self.d)] for j in range(self.d)]

    @cached_property
    def recolour_cdf(self) -> np.ndarray:
        return np.cumsum(np.array([[float(v) for v in row] for row in self.recolour]), axis=1)

    def n_states(self) -> int:
        return binomial(self.N + self.d - 1, self.d - 1)


def _check_cap(spec: UrnChainSpec, cap: int):
    if spec.n_states() > cap:
        raise StateSpaceTooLarge(f"{spec.n_states()} states exceeds cap {cap}")


def _recolour_law(w: tuple, spec: UrnChainSpec) -> dict:
    # law of the colour counts of the picked balls after recolouring
    d = spec.d
    law = {(0,) * d: Fraction(1)}
    for j, wj in enumerate(w):
        row = spec.recolour[j]
        for _ in range(wj):
            new: dict = {}
            for c, pr in law.items():
                for k in range(d):
                    if row[k] == 0:
                        continue
                    key = c[:k] + (c[k] + 1,) + c[k + 1:]
                    new[key] = new.get(key, 0) + pr * row[k]
            law = new
    return law


def transition_matrix(spec: UrnChainSpec, cap: int = DEFAULT_STATE_CAP) -> list[list[Fraction]]:
    """Exact transition matrix from the urn mechanism.

    Rows and columns follow :func:`enumerate_configurations` order.
    """
    _check_cap(spec, cap)
    states = enumerate_configurations(spec.N, spec.d)
    index = state_index(spec.N, spec.d)
    laws: dict = {}
    P = []
    pick_norm = binomial(spec.N, spec.z)
    for x in states:
        row = [Fraction(0)] * len(states)
        for w in sub_configurations(x, spec.z):
            if sum(w) != spec.z:
                continue
            pick = Fraction(math.prod(binomial(a, b) for a, b in zip(x, w)), pick_norm)
            if w not in laws:
                laws[w] = _recolour_law(w, spec)
            for c, pr in laws[w].items():
                y = tuple(a - b + e for a, b, e in zip(x, w, c))
                row[index[y]] += pick * pr
        P.append(row)
    return P


def transition_matrix_spectral(spec: UrnChainSpec, cap: int = DEFAULT_STATE_CAP) -> list[list[Fraction]]:
    """Exact transition matrix from m(y) sum_n rho_n Q_n(x, y)."""
    _check_cap(spec, cap)
    states = enumerate_configurations(spec.N, spec.d)
    rho = spec.eigenvalues
    P = []
    for x in states:
        row = []
        for y in states:
            k = sum((r * q for r, q in zip(rho, kernel_all(x, y, spec.p))), Fraction(0))
            row.append(multinomial_pmf(y, spec.p) * k)
        P.append(row)
    return P


def stationary(spec: UrnChainSpec) -> list[Fraction]:
    return [multinomial_pmf(x, spec.p) for x in enumerate_configurations(spec.N, spec.d)]


def _vec_mat(v: list, P: list) -> list:
    n = len(v)
    out = [Fraction(0)] * n
    for i, vi in enumerate(v):
        if vi == 0:
            continue
        row = P[i]
        for j in range(n):
            if row[j]:
                out[j] += vi * row[j]
    return out


def distributions(x0: Sequence[int], spec: UrnChainSpec, steps: Iterable[int], P=None) -> dict:
    """Exact laws P^l(x0, .) for each requested l."""
    steps = sorted(set(int(l) for l in steps))
    if P is None:
        P = transition_matrix(spec)
    index = state_index(spec.N, spec.d)
    v = [Fraction(0)] * len(P)
    v[index[tuple(x0)]] = Fraction(1)
    out = {}
    cur = 0
    for l in steps:
        while cur < l:
            v = _vec_mat(v, P)
            cur += 1
        out[l] = list(v)
    return out


def chi2_distance_spectral(x0: Sequence[int], l: int, spec: UrnChainSpec) -> float:
    """sum_{n>=1} rho_n^(2l) Q_n(x0, x0), summed exactly then rounded."""
    diag = kernel_all(x0, x0, spec.p)
    rho = spec.eigenvalues
    return float(sum((rho[n] ** (2 * l) * diag[n] for n in range(1, spec.N + 1)), Fraction(0)))


def chi2_distance_exact(x0, l: int, spec: UrnChainSpec, P=None) -> float:
    """sum_y (P^l(x0, y) - m(y))^2 / m(y) from the exact matrix power."""
    v = distributions(x0, spec, [l], P)[l]
    m = stationary(spec)
    return float(sum(((a - b) ** 2 / b for a, b in zip(v, m)), Fraction(0)))


def tv_distance_exact(x0, l: int, spec: UrnChainSpec, P=None) -> float:
    v = distributions(x0, spec, [l], P)[l]
    m = stationary(spec)
    return float(sum((abs(a - b) for a, b in zip(v, m)), Fraction(0)) / 2)


def diagonal_from_elementary(N: int, p: Sequence) -> list[Fraction]:
    """Q_n(x, x) at x = (1, ..., 1) with d = N, via elementary symmetric
    functions of 1/p."""
    p = simplex(p)
    if len(p) != N:
        raise ValueError("this start needs d == N")
    e = [Fraction(1)]
    for pj in p:
        inv = 1 / pj
        e = [a + (inv * e[i - 1] if i else 0) for i, a in enumerate(e + [Fraction(0)])]
    out = []
    for n in range(N + 1):
        out.append(sum(
            (binomial(N, j) * binomial(N - j, n - j) * math.factorial(j) * (-1) ** (n - j) * e[j]
             / falling_factorial(N, j) ** 2 for j in range(n + 1)),
            Fraction(0),
        ))
    return out


# cutoff bounds

def _safe_upper(c: float) -> float:
    try:
        return math.expm1(math.exp(-c))
    except OverflowError:
        return math.inf


@dataclass
class CutoffBounds:
    lower: float
    upper: float
    l: int


def cutoff_bounds(x0: Sequence[int], c: float, spec: UrnChainSpec) -> CutoffBounds:
    """Chi-squared cutoff window for a single-colour start and z = 1.

    l = ceil((N p_dup / 2)(log(N (1/p_i - 1)) + c)); the lower bound is the
    leading spectral term at that integer l, the upper bound e^{e^{-c}} - 1.
    """
    i = _pure_colour(x0, spec)
    if spec.z != 1:
        raise ValueError("cutoff_bounds covers z = 1; use cutoff_bounds_general_z")
    N, pd, pi = spec.N, float(spec.p_dup), float(spec.p[i])
    l = max(0, math.ceil(N * pd / 2 * (math.log(N * (1 / pi - 1)) + c)))
    lower = float(spec.eigenvalues[1] ** (2 * l) * N * (1 / spec.p[i] - 1))
    return CutoffBounds(lower=lower, upper=_safe_upper(c), l=l)


def _pure_colour(x0, spec) -> int:
    x0 = tuple(x0)
    hits = [j for j, v in enumerate(x0) if v == spec.N]
    if len(x0) != spec.d or sum(x0) != spec.N or not hits:
        raise ValueError(f"start {x0} is not a single-colour configuration N e_i")
    return hits[0]


def general_gap(spec: UrnChainSpec) -> float:
    """u = 1 - |1 - z / (N p_dup)|."""
    return 1 - abs(1 - spec.z / (spec.N * float(spec.p_dup)))


def cutoff_bounds_general_z(x0: Sequence[int], c: float, spec: UrnChainSpec) -> CutoffBounds:
    """Chi-squared window for any start and redraw size z.

    l = ceil((log(N (1/min p - 1)) + c) / (2u)); lower = rho_1^(2l) Q_1(x0, x0);
    upper = e^{e^{-c}} - 1 (asymptotic in N).
    """
    x0 = tuple(x0)
    if len(x0) != spec.d or sum(x0) != spec.N:
        raise ValueError("start does not match the chain")
    if all(v * spec.d == spec.N for v in x0):
        raise ValueError("start must differ from N (1/d, ..., 1/d)")
    if spec.z == spec.N * spec.p_dup:
        raise ValueError("need z / N != p_dup")
    u = general_gap(spec)
    N, pmin = spec.N, float(min(spec.p))
    l = max(0, math.ceil((math.log(N * (1 / pmin - 1)) + c) / (2 * u)))
    q1 = kernel_all(x0, x0, spec.p)[1]
    lower = float(spec.eigenvalues[1] ** (2 * l) * q1)
    return CutoffBounds(lower=lower, upper=_safe_upper(c), l=l)


def _bounds_at(l: int, x0, spec: UrnChainSpec) -> tuple[float, float]:
    # lower/upper at a given integer l, choosing the sharper single-colour window when valid
    x0 = tuple(x0)
    q1 = kernel_all(x0, x0, spec.p)[1]
    lower = float(spec.eigenvalues[1] ** (2 * l) * q1)
    N = spec.N
    try:
        i = _pure_colour(x0, spec)
    except ValueError:
        i = None
    if spec.z == 1 and i is not None:
        pi = float(spec.p[i])
        c = 2 * l / (N * float(spec.p_dup)) - math.log(N * (1 / pi - 1))
    else:
        u = general_gap(spec)
        c = 2 * u * l - math.log(N * (1 / float(min(spec.p)) - 1))
    return lower, _safe_upper(c)


# strong stationary time

def strong_stationary_time_sim(spec: UrnChainSpec, replicates: int, seed: int = 0, max_steps: int = 10**6) -> np.ndarray:
    """Samples of T, the first step by which every ball has been picked (q = 0 only)."""
    if spec.q != 0:
        raise ValueError("the all-balls-hit time is strong stationary only when q = 0")
    if replicates <= 0:
        raise ValueError("replicates must be positive")
    rng = np.random.default_rng(seed)
    N, z = spec.N, spec.z
    hit = np.zeros((replicates, N), dtype=bool)
    T = np.zeros(replicates, dtype=np.int64)
    alive = np.arange(replicates)
    step = 0
    while alive.size and step < max_steps:
        step += 1
        picks = rng.random((alive.size, N)).argsort(axis=1)[:, :z]
        hit[alive[:, None], picks] = True
        done = hit[alive].all(axis=1)
        T[alive[done]] = step
        alive = alive[~done]
    return T


# simulation

def step_simulate(state: Sequence[int], spec: UrnChainSpec, rng: np.random.Generator) -> tuple:
    """One transition of the urn from ``state``."""
    balls = np.repeat(np.arange(spec.d), state)
    if balls.size != spec.N:
        raise ValueError("state does not hold N balls")
    picked = rng.choice(spec.N, size=spec.z, replace=False)
    cdf = spec.recolour_cdf
    u = rng.random(spec.z)
    new = (u[:, None] > cdf[balls[picked]]).sum(axis=1)
    balls[picked] = np.minimum(new, spec.d - 1)
    return tuple(int(v) for v in np.bincount(balls, minlength=spec.d))


def simulate_laws(x0, spec: UrnChainSpec, steps: Iterable[int], replicates: int, seed: int = 0) -> dict:
    """Empirical laws of the state after each requested step count.

    Returns {l: {configuration: frequency}}.
    """
    steps = sorted(set(int(l) for l in steps))
    rng = np.random.default_rng(seed)
    N, d, z = spec.N, spec.d, spec.z
    balls = np.tile(np.repeat(np.arange(d), x0), (replicates, 1))
    cdf = spec.recolour_cdf
    rows = np.arange(replicates)[:, None]
    out = {}
    cur = 0
    for l in steps:
        while cur < l:
            picks = rng.random((replicates, N)).argsort(axis=1)[:, :z]
            colours = balls[rows, picks]
            u = rng.random((replicates, z))
            new = (u[..., None] > cdf[colours]).sum(axis=2)
            balls[rows, picks] = np.minimum(new, d - 1)
            cur += 1
        counts = np.stack([(balls == j).sum(axis=1) for j in range(d)], axis=1)
        uniq, freq = np.unique(counts, axis=0, return_counts=True)
        out[l] = {tuple(int(v) for v in row): int(f) / replicates for row, f in zip(uniq, freq)}
    return out


def empirical_tv(law: dict, spec: UrnChainSpec) -> float:
    """TV between an empirical law on configurations and the multinomial."""
    seen_mass = 0.0
    acc = 0.0
    for y, f in law.items():
        m = float(multinomial_pmf(y, spec.p))
        seen_mass += m
        acc += abs(f - m)
    return 0.5 * (acc + max(0.0, 1.0 - seen_mass))


# lumped birth-death chain

@dataclass(frozen=True)
class LumpedChain:
    """Number of balls of one tracked colour under the z = 1 urn."""

    N: int
    p_i: Fraction
    p_dup: Fraction = Fraction(1)

    def __post_init__(self):
        object.__setattr__(self, "p_i", to_fraction(self.p_i))
        object.__setattr__(self, "p_dup", to_fraction(self.p_dup))

    @property
    def q(self) -> Fraction:
        return 1 - self.p_dup

    @property
    def alpha(self) -> Fraction:
        return 1 - (self.p_i - self.q) / self.p_dup

    @property
    def beta(self) -> Fraction:
        return self.p_i / self.p_dup

    def matrix(self) -> list[list[Fraction]]:
        N, a, b = self.N, self.alpha, self.beta
        K = [[Fraction(0)] * (N + 1) for _ in range(N + 1)]
        for j in range(N + 1):
            down = Fraction(j, N) * a
            up = (1 - Fraction(j, N)) * b
            if j > 0:
                K[j][j - 1] = down
            if j < N:
                K[j][j + 1] = up
            K[j][j] = 1 - down - up
        return K

    def eigenvalue(self, n: int) -> Fraction:
        return 1 - Fraction(n) / (self.N * self.p_dup)


def square_in_krawtchouk(N: int, p_i) -> tuple[Fraction, Fraction, Fraction]:
    """(a, b, c) with x^2 = a Q_2(x) + b Q_1(x) + c for Q_n(.; N, p_i)."""
    p = to_fraction(p_i)
    q = 1 - p
    a = p * p * N * (N - 1)
    c = N * N * p * p + N * p * q
    return a, -a - c, c


@dataclass
class LumpedMoments:
    mean: float
    second_moment: float
    variance: float


def lumped_moments(chain: LumpedChain, l: int) -> LumpedMoments:
    """First two moments of the tracked count after l steps from X_0 = N."""
    N, p = chain.N, chain.p_i
    r = (1 - p) / p
    a, b, c = square_in_krawtchouk(N, p)
    r1, r2 = chain.eigenvalue(1) ** l, chain.eigenvalue(2) ** l
    mean = N * (1 - p) * r1 + N * p
    second = a * r2 * r * r - b * r1 * r + c
    return LumpedMoments(float(mean), float(second), float(second - mean * mean))


# spectrum

@dataclass
class EigenReport:
    eigenvalues: np.ndarray
    expected: np.ndarray
    max_deviation: float
    ok: bool


def expected_spectrum(spec: UrnChainSpec) -> np.ndarray:
    vals = []
    for n, r in enumerate(spec.eigenvalues):
        vals += [float(r)] * spec.multiplicity(n)
    return np.sort(np.array(vals))


def eigenstructure_check(spec: UrnChainSpec, tol: float = 1e-8, cap: int = DEFAULT_STATE_CAP) -> EigenReport:
    """Diagonalise the symmetrised float matrix and compare with rho_n repeated C(n+d-2, d-2) times."""
    P = np.array([[float(v) for v in row] for row in transition_matrix(spec, cap)])
    s = np.sqrt(np.array([float(v) for v in stationary(spec)]))
    S = (s[:, None] * P) / s[None, :]
    ev = np.sort(np.linalg.eigvalsh((S + S.T) / 2))
    exp = expected_spectrum(spec)
    dev = float(np.max(np.abs(ev - exp)))
    return EigenReport(ev, exp, dev, dev <= tol)


def product_chain_eigenvalue(j: int, N: int, p_dup) -> Fraction:
    """(j + (N - j)(1 - 1/p_dup)) / N, the lifted z = 1 chain's eigenvalues."""
    p_dup = to_fraction(p_dup)
    return (j + (N - j) * (1 - 1 / p_dup)) / N


# Lancaster characterisation

def lancaster_min_entry(rhos: Sequence, N: int, p) -> Fraction:
    """min over (x, y) of m(x) m(y) (1 + sum_{n>=1} rho_n Q_n(x, y))."""
    p = simplex(p)
    rhos = [Fraction(1)] + [to_fraction(r) for r in rhos]
    if len(rhos) != N + 1:
        raise ValueError(f"need rho_1..rho_N ({N} values)")
    states = enumerate_configurations(N, len(p))
    m = {x: multinomial_pmf(x, p) for x in states}
    best = None
    for a, x in enumerate(states):
        for y in states[a:]:
            val = m[x] * m[y] * sum((r * k for r, k in zip(rhos, kernel_all(x, y, p))), Fraction(0))
            best = val if best is None or val < best else best
    return best


def lancaster_representing_law(rhos: Sequence, N: int, p) -> list[Fraction]:
    """The unique signed law nu on 0..N with rho_n = E_nu[Q_n(Z; N, 1 - min p)].

    The Lancaster series is non-negative exactly when nu is.
    """
    p = simplex(p)
    rhos = [Fraction(1)] + [to_fraction(r) for r in rhos]
    ps = 1 - min(p)
    h = [krawtchouk_norm(n, N, ps) for n in range(N + 1)]
    return [
        binomial_pmf(z, N, ps) * sum((hn * r * qn for hn, r, qn in zip(h, rhos, krawtchouk_all(z, N, ps))), Fraction(0))
        for z in range(N + 1)
    ]


# mixing curves

@dataclass
class MixingCurve:
    steps: list
    chi2: list
    tv: list
    lower: list
    upper: list
    tv_sim: list | None = None
    meta: dict = field(default_factory=dict)

    def to_csv(self) -> str:
        cols = ["l", "chi2", "tv", "lower", "upper"]
        if self.tv_sim is not None:
            cols.append("tv_sim")
        lines = [",".join(cols)]
        for k, l in enumerate(self.steps):
            row = [str(l), repr(self.chi2[k]), "" if self.tv[k] is None else repr(self.tv[k]),
                   repr(self.lower[k]), repr(self.upper[k])]
            if self.tv_sim is not None:
                row.append(repr(self.tv_sim[k]))
            lines.append(",".join(row))
        return "\n".join(lines) + "\n"


def mixing_curve(
    x0: Sequence[int],
    spec: UrnChainSpec,
    steps: Iterable[int],
    exact_tv: bool | None = None,
    simulate: int = 0,
    seed: int = 0,
    cap: int = DEFAULT_STATE_CAP,
) -> MixingCurve:
    """chi2 (spectral), TV (exact when the matrix fits), and the cutoff bounds per step.

    ``simulate`` > 0 adds an empirical TV column from that many trajectories.
    """
    x0 = tuple(int(v) for v in x0)
    if len(x0) != spec.d or sum(x0) != spec.N:
        raise ValueError("start does not match the chain")
    steps = sorted(set(int(l) for l in steps))
    if exact_tv is None:
        exact_tv = spec.n_states() <= min(cap, 500)
    chi2 = [chi2_distance_spectral(x0, l, spec) for l in steps]
    tv: list = [None] * len(steps)
    if exact_tv:
        P = transition_matrix(spec, cap)
        dists = distributions(x0, spec, steps, P)
        m = stationary(spec)
        tv = [float(sum((abs(a - b) for a, b in zip(dists[l], m)), Fraction(0)) / 2) for l in steps]
    bounds = [_bounds_at(l, x0, spec) for l in steps]
    tv_sim = None
    if simulate:
        laws = simulate_laws(x0, spec, steps, simulate, seed)
        tv_sim = [float(empirical_tv(laws[l], spec)) for l in steps]
    return MixingCurve(
        steps=steps,
        chi2=chi2,
        tv=tv,
        lower=[b[0] for b in bounds],
        upper=[b[1] for b in bounds],
        tv_sim=tv_sim,
        meta={"seed": seed, "replicates": simulate},
    )


def cutoff_curve(x0: Sequence[int], spec: UrnChainSpec, cs: Iterable[float], exact_tv: bool | None = None,
                 cap: int = DEFAULT_STATE_CAP) -> MixingCurve:
    """One row per c: l(c), the exact chi2 there, and the cutoff bounds for that c."""
    x0 = tuple(int(v) for v in x0)
    cs = list(cs)
    single = spec.z == 1 and any(v == spec.N for v in x0)
    bounds = [cutoff_bounds(x0, c, spec) if single else cutoff_bounds_general_z(x0, c, spec) for c in cs]
    steps = [b.l for b in bounds]
    base = mixing_curve(x0, spec, steps, exact_tv=exact_tv, cap=cap)
    by_l = {l: k for k, l in enumerate(base.steps)}
    return MixingCurve(
        steps=steps,
        chi2=[base.chi2[by_l[l]] for l in steps],
        tv=[base.tv[by_l[l]] for l in steps],
        lower=[b.lower for b in bounds],
        upper=[b.upper for b in bounds],
        meta={"c": cs},
    )
