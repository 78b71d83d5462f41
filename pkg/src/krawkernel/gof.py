"""
Orthogonal decomposition of the multinomial chi-squared statistic.

Given r observed configurations of N balls in d cells, the classical
Pearson statistic of the pooled N r balls splits into N components

    r * pt(i)^2,   pt(i)^2 = sum_{x,y} Q_i(x, y; N, p) phat(x) phat(y),

one per total degree i.  Under the null each is asymptotically
chi-squared with C(i + d - 2, d - 2) degrees of freedom.  Because the
kernel polynomials are basis free, so are the components.

Accumulation is exact (integer counts times rational kernel values);
floats appear only in the report.
"""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from scipy.special import gammaincc

from .exactnum import (
    binomial,
    enumerate_configurations,
    multinomial_coeff,
    multinomial_pmf,
    simplex,
    to_fraction,
)
from .kernel import _hyper0, _ppow, kernel_all


class SampleError(ValueError):
    pass


def _tally(sample: Iterable[Sequence[int]]) -> tuple[Counter, int, int, int]:
    counts = Counter(tuple(int(v) for v in obs) for obs in sample)
    if not counts:
        raise SampleError("empty sample")
    totals = {sum(x) for x in counts}
    dims = {len(x) for x in counts}
    if len(totals) != 1 or len(dims) != 1:
        raise SampleError("all observations must share the same N and d")
    return counts, totals.pop(), dims.pop(), sum(counts.values())


def _exact_components(sample, p) -> tuple[list[Fraction], int, int]:
    # r * pt(i)^2 for i = 0..N as exact rationals
    counts, N, d, r = _tally(sample)
    p = simplex(p)
    if len(p) != d:
        raise SampleError(f"sample has d = {d} cells but p has {len(p)}")
    support = sorted(counts)
    acc = [Fraction(0)] * (N + 1)
    for a, x in enumerate(support):
        for y in support[a:]:
            w = counts[x] * counts[y] * (1 if x == y else 2)
            for i, q in enumerate(kernel_all(x, y, p)):
                acc[i] += w * q
    return [v / r for v in acc], N, r


def component_stat(i: int, sample, p) -> float:
    """pt(i)^2, the squared length of the degree-i part of the empirical law."""
    comps, N, r = _exact_components(sample, p)
    if not 1 <= i <= N:
        raise ValueError(f"degree {i} outside 1..{N}")
    return float(comps[i] / r)


def components(sample, p) -> list[float]:
    """[r pt(1)^2, ..., r pt(N)^2]."""
    comps, _, _ = _exact_components(sample, p)
    return [float(c) for c in comps[1:]]


def total_chi_squared(sample, p) -> float:
    """Pearson X^2 of the r observations over the configuration space.

    Cells are the C(N+d-1, d-1) configurations with expected counts
    r m(x; N, p); this is the statistic the components add up to.  The
    pooled d-cell statistic is :func:`pooled_chi_squared` and coincides
    with the first component only.
    """
    return float(_configuration_chi_squared(sample, p))


def _configuration_chi_squared(sample, p) -> Fraction:
    counts, N, d, r = _tally(sample)
    p = simplex(p)
    # sum_x (n_x - r m)^2 / (r m) = sum_x n_x^2 / (r m) - r over all x
    acc = sum((Fraction(c * c) / multinomial_pmf(x, p) for x, c in counts.items()), Fraction(0))
    return acc / r - r


def pooled_chi_squared(sample, p) -> float:
    """Pearson X^2 of the N r pooled balls against the d cell probabilities."""
    return float(_pooled_chi_squared(sample, p))


def _pooled_chi_squared(sample, p) -> Fraction:
    counts, N, d, r = _tally(sample)
    p = simplex(p)
    pooled = [0] * d
    for x, c in counts.items():
        for j in range(d):
            pooled[j] += c * x[j]
    n = N * r
    return sum((Fraction((t - n * pj) ** 2) / (n * pj) for t, pj in zip(pooled, p)), Fraction(0))


def degrees_of_freedom(i: int, d: int) -> int:
    if i < 1 or d < 2:
        raise ValueError("need i >= 1 and d >= 2")
    return binomial(i + d - 2, d - 2)


def chi_squared_survival(x: float, df: int) -> float:
    """P(chi2_df > x) via the regularised upper incomplete gamma."""
    if x < 0:
        raise ValueError("x must be non-negative")
    if df == 0:
        return 1.0
    return float(gammaincc(df / 2.0, x / 2.0))


@dataclass
class GofReport:
    mode: str
    N: int
    d: int
    r: int
    components: list
    dfs: list
    p_values: list
    total: float
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("extra")
        return out

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


def gof_report(sample, p) -> GofReport:
    """Fixed-p decomposition; ``total`` is the configuration-space Pearson statistic."""
    comps, N, r = _exact_components(sample, p)
    d = len(simplex(p))
    values = [float(c) for c in comps[1:]]
    dfs = [degrees_of_freedom(i, d) for i in range(1, N + 1)]
    return GofReport(
        mode="fixed-p",
        N=N,
        d=d,
        r=r,
        components=values,
        dfs=dfs,
        p_values=[chi_squared_survival(v, k) for v, k in zip(values, dfs)],
        total=float(_configuration_chi_squared(sample, p)),
    )


def estimate_p(sample) -> tuple:
    counts, N, d, r = _tally(sample)
    pooled = [0] * d
    for x, c in counts.items():
        for j in range(d):
            pooled[j] += c * x[j]
    phat = tuple(Fraction(t, N * r) for t in pooled)
    if any(v == 0 for v in phat):
        empty = [j for j, v in enumerate(phat) if v == 0]
        raise SampleError(f"estimated p has empty cells {empty}; the kernel needs every p_j > 0")
    return phat


def estimated_p_report(sample) -> GofReport:
    """Decomposition with p replaced by the pooled cell frequencies.

    Component 1 vanishes identically.  ``total`` sums components 2..N-1;
    component N is reported but not added in.  The overall reference df
    is C(N+d-1, d-1) - 1 - (d-1).
    """
    counts, N, d, r = _tally(sample)
    if r < 2:
        raise SampleError("need at least two observations to estimate p")
    phat = estimate_p(sample)
    comps, _, _ = _exact_components(sample, phat)
    values = [float(c) for c in comps[1:]]
    dfs = [0] + [degrees_of_freedom(i, d) for i in range(2, N + 1)]
    total = float(sum(comps[2:N], Fraction(0)))
    return GofReport(
        mode="estimated-p",
        N=N,
        d=d,
        r=r,
        components=values,
        dfs=dfs,
        p_values=[chi_squared_survival(v, k) for v, k in zip(values, dfs)],
        total=total,
        extra={"p_hat": phat, "total_df": binomial(N + d - 1, d - 1) - 1 - (d - 1)},
    )


def subsample_form_stat(i: int, sample, p) -> float:
    """pt(i)^2 written through pooled subsampling frequencies.

    Hbar(z) is the average over observations of the chance that a random
    size-|z| subsample has counts z; its null mean is the multinomial
    probability of z.
    """
    counts, N, d, r = _tally(sample)
    p = simplex(p)
    if not 1 <= i <= N:
        raise ValueError(f"degree {i} outside 1..{N}")
    total = Fraction(0)
    for k in range(1, i + 1):
        inner = Fraction(0)
        for z in enumerate_configurations(k, d):
            mz = multinomial_coeff(k, z) * _ppow(p, z)
            hbar = empirical_subsample_prob(z, counts, r)
            inner += mz * (hbar / mz - 1) ** 2
        total += binomial(N, k) * binomial(N - k, i - k) * (-1) ** (i - k) * inner
    return float(total)


def empirical_subsample_prob(z, counts, r=None) -> Fraction:
    if not isinstance(counts, Counter):
        counts = Counter(tuple(x) for x in counts)
    if r is None:
        r = sum(counts.values())
    return sum((c * _hyper0(z, x) for x, c in counts.items()), Fraction(0)) / r


def poisson_weighted_stat(sample, p, rho) -> float:
    """sum_i rho^i r pt(i)^2 for a fixed 0 < rho < 1."""
    rho = to_fraction(rho)
    if not 0 < rho < 1:
        raise ValueError("rho must lie in (0, 1)")
    comps, _, _ = _exact_components(sample, p)
    return float(sum((rho ** i * c for i, c in enumerate(comps) if i >= 1), Fraction(0)))


# counts-file IO

def read_counts(lines: Iterable[str]) -> tuple[int, int, list[tuple]]:
    """Parse '#N=<int>,d=<int>' followed by one comma-separated observation per line.

    Raises SampleError carrying the 1-based line number on malformed input.
    """
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise SampleError("line 1: missing header '#N=<int>,d=<int>'") from None
    N, d = _parse_header(header)
    rows = []
    for lineno, line in enumerate(it, start=2):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obs = tuple(int(v) for v in line.split(","))
        except ValueError:
            raise SampleError(f"line {lineno}: non-integer entry in {line!r}") from None
        if len(obs) != d:
            raise SampleError(f"line {lineno}: expected {d} counts, got {len(obs)}")
        if any(v < 0 for v in obs) or sum(obs) != N:
            raise SampleError(f"line {lineno}: counts must be non-negative and sum to N = {N}")
        rows.append(obs)
    if not rows:
        raise SampleError("no observations")
    return N, d, rows


def _parse_header(header: str) -> tuple[int, int]:
    h = header.strip()
    if not h.startswith("#"):
        raise SampleError("line 1: header must look like '#N=<int>,d=<int>'")
    try:
        fields = dict(part.split("=") for part in h[1:].split(","))
        return int(fields["N"]), int(fields["d"])
    except (ValueError, KeyError):
        raise SampleError(f"line 1: cannot parse header {h!r}") from None

