"""
Exact combinatorial primitives.

Everything here works on Python integers and ``fractions.Fraction`` so
that identities between polynomial families can be checked with ``==``
rather than with a tolerance.  Configurations are plain tuples of
non-negative ints; cell probabilities are tuples of Fractions.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Sequence

Config = tuple  # tuple[int, ...]
Weights = tuple  # tuple[Fraction, ...]


def to_fraction(value) -> Fraction:
    """Exact conversion; strings such as ``"1/3"`` and ``"0.25"`` are accepted.

    Floats are converted through their shortest decimal repr, so
    ``to_fraction(0.1) == Fraction(1, 10)``.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(str(value).strip())


def simplex(weights: Sequence) -> Weights:
    """Validate and return cell probabilities as a tuple of Fractions."""
    w = tuple(to_fraction(v) for v in weights)
    if len(w) < 1:
        raise ValueError("need at least one cell probability")
    if any(v <= 0 for v in w):
        raise ValueError(f"cell probabilities must be positive, got {w}")
    if sum(w) != 1:
        raise ValueError(f"cell probabilities must sum to 1, got sum {sum(w)}")
    return w


def config(counts: Sequence[int]) -> Config:
    c = tuple(int(v) for v in counts)
    if any(v < 0 for v in c):
        raise ValueError(f"counts must be non-negative, got {c}")
    return c


def binomial(n: int, k: int) -> int:
    if n < 0:
        raise ValueError("n must be non-negative")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def multinomial_coeff(n: int, parts: Sequence[int]) -> int:
    """n! / (prod parts_i! * (n - sum(parts))!).

    The last part is implicit, so ``multinomial_coeff(4, [2, 1, 1])`` and
    ``multinomial_coeff(4, [2, 1])`` are both 12.
    """
    rest = n - sum(parts)
    if rest < 0:
        raise ValueError(f"parts sum to {sum(parts)} > n = {n}")
    out = math.factorial(n) // math.factorial(rest)
    for k in parts:
        if k < 0:
            raise ValueError("parts must be non-negative")
        out //= math.factorial(k)
    return out


def falling_factorial(x: int, k: int) -> int:
    """x (x-1) ... (x-k+1); equal to 1 for k = 0 even when x = 0."""
    if k < 0:
        raise ValueError("k must be non-negative")
    out = 1
    for i in range(k):
        out *= x - i
    return out


def enumerate_configurations(N: int, d: int) -> list[Config]:
    """All compositions of N into d parts, reverse-lexicographic.

    The ordering is relied upon for matrix indices in :mod:`krawkernel.chain`.

    >>> enumerate_configurations(2, 2)
    [(2, 0), (1, 1), (0, 2)]
    """
    return list(_compositions(N, d))


def _compositions(N: int, d: int) -> Iterator[Config]:
    if d < 1:
        raise ValueError("d must be positive")
    if d == 1:
        yield (N,)
        return
    for first in range(N, -1, -1):
        for rest in _compositions(N - first, d - 1):
            yield (first,) + rest


def sub_configurations(bound: Sequence[int], max_total: int | None = None) -> Iterator[Config]:
    """All z with 0 <= z <= bound componentwise and |z| <= max_total."""
    ranges = [range(b + 1) for b in bound]
    for z in product(*ranges):
        if max_total is None or sum(z) <= max_total:
            yield z


def multinomial_pmf(x: Sequence[int], p: Sequence[Fraction]) -> Fraction:
    if len(x) != len(p):
        raise ValueError(f"dimension mismatch: {len(x)} counts vs {len(p)} weights")
    out = Fraction(multinomial_coeff(sum(x), x))
    for xj, pj in zip(x, p):
        out *= pj ** xj
    return out


@lru_cache(maxsize=None)
def state_index(N: int, d: int) -> dict:
    return {c: i for i, c in enumerate(enumerate_configurations(N, d))}


# dense univariate polynomials as coefficient lists, lowest degree first

def poly_add(a: list, b: list) -> list:
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def poly_mul(a: list, b: list, cap: int | None = None) -> list:
    if not a or not b:
        return []
    n = len(a) + len(b) - 1
    if cap is not None:
        n = min(n, cap + 1)
    out = [Fraction(0)] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        for j, bj in enumerate(b):
            if i + j >= n:
                break
            out[i + j] += ai * bj
    return out


def poly_pow(a: list, k: int, cap: int | None = None) -> list:
    out = [1]
    base = list(a)
    while k:
        if k & 1:
            out = poly_mul(out, base, cap)
        k >>= 1
        if k:
            base = poly_mul(base, base, cap)
    return out


def poly_trim(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a
