from fractions import Fraction

import numpy as np
import pytest
from hypothesis import settings

from krawkernel.exactnum import enumerate_configurations, multinomial_pmf

settings.register_profile("repo", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("repo")

P3 = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))


@pytest.fixture
def p3():
    return P3


def projection_kernels(N, p):
    """Independent float oracle for Q_n(x, y).

    Q_n is the difference of the L2(m) projection kernels onto polynomials
    of total degree <= n and <= n-1 in the first d-1 coordinates, obtained
    from a Gram matrix of monomials.  Nothing here touches the closed-form
    sums used by the package.
    """
    d = len(p)
    states = enumerate_configurations(N, d)
    m = np.array([float(multinomial_pmf(x, p)) for x in states])
    X = np.array(states, dtype=float)[:, : d - 1]
    # exponent vectors of degree <= N in d-1 variables, graded
    exps = sorted({x[: d - 1] for x in states}, key=lambda e: (sum(e), e))
    out = []
    prev = np.zeros((len(states), len(states)))
    for n in range(N + 1):
        cols = [e for e in exps if sum(e) <= n]
        V = np.stack([np.prod(X ** np.array(e), axis=1) for e in cols], axis=1)
        G = V.T @ (m[:, None] * V)
        K = V @ np.linalg.solve(G, V.T)
        out.append(K - prev)
        prev = K
    return states, out


def pytest_terminal_summary(terminalreporter):
    # one status line per acceptance criterion, gathered while the tests ran
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod._results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod._results):
        terminalreporter.write_line(mod._results[n])
