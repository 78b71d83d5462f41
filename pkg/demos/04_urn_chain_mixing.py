"""
The urn chain: draw z balls, recolour them, put them back.

Its eigenvalues are univariate Krawtchouk values with multiplicities
C(n+d-2, d-2) and the kernel polynomials are its eigenfunctions, so the
chi-squared distance from stationarity is a short exact sum.  For a pure
start the distance drops from huge to tiny inside a window of width
O(N) around (N/2) log(N (1/p_i - 1)).
"""
from fractions import Fraction

from krawkernel import chain

p = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
spec = chain.UrnChainSpec(100, p, z=1)
start = (0, 100, 0)
print("cutoff window, N = 100, start with every ball in colour 2")
for c in (-3.0, -1.0, 0.0, 1.0, 3.0):
    b = chain.cutoff_bounds(start, c, spec)
    chi2 = chain.chi2_distance_spectral(start, b.l, spec)
    print(f"  c = {c:+.0f}: l = {b.l:4d}   {b.lower:11.4g} <= chi2 = {chi2:11.4g} <= {b.upper:11.4g}")

small = chain.UrnChainSpec(3, p, z=1)
rep = chain.eigenstructure_check(small)
print("N = 3 spectrum agrees with the formula:", rep.ok, f"(max deviation {rep.max_deviation:.1e})")

curve = chain.mixing_curve((3, 0, 0), small, range(0, 12, 2), simulate=20_000, seed=0)
print(curve.to_csv())

T = chain.strong_stationary_time_sim(chain.UrnChainSpec(10, p, 1), 20_000, seed=0)
print(f"strong stationary time at N = 10: mean {T.mean():.2f}, coupon collector {10 * sum(1 / k for k in range(1, 11)):.2f}")
