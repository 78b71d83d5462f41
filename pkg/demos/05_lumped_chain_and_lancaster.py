"""
Two side views of the urn chain.

Watching a single colour gives a birth-death chain whose mean and second
moment have closed forms.  Viewed as a joint law of (X_0, X_1) under
stationarity, the chain is a Lancaster distribution; its correlation
sequence is admissible exactly when the representing law on {0..N} is
nonnegative.
"""
from fractions import Fraction

from krawkernel import chain

L = chain.LumpedChain(20, Fraction(1, 2), Fraction(9, 10))
for l in (0, 5, 20, 80):
    m = chain.lumped_moments(L, l)
    print(f"l = {l:3d}: mean {float(m.mean):8.4f}, variance {float(m.variance):8.4f}")

p = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
for rho in (Fraction(1, 2), Fraction(-1, 3), Fraction(-1, 2)):
    seq = [rho ** n for n in range(1, 4)]
    low = chain.lancaster_min_entry(seq, 3, p)
    nu = chain.lancaster_representing_law(seq, 3, p)
    print(f"rho_n = ({rho})^n: smallest joint entry {float(low):+.5f}, representing law {[str(v) for v in nu]}")
