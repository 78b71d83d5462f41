"""
Duplication: the product Q_n(x, y) is an average of a univariate
Krawtchouk polynomial against a mixing law phi_{x,y}.

phi is computed from the triple sum K and from its direct inversion;
the two must agree.  It is then recovered by simulation: thin the
colour matches between two shuffled trial sequences and count what is
left.
"""
from fractions import Fraction

from krawkernel import duplication

p = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
q = Fraction(1, 4)
x, y = (3, 2, 1), (2, 2, 2)

phi = duplication.mixing_measure(x, y, p, 1 - q)
explicit = duplication.mixing_measure_explicit(x, y, p, 1 - q)
print("phi      :", [str(m) for m in phi.masses])
print("routes agree:", phi.masses == explicit.masses)
for n in range(4):
    lhs, rhs = duplication.duplication_identity(n, x, y, p, 1 - q)
    print(f"  n={n}: Q_n(x,y) = {lhs}, h_n E_phi[Q_n(Z)] = {rhs}")

emp = duplication.matching_simulate(x, y, p, q, 100_000, seed=1)
tv = 0.5 * sum(abs(e - float(m)) for e, m in zip(emp, phi.masses))
print(f"simulated N - |R| vs phi: TV = {tv:.4f} over 100000 replicates")

# Below the admissibility threshold the triple sum turns negative.
print("admissible at p_dup = 3/4:", duplication.is_admissible(p, Fraction(3, 4)))
print("admissible at p_dup = 0.73:", duplication.is_admissible(p, Fraction(73, 100)))
