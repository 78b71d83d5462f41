"""
Kernel polynomials on the multinomial, evaluated exactly.

Q_n(x, y) sums the products of all orthonormal polynomials of total
degree n.  We evaluate it three ways, check that it does not depend on the
orthonormal basis, and watch the Poisson kernel 1 + sum rho^n Q_n turn
into a probability law once rho reaches -1/(1/min p - 1).
"""
from fractions import Fraction

from krawkernel import kernel, mvk
from krawkernel.exactnum import enumerate_configurations

p = (Fraction(1, 2), Fraction(1, 4), Fraction(1, 4))
x, y = (2, 1, 0), (1, 1, 1)

print("Q_n(x, y) for n = 0..3:", [str(v) for v in kernel.kernel_all(x, y, p)])
for n in (1, 2, 3):
    forms = {
        kernel.kernel_eval(n, x, y, p),
        kernel.kernel_eval_centered(n, x, y, p),
        kernel.kernel_eval_hypergeom(n, x, y, p),
        kernel.kernel_recursion(n, x, y, p),
    }
    print(f"  n={n}: all four routes give {forms}")

# Two different Helmert orderings span the same degree-n spaces.
for order in ([0, 1], [2, 0]):
    basis = mvk.build_helmert_basis(p, order=order)
    n2 = mvk.multi_indices(3, 2, exact_total=2)
    total = sum(mvk.mvk_orthonormal_product(n, x, y, basis) for n in n2)
    print(f"basis order {order}: sum over |n|=2 of Q_n(x)Q_n(y) = {total}")

rho_min = kernel.poisson_kernel_min_rho(p)
states = enumerate_configurations(3, 3)
for rho in (rho_min, rho_min - Fraction(1, 100)):
    low = min(kernel.poisson_kernel_rhs(rho, a, b, p) for a in states for b in states)
    print(f"rho = {rho}: smallest Poisson-kernel value {float(low):+.4f}")
