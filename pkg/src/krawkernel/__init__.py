"""
Reproducing kernel polynomials on the multinomial distribution.

Exact (``fractions.Fraction``) implementations of univariate and
multivariate Krawtchouk polynomials, their reproducing kernels, the
duplication structure of the kernels, the orthogonal decomposition of the
multinomial chi-squared statistic, and the Ehrenfest-type urn chains whose
eigenfunctions are the kernels.
"""
__version__ = "0.1.0"

from .exactnum import (
    binomial,
    enumerate_configurations,
    falling_factorial,
    multinomial_coeff,
    multinomial_pmf,
    simplex,
    to_fraction,
)
from .krawtchouk import (
    binomial_pmf,
    charlier,
    krawtchouk_all,
    krawtchouk_eval,
    krawtchouk_gf,
    krawtchouk_gf_coeff,
    krawtchouk_norm,
    krawtchouk_transform,
)
from .mvk import Basis, build_helmert_basis, contingency_marginal_law, mvk_eval, mvk_transform
from .kernel import (
    hypergeom_prob,
    kernel_all,
    kernel_eval,
    kernel_eval_centered,
    kernel_eval_hypergeom,
    kernel_recursion,
    kernel_transform,
    poisson_kernel_lhs,
    poisson_kernel_rhs,
    poisson_limit_kernel,
)
from .duplication import (
    InadmissibleError,
    duplication_identity,
    matching_simulate,
    mixing_measure,
    mixing_measure_explicit,
    triple_product_1d,
    triple_sum_K,
)
from .gof import (
    GofReport,
    chi_squared_survival,
    component_stat,
    degrees_of_freedom,
    estimated_p_report,
    gof_report,
    subsample_form_stat,
    total_chi_squared,
)
from .chain import (
    LumpedChain,
    MixingCurve,
    UrnChainSpec,
    chi2_distance_spectral,
    cutoff_bounds,
    cutoff_bounds_general_z,
    eigenstructure_check,
    lumped_moments,
    step_simulate,
    strong_stationary_time_sim,
    transition_matrix,
    tv_distance_exact,
)

# longer names some callers expect
charlier_eval = charlier
krawtchouk_gf_coeffs = krawtchouk_gf_coeff
kernel_recursion_check = kernel_recursion
duplication_identity_check = duplication_identity
