"""Numerics for pseudomoments of Riemann zeta partial sums.

Exact twisted moments, certified Euler products, Monte Carlo polytope
constants, hypercontractive bound certificates, and polytorus norm tools.
"""

__version__ = "0.1.0"

from .arith import (
    FactoredInteger,
    SmoothSet,
    big_omega,
    dickman_rho,
    dk_prime_power,
    factorize,
    primes_up_to,
    psi_smooth_count,
    smooth_set,
)
from .bounds import BoundCertificate, breakdown_threshold, rankin_upper, sandwich, weissler_lower
from .errors import BudgetExceededError, SeriesDivergenceError
from .euler import EulerProductValue, a_asymptotic, arithmetic_factor, diagonal_F, local_factor_a, norton_bound
from .moments import (
    ConvolutionTable,
    DirichletPolynomial,
    MomentResult,
    l2k_norm,
    pseudomoment,
    restricted_divisor_table,
    smoothed_pseudomoment,
    sup_norm_nonneg,
)
from .polytope import (
    PolytopeEstimate,
    gamma_factor_exact_k1,
    gamma_factor_mc,
    membership,
    volume_mc,
    volume_sandwich,
)
from .torus import (
    BohrLift,
    ConcentrationReport,
    bernstein_modulus_bound,
    bohr_lift,
    empirical_concentration,
    evaluate,
    khintchine_bound,
    normcomp_threshold,
    smooth_projection,
    smooth_sum_lower,
)
