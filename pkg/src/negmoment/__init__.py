"""Numerics for the negative first moment of quadratic twists of automorphic L-functions."""
from .characters import (
    FundamentalDiscriminant,
    QuadraticCharacterHandle,
    chi_bottom,
    chi_top,
    jacobi_symbol,
    kronecker_symbol,
    principal,
    psi,
)
from .gauss import g_closed, g_direct, tau_4l_transform, tau_direct
from .lfunc import (
    cech_fe_residual,
    completed_lambda_quadratic,
    dirichlet_L,
    gamma_ratio,
    hurwitz_zeta,
    k_series,
    reciprocal_L_twist,
)
from .moment import (
    MomentConfig,
    WeightSpec,
    euler_product_P,
    mellin_weight,
    moment_lhs,
    moment_report,
    residue_identity_check,
)
from .rep import SatakeSystem, coeff, get_rep, ramanujan_tau

__version__ = "0.1.0"
