"""Stable evaluation of normalized ultraspherical functions over
half-integer index sets, their envelope bounds, and numerical
verification of the associated identities and inequalities."""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateIndexError,
    DomainError,
    InvalidDimensionError,
    InvalidIndexError,
    ScaledUnderflowError,
    UltraboundError,
    UndefinedXbarError,
    UnsupportedRangeError,
    WrongRegimeError,
)
from .halfint import (
    HalfInt,
    IndexPair,
    TransitionData,
    enumerate_I,
    enumerate_indices,
    harmonic_dim,
    laplace_eigenvalue,
    q_factor,
    q_value,
    sphere_measure,
    transition_points,
)
from .specfun import QuadratureRule, bessel_j, gauss_legendre, log_gamma
from .ultra import EvalPoint, ScaledReal, eval_X, eval_Y, eval_Y_scaled, jacobi_symmetric, norm_const, y_table
from .envelopes import (
    RegimeParams,
    bessel_envelope,
    dimension_bound,
    exp_small_y_bound,
    hermite_envelope,
    universal_bound,
)
from .asymptotics import (
    ZetaSolution,
    claim_ratio,
    ode_residual,
    sign_check,
    titchmarsh_check,
    zeta_solve,
)
from .harness import (
    DecayFit,
    SuiteResult,
    SweepConfig,
    SweepReport,
    chebyshev_grid,
    fit_decay_constant,
    projection_identity_check,
    run_sweep,
)

__version__ = "0.1.0"
