"""Stationary profiles of the small-variance infinitesimal model.

Thin python surface over the C++ core: quadrature against the exp(-Q)
measure, the implicit linear part gamma_eps, the fixed-point solver for
(lambda_eps, U_eps, F_eps), the explicit eps -> 0 limit objects, and the
time-marching cross-validator.
"""

from ._core import (  # noqa: F401
    ConfigError,
    DensityState,
    GridFunction,
    MortalityModel,
    QuadratureRule,
    StationarySolution,
    apply_B,
    build_grid_function,
    eval_I,
    eval_J,
    eval_W,
    gamma0,
    gauss_1d,
    gauss_q2d,
    gaussian_density,
    grid_function_from_values,
    kappa,
    l1_distance,
    lambda0,
    midpoint_density,
    picard_solve,
    polynomial_mortality,
    preset_mortality,
    q_form,
    reconstruct_F,
    run_to_equilibrium,
    solve_gamma,
    stationarity_residual,
    u0,
    v0_series,
    validate_mortality,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = getattr(__import__("infimod._core", fromlist=["__version__"]), "__version__", "dev")
