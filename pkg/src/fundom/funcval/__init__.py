"""Evaluation of Gamma, zeta, their derivatives and related functions."""
from .constants import STIELTJES, euler_gamma_constant
from .core import (
    DEFAULT_VALIDITY_HEIGHT,
    NEAR_POLE_RADIUS,
    EvalResult,
    eval,
    evaluator,
    functional_equation_residual,
    gamma,
    gamma_log_deriv,
    gamma_partial,
    hardy_z,
    loggamma,
    stieltjes_constant,
    trigamma,
    values,
    zeta,
    zeta_derivs,
    zeta_laurent,
)
from .functions import ESSENTIAL_RADIUS, FunctionId

__all__ = [
    "DEFAULT_VALIDITY_HEIGHT",
    "ESSENTIAL_RADIUS",
    "NEAR_POLE_RADIUS",
    "STIELTJES",
    "EvalResult",
    "FunctionId",
    "euler_gamma_constant",
    "eval",
    "evaluator",
    "functional_equation_residual",
    "gamma",
    "gamma_log_deriv",
    "gamma_partial",
    "hardy_z",
    "loggamma",
    "stieltjes_constant",
    "trigamma",
    "values",
    "zeta",
    "zeta_derivs",
    "zeta_laurent",
]
