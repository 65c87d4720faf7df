"""Special functions and quadrature used by the channel statistics."""

from .basic import erf_fn, gamma_fn, log_gamma, reg_gamma_lower
from .bessel import bessel_k
from .quadrature import DEFAULT_QUADRATURE, QuadratureConfig, QuadratureError, integrate

__all__ = [
    "DEFAULT_QUADRATURE",
    "QuadratureConfig",
    "QuadratureError",
    "bessel_k",
    "erf_fn",
    "gamma_fn",
    "integrate",
    "log_gamma",
    "reg_gamma_lower",
]
