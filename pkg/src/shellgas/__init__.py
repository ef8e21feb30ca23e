"""Velocity statistics of a small ideal gas on the constant-energy shell."""

from .distribution import (
    FiniteNDistribution,
    GasParams,
    MaxwellianDistribution,
    pdf_dimensionless,
)
from .errors import DomainError
from .specialfn import gamma_factor, log_gamma, reg_inc_beta, sphere_area

__all__ = [
    "DomainError",
    "FiniteNDistribution",
    "GasParams",
    "MaxwellianDistribution",
    "gamma_factor",
    "log_gamma",
    "pdf_dimensionless",
    "reg_inc_beta",
    "sphere_area",
]

__version__ = "0.1.0"
