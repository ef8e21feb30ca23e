"""Finite-N single-molecule velocity marginal and its Maxwellian limit.

N molecules in one dimension with fixed total kinetic energy occupy the
sphere sum(v_i**2) = E_bar, E_bar = N k T / m.  Integrating out all but one
velocity gives

    F(v) = C (1 - v**2 / E_bar) ** ((N - 3) / 2),   v**2 <= E_bar,

with C = Gamma(N/2) sqrt(m) / (Gamma((N-1)/2) sqrt(pi N k T)).  As N grows
F tends to the Gaussian with variance k T / m.

Defaults are the dimensionless units m = k = T = 1, in which v is the
reduced velocity v * sqrt(m / kT).
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtr

from .errors import DomainError
from .specialfn import _log_gamma_ratio_excess, gamma_factor, reg_inc_beta

__all__ = [
    "GasParams",
    "FiniteNDistribution",
    "MaxwellianDistribution",
    "log_prefactor",
    "pdf_dimensionless",
    "maxwellian_pdf_dimensionless",
]

_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


@dataclass(frozen=True)
class GasParams:
    """Molecule count and thermodynamic constants of a one-dimensional gas.

    Attributes
    ----------
    N : int
        Number of molecules, at least 2.
    m, k, T : float
        Molecular mass, Boltzmann constant and temperature, all > 0.
    """

    N: int
    m: float = 1.0
    k: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        if isinstance(self.N, bool) or int(self.N) != self.N:
            raise DomainError(f"N must be an integer, got {self.N!r}")
        object.__setattr__(self, "N", int(self.N))
        if self.N < 2:
            raise DomainError(
                f"N >= 2 required (N = {self.N}: the marginal is not a normalizable density)"
            )
        for name in ("m", "k", "T"):
            val = getattr(self, name)
            if not (isinstance(val, numbers.Real) and math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be a finite positive number, got {val!r}")
            object.__setattr__(self, name, float(val))
        if not (self.e_bar > 0 and math.isfinite(self.e_bar)):
            raise DomainError("N k T / m must be finite and positive")

    dim = 1

    @property
    def thermal_v2(self) -> float:
        """kT/m, the per-molecule mean square velocity."""
        return self.k * self.T / self.m

    @property
    def e_bar(self) -> float:
        """Squared radius N k T / m of the velocity shell."""
        return self.N * self.k * self.T / self.m

    @property
    def energy(self) -> float:
        """Total kinetic energy (D/2) N k T with D = 1."""
        return 0.5 * self.dim * self.N * self.k * self.T


def log_prefactor(N: int) -> float:
    """ln[Gamma(N/2) / (Gamma((N-1)/2) sqrt(pi N))], the dimensionless normalizer.

    Assembled from the gamma-ratio excess so that no O(ln N) terms cancel;
    accurate to a few ulp of ln sqrt(2 pi) for every N >= 2.
    """
    x = 0.5 * (N - 1)
    return _log_gamma_ratio_excess(x, 0.5) + 0.5 * math.log1p(-1.0 / N) - _HALF_LOG_2PI


def _as_finite(v) -> np.ndarray:
    arr = np.asarray(v, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("velocity must be finite")
    return arr


def _ret(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class FiniteNDistribution:
    """One-molecule velocity marginal of the N-molecule energy shell."""

    params: GasParams
    log_norm: float = field(init=False)

    def __post_init__(self):
        p = self.params
        object.__setattr__(
            self, "log_norm", log_prefactor(p.N) + 0.5 * math.log(p.m / (p.k * p.T))
        )

    @classmethod
    def dimensionless(cls, N: int) -> "FiniteNDistribution":
        return cls(GasParams(N))

    @property
    def N(self) -> int:
        return self.params.N

    @property
    def v_max(self) -> float:
        return math.sqrt(self.params.e_bar)

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_norm)

    def pdf(self, v):
        """Density at velocity ``v`` (scalar or array).

        Zero for v**2 > E_bar.  At |v| = sqrt(E_bar) the value is 0 for
        N >= 4, the prefactor for N = 3 and +inf for N = 2.
        """
        v = _as_finite(v)
        N = self.N
        s = np.abs(v) / self.v_max
        out = np.zeros(s.shape)
        inside = s < 1.0
        if N == 3:
            out[inside | (s == 1.0)] = self.prefactor
        else:
            expo = 0.5 * (N - 3)
            out[inside] = np.exp(self.log_norm + expo * np.log1p(-np.square(s[inside])))
            if N == 2:
                out[s == 1.0] = np.inf
        return _ret(out)

    def log_pdf(self, v):
        """ln pdf on the open support; -inf outside it."""
        v = _as_finite(v)
        s = np.abs(v) / self.v_max
        out = np.full(s.shape, -np.inf)
        inside = s < 1.0
        out[inside] = self.log_norm + 0.5 * (self.N - 3) * np.log1p(-np.square(s[inside]))
        return _ret(out)

    def cdf(self, v):
        """P(V <= v) = 1/2 + sign(v)/2 * I_{v^2/E_bar}(1/2, (N-1)/2)."""
        v = _as_finite(v)
        s = np.minimum(np.abs(v) / self.v_max, 1.0)
        half = 0.5 * np.atleast_1d(reg_inc_beta(0.5, 0.5 * (self.N - 1), np.square(s)))
        half = half.reshape(s.shape)
        return _ret(np.where(v >= 0, 0.5 + half, 0.5 - half))

    def expected_v2(self) -> float:
        """<v^2> = kT/m for every N."""
        return self.params.thermal_v2

    def expected_speed(self) -> float:
        """<|v|> = gamma_factor(N) * sqrt(2kT / (pi m))."""
        return gamma_factor(self.N) * math.sqrt(2.0 * self.params.thermal_v2 / math.pi)


@dataclass(frozen=True)
class MaxwellianDistribution:
    """Gaussian velocity law with variance kT/m, the N -> infinity limit."""

    m: float = 1.0
    k: float = 1.0
    T: float = 1.0

    def __post_init__(self):
        for name in ("m", "k", "T"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise DomainError(f"{name} must be a finite positive number, got {val!r}")

    @classmethod
    def from_params(cls, params: GasParams) -> "MaxwellianDistribution":
        return cls(params.m, params.k, params.T)

    @property
    def variance(self) -> float:
        return self.k * self.T / self.m

    def pdf(self, v):
        v = _as_finite(v)
        var = self.variance
        return _ret(np.exp(-0.5 * np.square(v) / var) / math.sqrt(2.0 * math.pi * var))

    def log_pdf(self, v):
        v = _as_finite(v)
        var = self.variance
        return _ret(-0.5 * np.square(v) / var - 0.5 * math.log(2.0 * math.pi * var))

    def cdf(self, v):
        v = _as_finite(v)
        return _ret(np.asarray(ndtr(v / math.sqrt(self.variance))))

    def moments(self) -> tuple[float, float]:
        """(<v^2>, <|v|>) = (kT/m, sqrt(2kT / (pi m)))."""
        var = self.variance
        return var, math.sqrt(2.0 * var / math.pi)


def pdf_dimensionless(N: int, vbar):
    """Reduced density F_bar(vbar) with support |vbar| <= sqrt(N)."""
    return FiniteNDistribution.dimensionless(N).pdf(vbar)


def maxwellian_pdf_dimensionless(vbar):
    return MaxwellianDistribution().pdf(vbar)
