"""Quadrature oracles, Maxwellian-limit metrics, goodness of fit and figure data.

All integrals over the finite-N marginal use the substitution
v = sqrt(E_bar) sin(phi), under which

    F(v) dv = C sqrt(E_bar) cos(phi)**(N - 2) dphi,

smooth on [-pi/2, pi/2] for every N >= 2 (the N = 2 endpoint singularity of
F disappears).  Nothing here calls the closed-form moments or the
incomplete-beta CDF, so the results are independent checks on both.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Sequence

import numpy as np
from scipy.optimize import brentq
from scipy.special import kolmogorov, ndtr, roots_legendre

from .distribution import (
    FiniteNDistribution,
    GasParams,
    MaxwellianDistribution,
    log_prefactor,
    pdf_dimensionless,
)
from .errors import DomainError
from .sampler import SampleBatch
from .specialfn import _log_gamma_ratio_excess, gamma_factor

__all__ = [
    "QuadEstimate",
    "gauss_legendre",
    "integrate",
    "phi_window",
    "quad_pdf_integral",
    "quad_cdf",
    "ConvergenceReport",
    "convergence_report",
    "total_variation",
    "kl_divergence",
    "GofResult",
    "ks_test",
    "autocorrelation",
    "prefactor_limit_gap",
    "Table",
    "figure1_series",
    "figure2_series",
]

QUAD_START = 512
QUAD_MAX = 8192
QUAD_TOL = 1e-12

# exp(-_LOG_CUT) bounds cos(phi)**(N-2) outside the integration window
_LOG_CUT = 120.0


class QuadEstimate(NamedTuple):
    value: float
    error: float  # |difference| of the last two node counts
    nodes: int


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _gl(f, a: float, b: float, n: int) -> float:
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return half * float(np.dot(w, f(half * x + 0.5 * (a + b))))


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    tol: float = QUAD_TOL,
    n_start: int = QUAD_START,
    n_max: int = QUAD_MAX,
) -> QuadEstimate:
    """Gauss-Legendre on [a, b], doubling nodes until two estimates agree.

    Agreement means |I_2n - I_n| < tol * max(1, |I_2n|).  If ``n_max`` is
    reached first the last estimate is returned with its discrepancy, so
    callers can decide whether that is good enough.
    """
    n = n_start
    prev = _gl(f, a, b, n)
    while True:
        n *= 2
        cur = _gl(f, a, b, n)
        err = abs(cur - prev)
        if err < tol * max(1.0, abs(cur)) or n >= n_max:
            return QuadEstimate(cur, err, n)
        prev = cur


def phi_window(N: int) -> float:
    """Upper angle beyond which cos(phi)**(N-2) < exp(-120)."""
    if N <= 2:
        return 0.5 * math.pi
    c = math.exp(-_LOG_CUT / (N - 2))
    return min(0.5 * math.pi, math.acos(c))


def _log_cos(phi: np.ndarray) -> np.ndarray:
    # log1p form keeps relative accuracy near phi = 0
    small = phi < 0.25 * math.pi
    out = np.empty_like(phi)
    out[small] = np.log1p(-2.0 * np.sin(0.5 * phi[small]) ** 2)
    out[~small] = np.log(np.cos(phi[~small]))
    return out


def quad_pdf_integral(dist: FiniteNDistribution, p: int) -> float:
    """Integral of |v|**p F(v) over the support, p in {0, 1, 2, 3, 4}.

    p = 0 is the normalization, p = 2 the mean square velocity and p = 1
    the mean speed.  Integrated on the half range [0, pi/2] in phi and
    doubled; this also places the |sin phi| kink of odd p at an endpoint.
    """
    if isinstance(p, bool) or p not in (0, 1, 2, 3, 4):
        raise DomainError(f"moment order must be one of 0..4, got {p!r}")
    N = dist.N
    e_bar = dist.params.e_bar
    log_scale = dist.log_norm + 0.5 * (p + 1) * math.log(e_bar)

    def f(phi):
        log_term = log_scale + (N - 2) * _log_cos(phi)
        if p:
            log_term = log_term + p * np.log(np.sin(phi))
        return np.exp(log_term)

    return 2.0 * integrate(f, 0.0, phi_window(N)).value


def quad_cdf(dist: FiniteNDistribution, v) -> np.ndarray | float:
    """P(V <= v) by direct quadrature of the density (no incomplete beta)."""
    vv = np.atleast_1d(np.asarray(v, dtype=float))
    N = dist.N
    log_scale = dist.log_norm + 0.5 * math.log(dist.params.e_bar)

    def f(phi):
        return np.exp(log_scale + (N - 2) * _log_cos(phi))

    out = np.empty_like(vv)
    for idx, x in enumerate(vv):
        s = min(abs(x) / dist.v_max, 1.0)
        upper = min(math.asin(s), phi_window(N))
        half = integrate(f, 0.0, upper).value if upper > 0 else 0.0
        out[idx] = 0.5 + math.copysign(half, x)
    return float(out[0]) if np.ndim(v) == 0 else out


def _maxwell_in_phi(N: int, phi: np.ndarray) -> np.ndarray:
    """Reduced Maxwellian density carried to the phi variable (includes dv/dphi)."""
    v = math.sqrt(N) * np.sin(phi)
    return math.sqrt(N) * np.cos(phi) * np.exp(-0.5 * v * v) / math.sqrt(2.0 * math.pi)


def total_variation(N: int) -> float:
    """(1/2) * integral |F_N - F_M| of the reduced densities over the real line."""
    # reduced density in phi: C sqrt(N) cos(phi)**(N-2)
    log_c = log_prefactor(N) + 0.5 * math.log(N)

    def g(phi):
        phi = np.asarray(phi, dtype=float)
        return np.exp(log_c + (N - 2) * _log_cos(phi)) - _maxwell_in_phi(N, phi)

    hi = phi_window(N)
    probe = np.linspace(0.0, hi, 4097)
    gv = g(probe)
    cuts = [0.0]
    for k in np.flatnonzero(np.sign(gv[:-1]) * np.sign(gv[1:]) < 0):
        cuts.append(brentq(lambda t: float(g(t)), probe[k], probe[k + 1], xtol=1e-15))
    cuts.append(hi)
    inner = 0.0
    for lo, up in zip(cuts[:-1], cuts[1:]):
        inner += abs(integrate(g, lo, up, n_start=128).value)
    # Maxwellian mass beyond |vbar| = sqrt(N), on both sides
    tail = 2.0 * float(ndtr(-math.sqrt(N)))
    # doubled half-range integral and tail, then halved
    return 0.5 * (2.0 * inner + tail)


def kl_divergence(N: int) -> float:
    """KL(F_N || F_M) in nats, over the support of F_N.

    The reverse direction is infinite because F_N vanishes outside
    |vbar| <= sqrt(N).
    """
    log_c = log_prefactor(N)
    shift = log_c + 0.5 * math.log(2.0 * math.pi)
    log_w = log_c + 0.5 * math.log(N)

    if N == 2:
        # flat weight: the ln cos singularity at pi/2 is integrated exactly,
        # int_0^{pi/2} ln cos = -(pi/2) ln 2, and only the smooth rest numerically
        w = math.exp(log_w)

        def smooth(phi):
            return w * (shift + np.sin(phi) ** 2)

        singular = -w * (-0.5 * math.pi * math.log(2.0))
        return 2.0 * (integrate(smooth, 0.0, 0.5 * math.pi, tol=1e-13).value + singular)

    def f(phi):
        lc = _log_cos(phi)
        weight = np.exp(log_w + (N - 2) * lc)
        log_ratio = shift + (N - 3) * lc + 0.5 * N * np.sin(phi) ** 2
        return weight * log_ratio

    return 2.0 * integrate(f, 0.0, phi_window(N), tol=1e-13).value


@dataclass
class ConvergenceReport:
    """Gridded comparison of reduced finite-N densities with the Maxwellian.

    ``finite_pdf[i]`` holds F_N on ``grid`` for ``n_values[i]``; the metric
    lists are aligned with ``n_values``.
    """

    n_values: list[int]
    grid: np.ndarray
    finite_pdf: np.ndarray
    maxwell_pdf: np.ndarray
    sup_norm: list[float] = field(default_factory=list)
    total_variation: list[float] = field(default_factory=list)
    kl_divergence: list[float] = field(default_factory=list)

    def rows(self) -> list[dict]:
        return [
            {"n_molecules": n, "sup_norm": s, "total_variation": t, "kl_divergence": k}
            for n, s, t, k in zip(
                self.n_values, self.sup_norm, self.total_variation, self.kl_divergence
            )
        ]


def convergence_report(n_values: Sequence[int], grid) -> ConvergenceReport:
    """Distances between F_N and F_M for each N.

    ``grid`` is an array of reduced velocities (or a ``(min, max, points)``
    triple) and must cover [-4, 4]; the sup norm is taken over it.  TV and
    KL are integrals over the whole line and do not depend on the grid.
    """
    if isinstance(grid, tuple):
        grid = np.linspace(*grid[:2], int(grid[2]))
    grid = np.asarray(grid, dtype=float)
    if grid.min() > -4.0 or grid.max() < 4.0:
        raise DomainError("convergence grid must cover [-4, 4]")
    ns = [GasParams(n).N for n in n_values]
    fm = MaxwellianDistribution().pdf(grid)
    fn = np.vstack([pdf_dimensionless(n, grid) for n in ns]) if ns else np.empty((0, grid.size))
    report = ConvergenceReport(list(ns), grid, fn, fm)
    for row, n in zip(fn, ns):
        report.sup_norm.append(float(np.max(np.abs(row - fm))))
        report.total_variation.append(total_variation(n))
        report.kl_divergence.append(kl_divergence(n))
    return report


def prefactor_limit_gap(N):
    """|C_N - 1/sqrt(2 pi)| for the reduced prefactor, vectorized over N."""
    n = np.asarray(N, dtype=float)
    x = 0.5 * (n - 1.0)
    # exp(log C) - exp(-ln sqrt(2 pi)) written as a scaled expm1
    log_ratio = _log_gamma_ratio_excess(x, 0.5) + 0.5 * np.log1p(-1.0 / n)
    gap = np.abs(np.expm1(log_ratio)) / math.sqrt(2.0 * math.pi)
    return float(gap) if np.ndim(gap) == 0 else gap


@dataclass(frozen=True)
class GofResult:
    statistic: float
    p_value: float
    sample_count: int


KS_MIN_COUNT = 100


def ks_test(batch, cdf_fn: Callable) -> GofResult:
    """One-sample Kolmogorov-Smirnov test with the asymptotic p-value.

    Parameters
    ----------
    batch : SampleBatch or array_like
        Observations.
    cdf_fn : callable
        Vectorized CDF of the hypothesised law.

    Returns
    -------
    GofResult
        D_n = sup |F_emp - F| and P(K > sqrt(n) D_n) for the Kolmogorov
        limit law K.
    """
    values = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch, dtype=float)
    n = int(values.size)
    if n < KS_MIN_COUNT:
        raise DomainError(f"KS test needs at least {KS_MIN_COUNT} samples, got {n}")
    cdf_vals = np.asarray(cdf_fn(np.sort(values)), dtype=float)
    i = np.arange(1, n + 1)
    d_plus = np.max(i / n - cdf_vals)
    d_minus = np.max(cdf_vals - (i - 1) / n)
    d = float(max(d_plus, d_minus))
    return GofResult(d, float(kolmogorov(math.sqrt(n) * d)), n)


def autocorrelation(values, lag: int = 1) -> float:
    x = np.asarray(values, dtype=float)
    x = x - x.mean()
    denom = float(np.dot(x, x))
    if lag >= x.size or denom == 0.0:
        raise DomainError("autocorrelation needs more samples than the lag and non-constant data")
    return float(np.dot(x[:-lag], x[lag:]) / denom)


@dataclass
class Table:
    """Named numeric columns; ``int_columns`` are written without decimals."""

    columns: list[str]
    data: np.ndarray
    int_columns: frozenset = frozenset()

    def column(self, name: str) -> np.ndarray:
        return self.data[:, self.columns.index(name)]


FIGURE1_N = (3, 4, 5, 10)


def figure1_series(n_values: Sequence[int] = FIGURE1_N, step: float = 0.01) -> Table:
    """Reduced densities on a grid k*step covering [-sqrt(N_max), sqrt(N_max)].

    Columns are ``vbar``, one ``F<N>`` per requested N, and ``FM``.
    """
    n_values = [GasParams(n).N for n in n_values]
    kmax = int(math.floor(math.sqrt(max(n_values)) / step + 1e-9))
    grid = np.arange(-kmax, kmax + 1) * step
    cols = [grid] + [pdf_dimensionless(n, grid) for n in n_values]
    cols.append(MaxwellianDistribution().pdf(grid))
    names = ["vbar"] + [f"F{n}" for n in n_values] + ["FM"]
    return Table(names, np.column_stack(cols))


def figure2_series(n_max: int = 1000) -> Table:
    """gamma(N) for N = 1..n_max."""
    if isinstance(n_max, bool) or int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be an integer >= 1, got {n_max!r}")
    ns = np.arange(1, int(n_max) + 1)
    gam = np.array([gamma_factor(int(n)) for n in ns])
    return Table(["N", "gamma"], np.column_stack([ns, gam]), frozenset({"N"}))
