"""Seeded variates on the energy shell and from its one-molecule marginal.

Uniform points on the sphere sum(v**2) = E_bar come from normalizing a
vector of independent standard normals.  Standard normals are produced by
the Marsaglia polar method on top of numpy's PCG64 uniforms, so a seed
pins the whole sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import FiniteNDistribution, GasParams, MaxwellianDistribution
from .errors import DomainError

__all__ = [
    "ShellState",
    "SampleBatch",
    "make_rng",
    "standard_normals",
    "sample_joint",
    "sample_marginal",
    "sample_maxwellian",
]

SEED_MAX = 2**64 - 1

# above this the marginal is drawn as Z1 / sqrt(Z1^2 + chi2_{N-1})
DIRECT_PROJECTION_MAX_N = 10_000

# bound on normals generated per chunk when projecting full N-vectors
_CHUNK_NORMALS = 1 << 22


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= int(seed) <= SEED_MAX:
        raise DomainError(f"seed must be an integer in [0, 2**64 - 1], got {seed!r}")
    return int(seed)


def make_rng(seed) -> np.random.Generator:
    """PCG64 generator for a 64-bit unsigned seed; Generators pass through."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(check_seed(seed)))


def standard_normals(rng: np.random.Generator, size: int) -> np.ndarray:
    """Marsaglia polar method, vectorized.

    Pairs (u1, u2) uniform on the square [-1, 1)^2 are kept when
    0 < s = u1^2 + u2^2 < 1; each accepted pair yields two normals
    u * sqrt(-2 ln s / s).
    """
    out = np.empty(size)
    filled = 0
    while filled < size:
        need_pairs = (size - filled + 1) // 2
        # acceptance rate is pi/4; oversample so one pass usually suffices
        n_try = int(need_pairs / 0.78) + 16
        u = 2.0 * rng.random((n_try, 2)) - 1.0
        s = u[:, 0] ** 2 + u[:, 1] ** 2
        ok = (s > 0.0) & (s < 1.0)
        u, s = u[ok], s[ok]
        z = (u * np.sqrt(-2.0 * np.log(s) / s)[:, None]).ravel()
        take = min(z.size, size - filled)
        out[filled:filled + take] = z[:take]
        filled += take
    return out


@dataclass
class ShellState:
    """Velocities of all N molecules on the shell sum(v**2) = E_bar."""

    velocities: np.ndarray
    params: GasParams

    def __post_init__(self):
        self.velocities = np.asarray(self.velocities, dtype=float)
        if self.velocities.shape != (self.params.N,):
            raise DomainError(
                f"expected {self.params.N} velocities, got shape {self.velocities.shape}"
            )

    @property
    def energy_sum(self) -> float:
        """sum(v_i**2), to be compared with params.e_bar."""
        return float(np.dot(self.velocities, self.velocities))

    @property
    def radius(self) -> float:
        return math.sqrt(self.energy_sum)

    def copy(self) -> "ShellState":
        return ShellState(self.velocities.copy(), self.params)


@dataclass
class SampleBatch:
    """Velocity draws of one molecule plus the metadata needed to reproduce them."""

    values: np.ndarray
    params: GasParams
    seed: int | None

    @property
    def n_molecules(self) -> int:
        return self.params.N

    @property
    def count(self) -> int:
        return int(self.values.size)

    def metadata(self) -> dict:
        p = self.params
        return {
            "n_molecules": p.N,
            "mass": p.m,
            "boltzmann": p.k,
            "temperature": p.T,
            "seed": self.seed,
            "count": self.count,
        }


def _unit_direction(rng: np.random.Generator, n: int) -> np.ndarray:
    while True:
        z = standard_normals(rng, n)
        norm = math.sqrt(float(np.dot(z, z)))
        if norm > 0.0:
            return z / norm


def sample_joint(params: GasParams, rng) -> ShellState:
    """Draw a state uniform on the sphere of radius sqrt(E_bar) in R^N.

    ``rng`` is a seed or a ``numpy.random.Generator``.
    """
    gen = make_rng(rng)
    v = math.sqrt(params.e_bar) * _unit_direction(gen, params.N)
    return ShellState(v, params)


def sample_marginal(dist: FiniteNDistribution, rng, count: int) -> SampleBatch:
    """Draw ``count`` independent velocities of a single molecule.

    Each value is sqrt(E_bar) * Z1 / |Z| for a fresh N-vector of normals Z.
    Past ``DIRECT_PROJECTION_MAX_N`` molecules the squared norm of the other
    N - 1 components is drawn as a chi-square variate instead, which is the
    same law at O(1) cost per draw.
    """
    if isinstance(count, bool) or int(count) != count or count < 1:
        raise DomainError(f"count must be an integer >= 1, got {count!r}")
    count = int(count)
    seed = None if isinstance(rng, np.random.Generator) else check_seed(rng)
    gen = make_rng(rng)
    N = dist.N
    radius = dist.v_max
    if N <= DIRECT_PROJECTION_MAX_N:
        values = np.empty(count)
        rows = max(1, _CHUNK_NORMALS // N)
        done = 0
        while done < count:
            m = min(rows, count - done)
            z = standard_normals(gen, m * N).reshape(m, N)
            norm = np.sqrt(np.einsum("ij,ij->i", z, z))
            bad = norm == 0.0
            while np.any(bad):
                z[bad] = standard_normals(gen, int(bad.sum()) * N).reshape(-1, N)
                norm = np.sqrt(np.einsum("ij,ij->i", z, z))
                bad = norm == 0.0
            values[done:done + m] = z[:, 0] / norm
            done += m
    else:
        z1 = standard_normals(gen, count)
        rest = gen.chisquare(N - 1, size=count)
        values = z1 / np.sqrt(z1 * z1 + rest)
    return SampleBatch(radius * values, dist.params, seed)


def sample_maxwellian(dist: MaxwellianDistribution, rng, count: int) -> np.ndarray:
    """Gaussian velocities with variance kT/m (used for power checks)."""
    gen = make_rng(rng)
    return math.sqrt(dist.variance) * standard_normals(gen, int(count))
