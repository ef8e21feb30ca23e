"""Kac-style pair-rotation dynamics on the energy shell.

Each step picks an unordered pair of molecules uniformly and rotates their
velocity pair by a uniform random angle.  Pair energy, hence total energy,
is conserved and the uniform law on the shell is stationary, so the long
run one-molecule histogram must match the finite-N marginal even though
the dynamics never evaluates it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import GasParams
from .errors import DomainError
from .sampler import SampleBatch, ShellState, check_seed, make_rng, sample_joint

__all__ = [
    "SimConfig",
    "KacSimulation",
    "init_state",
    "collision_step",
    "run_and_collect",
    "energy_drift",
]

INIT_MODES = ("equal_speeds", "shell_uniform")

# rescale onto the shell this often to cancel rounding drift
RENORMALIZE_EVERY = 10_000


@dataclass(frozen=True)
class SimConfig:
    params: GasParams
    steps: int
    burn_in: int = 0
    sample_stride: int = 1
    seed: int = 0
    init_mode: str = "equal_speeds"

    def __post_init__(self):
        for name in ("steps", "burn_in", "sample_stride"):
            val = getattr(self, name)
            if isinstance(val, bool) or int(val) != val:
                raise DomainError(f"{name} must be an integer, got {val!r}")
        if self.steps < 0 or self.burn_in < 0:
            raise DomainError("steps and burn_in must be >= 0")
        if self.burn_in > self.steps:
            raise DomainError(f"burn_in ({self.burn_in}) exceeds steps ({self.steps})")
        if self.sample_stride < 1:
            raise DomainError("sample_stride must be >= 1")
        if self.init_mode not in INIT_MODES:
            raise DomainError(f"init_mode must be one of {INIT_MODES}, got {self.init_mode!r}")
        check_seed(self.seed)

    @property
    def expected_samples(self) -> int:
        return (self.steps - self.burn_in) // self.sample_stride


def energy_drift(state: ShellState) -> float:
    """Relative deviation |sum(v**2) - E_bar| / E_bar."""
    e_bar = state.params.e_bar
    return abs(state.energy_sum - e_bar) / e_bar


def init_state(config: SimConfig, rng=None) -> ShellState:
    """Starting state: all speeds equal with random signs, or a uniform shell draw."""
    gen = make_rng(config.seed if rng is None else rng)
    p = config.params
    if config.init_mode == "shell_uniform":
        return sample_joint(p, gen)
    speed = math.sqrt(p.e_bar / p.N)
    signs = np.where(gen.random(p.N) < 0.5, -1.0, 1.0)
    return ShellState(speed * signs, p)


def collision_step(state: ShellState, rng=None, *, pair=None, theta=None) -> ShellState:
    """Return a new state with one random pair rotated.

    ``pair`` and ``theta`` override the random choices (used to pin a step in
    tests); otherwise both are drawn from ``rng``.
    """
    N = state.params.N
    if N < 2:
        raise DomainError("a collision needs at least two molecules")
    if pair is None or theta is None:
        gen = make_rng(rng if rng is not None else 0)
    if pair is None:
        i = int(gen.integers(N))
        j = int(gen.integers(N - 1))
        if j >= i:
            j += 1
    else:
        i, j = pair
        if i == j:
            raise DomainError("collision pair must be two distinct molecules")
    if theta is None:
        theta = 2.0 * math.pi * float(gen.random())
    c, s = math.cos(theta), math.sin(theta)
    v = state.velocities.copy()
    vi, vj = v[i], v[j]
    v[i] = vi * c + vj * s
    v[j] = -vi * s + vj * c
    return ShellState(v, state.params)


class KacSimulation:
    """Sequential Kac run; one instance must not be shared between threads.

    Attributes
    ----------
    state : ShellState
        Current velocities.
    max_drift : float
        Largest relative energy drift observed (checked before every
        renormalization and at the end of a run).
    steps_done : int
    """

    def __init__(self, config: SimConfig):
        self.config = config
        self.rng = make_rng(config.seed)
        self.state = init_state(config, self.rng)
        self.max_drift = energy_drift(self.state)
        self.steps_done = 0

    def _check_and_renormalize(self, v: list) -> list:
        e_bar = self.config.params.e_bar
        total = math.fsum(x * x for x in v)
        self.max_drift = max(self.max_drift, abs(total - e_bar) / e_bar)
        scale = math.sqrt(e_bar / total)
        return [x * scale for x in v]

    def advance(self, n_steps: int, record_from: int | None = None) -> list:
        """Run ``n_steps`` collisions; record v[0] at global step numbers
        ``record_from + k * stride`` (k >= 1) when ``record_from`` is given.
        """
        N = self.config.params.N
        stride = self.config.sample_stride
        v = self.state.velocities.tolist()
        out = []
        remaining = n_steps
        while remaining > 0:
            # blocks end on renormalization boundaries
            block = min(remaining, RENORMALIZE_EVERY - self.steps_done % RENORMALIZE_EVERY)
            ii = self.rng.integers(N, size=block)
            jj = self.rng.integers(N - 1, size=block)
            jj = jj + (jj >= ii)
            theta = 2.0 * math.pi * self.rng.random(block)
            cs = np.cos(theta).tolist()
            sn = np.sin(theta).tolist()
            t0 = self.steps_done
            for t, (i, j, c, s) in enumerate(zip(ii.tolist(), jj.tolist(), cs, sn), start=t0 + 1):
                vi = v[i]
                vj = v[j]
                v[i] = vi * c + vj * s
                v[j] = vj * c - vi * s
                if record_from is not None and t > record_from and (t - record_from) % stride == 0:
                    out.append(v[0])
            self.steps_done += block
            remaining -= block
            if self.steps_done % RENORMALIZE_EVERY == 0:
                v = self._check_and_renormalize(v)
        self.state = ShellState(np.array(v), self.config.params)
        self.max_drift = max(self.max_drift, energy_drift(self.state))
        return out

    def run(self) -> SampleBatch:
        """Burn in, then record molecule 0 every ``sample_stride`` steps."""
        cfg = self.config
        self.advance(cfg.burn_in)
        values = self.advance(cfg.steps - cfg.burn_in, record_from=cfg.burn_in)
        return SampleBatch(np.array(values, dtype=float), cfg.params, cfg.seed)


def run_and_collect(config: SimConfig) -> SampleBatch:
    return KacSimulation(config).run()
