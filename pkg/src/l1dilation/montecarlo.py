"""Monte Carlo estimates of ``E Q^n f`` from sampled window coordinates."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterator, NamedTuple

import numpy as np

from .akcoglu import Coupling, WindowPoint, _assemble, expectation_EQn, q_apply_batch
from .interval_space import PcFunction

__all__ = [
    "SampleConfig",
    "sample_coords",
    "sample_window",
    "mc_EQn",
    "MCComparison",
    "compare_mc_exact",
    "perturb_slices",
]

RESOLUTION = 1e-12


@dataclass(frozen=True)
class SampleConfig:
    seed: int
    samples: int
    horizon: int
    shards: int = 1

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.horizon < 0:
            raise ValueError("horizon must be nonnegative")
        if not 1 <= self.shards <= self.samples:
            raise ValueError("shards must lie in [1, samples]")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")


def _shard_sizes(cfg: SampleConfig) -> list[int]:
    q, r = divmod(cfg.samples, cfg.shards)
    return [q + (s < r) for s in range(cfg.shards)]


def sample_coords(cfg: SampleConfig) -> np.ndarray:
    """Uniform ``x_1 .. x_n`` for every sample, shape ``(samples, horizon)``.

    Shard ``s`` draws from a Philox stream keyed by ``seed ^ s``; shards are
    concatenated in order, so the result does not depend on how they are run.
    """
    parts = []
    for s, size in enumerate(_shard_sizes(cfg)):
        gen = np.random.Generator(np.random.Philox(key=cfg.seed ^ s))
        parts.append(gen.random((size, cfg.horizon)))
    return np.concatenate(parts, axis=0)


def sample_window(c: Coupling, cfg: SampleConfig, x0: float) -> Iterator[WindowPoint]:
    if not 0.0 <= x0 < c.base.total:
        raise ValueError(f"x0 must lie in [0, {c.base.total})")
    for row in sample_coords(cfg):
        yield WindowPoint(0, (float(x0),) + tuple(row.tolist()))


def mc_EQn(c: Coupling, f: PcFunction, cfg: SampleConfig, x0: float) -> tuple[float, float]:
    """Sample mean of ``(Q^n f)(x0, x_1, ..., x_n)`` and its standard error."""
    if cfg.horizon == 0:
        return float(f(x0)), 0.0
    vals = q_apply_batch(c, f, x0, sample_coords(cfg))
    if vals.size < 2:
        return float(vals.mean()), 0.0
    return float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(vals.size))


class MCComparison(NamedTuple):
    estimate: np.ndarray
    stderr: np.ndarray
    exact: np.ndarray
    z: np.ndarray

    @property
    def max_z(self) -> float:
        return float(np.max(self.z))

    def flagged(self, threshold: float = 4.0) -> np.ndarray:
        return np.flatnonzero(self.z > threshold)


def compare_mc_exact(c: Coupling, f: PcFunction, cfg: SampleConfig, exact: PcFunction | None = None) -> MCComparison:
    """z-score of the estimate at each cell midpoint against the exact path sum."""
    if exact is None:
        exact = expectation_EQn(c, f, cfg.horizon)
    est, err = [], []
    for x0 in c.base.midpoints:
        e, s = mc_EQn(c, f, cfg, x0)
        est.append(e)
        err.append(s)
    est, err = np.array(est), np.array(err)
    diff = np.abs(est - exact.values)
    # Cells where Q^n f is a.s. constant have roundoff-sized spread; floor the
    # error scale at the floating resolution of the values involved.
    floor = RESOLUTION * max(1.0, float(np.max(np.abs(f.values))), float(np.max(np.abs(exact.values))))
    scale = np.hypot(err, floor)
    z = diff / scale
    return MCComparison(est, err, exact.values, z)


def perturb_slices(c: Coupling, row: int, delta: float) -> Coupling:
    """Copy of ``c`` whose ``phi`` moves ``delta`` of slice length in ``row``.

    The first two positive slices of the row are shifted against each other;
    used as a negative control.
    """
    slices = np.array(c.slices)
    pos = np.flatnonzero(slices[row] > 0)
    if pos.size < 2:
        raise ValueError(f"row {row} has fewer than two slices")
    a, b = pos[:2]
    if not -slices[row, b] < delta < slices[row, a]:
        raise ValueError("delta would empty a slice")
    slices[row, a] -= delta
    slices[row, b] += delta
    return replace(c, slices=slices, phi=_assemble(c.T, c.blocks, slices))
