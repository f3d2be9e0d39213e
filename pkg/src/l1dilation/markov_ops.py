"""Operators on L1 of a weighted partition.

Matrix orientation: ``(Tf)_i = sum_j T[i, j] f_j``, so row ``i`` describes
the output cell ``i`` and ``T @ 1`` is the vector of row sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .interval_space import (
    BUILD_TOL,
    GridMeasure,
    IntervalMeasure,
    PcFunction,
    PwAffineBijection,
    WeightedPartition,
    common_refinement,
    partition_from_breakpoints,
    radon_nikodym,
    transport,
)

__all__ = [
    "L1Operator",
    "MarkovKernel",
    "Classification",
    "operator_norm_l1",
    "classify",
    "apply_operator",
    "kernel_joint_measure",
    "conditional_expectation",
    "FrobeniusPerron",
    "frobenius_perron",
    "verify_fp_adjoint",
    "check_power_dilation",
]


@dataclass(frozen=True, eq=False)
class L1Operator:
    base: WeightedPartition
    matrix: np.ndarray

    def __post_init__(self):
        a = np.array(self.matrix, dtype=float)
        m = len(self.base)
        if a.shape != (m, m):
            raise ValueError(f"matrix shape {a.shape} does not match {m} cells")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def weights(self) -> np.ndarray:
        return self.base.lengths

    @property
    def size(self) -> int:
        return len(self.base)

    def one(self) -> PcFunction:
        """``T1`` as a function on the base."""
        return PcFunction(self.base, self.matrix.sum(axis=1))


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """Family of probability measures on ``target`` indexed by cells of ``source``.

    ``density[s]`` is the density of the measure attached to source cell ``s``.
    """

    source: WeightedPartition
    target: WeightedPartition
    density: np.ndarray

    def __post_init__(self):
        d = np.array(self.density, dtype=float)
        if d.shape != (len(self.source), len(self.target)):
            raise ValueError("kernel density must have shape (source cells, target cells)")
        if np.any(d < 0):
            raise ValueError("kernel densities must be nonnegative")
        mass = d @ self.target.lengths
        bad = np.flatnonzero(np.abs(mass - 1.0) > BUILD_TOL)
        if bad.size:
            raise ValueError(f"row {int(bad[0])} has mass {mass[bad[0]]!r}, expected 1")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)

    @classmethod
    def constant(cls, source: WeightedPartition, row: IntervalMeasure) -> "MarkovKernel":
        return cls(source, row.base, np.tile(row.density, (len(source), 1)))

    def row(self, s: int) -> IntervalMeasure:
        return IntervalMeasure(self.target, self.density[s])

    @property
    def masses(self) -> np.ndarray:
        """``masses[s, t]`` is the mass that row ``s`` puts on target cell ``t``."""
        return self.density * self.target.lengths


class Classification(NamedTuple):
    positive: bool
    contraction: bool
    integral_preserving: bool
    norm: float
    deficit: np.ndarray

    def __bool__(self) -> bool:
        return self.positive and self.contraction


def operator_norm_l1(T: L1Operator) -> float:
    """``max_j sum_i mu_i |T_ij| / mu_j``; exact for positive ``T``."""
    mu = T.weights
    if not T.matrix.any():
        return 0.0
    return float(np.max(mu @ np.abs(T.matrix) / mu))


def classify(T: L1Operator, tol: float = BUILD_TOL) -> Classification:
    mu = T.weights
    deficit = mu - mu @ T.matrix
    norm = operator_norm_l1(T)
    return Classification(
        positive=bool(np.all(T.matrix >= -tol)),
        contraction=norm <= 1.0 + tol,
        integral_preserving=bool(np.all(np.abs(deficit) <= tol)),
        norm=norm,
        deficit=deficit,
    )


def apply_operator(T: L1Operator, f: PcFunction, n: int = 1) -> PcFunction:
    if f.base != T.base:
        raise ValueError("function and operator live on different partitions")
    if n < 0:
        raise ValueError("n must be nonnegative")
    v = f.values
    for _ in range(n):
        v = T.matrix @ v
    return PcFunction(T.base, v)


def kernel_joint_measure(theta: IntervalMeasure, eta: MarkovKernel) -> GridMeasure:
    """The measure ``theta x {eta}`` on the source x target grid.

    A cell ``A x M`` gets mass ``eta(M | A) * theta(A)``.
    """
    if theta.base != eta.source:
        raise ValueError("theta and the kernel source use different partitions")
    masses = theta.cell_masses[:, None] * eta.masses
    area = np.outer(eta.source.lengths, eta.target.lengths)
    return GridMeasure(eta.source, eta.target, masses / area)


def conditional_expectation(eta: MarkovKernel, f: np.ndarray) -> PcFunction:
    """Average out the target coordinate: ``(Ef)(s) = ∫ f(s, y) eta(dy | s)``.

    ``f`` holds one value per cell of the source x target grid.
    """
    f = np.asarray(f, dtype=float)
    if f.shape != eta.density.shape:
        raise ValueError(f"f has shape {f.shape}, expected {eta.density.shape}")
    return PcFunction(eta.source, np.sum(f * eta.masses, axis=1))


class FrobeniusPerron:
    """Transfer operator of an invertible piecewise-affine map.

    ``(Qf)(x) = (dnu/dmu)(x) f(h^-1 x)`` where ``nu`` is the transport of
    ``mu`` by ``h``.
    """

    def __init__(self, h: PwAffineBijection, mu: IntervalMeasure):
        if h.dim != 1:
            raise ValueError("only one-dimensional maps are supported")
        self.h = h
        self.mu = mu
        self.nu = transport(h, mu)
        self.density = radon_nikodym(self.nu, mu)

    def __call__(self, f: PcFunction) -> PcFunction:
        h = self.h
        pts = [self.density.base.breakpoints, h.breakpoints(side="target")]
        # images of f's jumps
        for p in h.pieces:
            (s0, s1), = p.source
            inner = f.base.breakpoints[(f.base.breakpoints > s0) & (f.base.breakpoints < s1)]
            if inner.size:
                pts.append(p.forward(inner[:, None])[:, 0])
        grid = partition_from_breakpoints(np.concatenate(pts))
        mids = grid.midpoints
        return PcFunction(grid, self.density(mids) * f(h.invert(mids)))


def frobenius_perron(h: PwAffineBijection, mu: IntervalMeasure) -> FrobeniusPerron:
    return FrobeniusPerron(h, mu)


def _integral_over(f: PcFunction, mu: IntervalMeasure, a: float, b: float) -> float:
    r, i_f, i_m = common_refinement(f.base, mu.base)
    bp = r.breakpoints
    overlap = np.clip(np.minimum(b, bp[1:]) - np.maximum(a, bp[:-1]), 0.0, None)
    return float(np.sum(overlap * f.values[i_f] * mu.density[i_m]))


def verify_fp_adjoint(h: PwAffineBijection, mu: IntervalMeasure, f: PcFunction, A) -> float:
    """``|∫_{h^-1 A} f dmu - ∫_A Qf dmu|`` for ``A`` a list of intervals."""
    Q = frobenius_perron(h, mu)
    Qf = Q(f)
    lhs = rhs = 0.0
    for a, b in A:
        rhs += _integral_over(Qf, mu, a, b)
        for (pa, pb), in h.preimage(((a, b),)):
            lhs += _integral_over(f, mu, pa, pb)
    return abs(lhs - rhs)


def check_power_dilation(A: L1Operator, B: L1Operator, embed, project, N: int) -> np.ndarray:
    """``max |project B^n embed - A^n|`` for ``n = 0..N``."""
    embed = np.asarray(embed, dtype=float)
    project = np.asarray(project, dtype=float)
    a, b = A.size, B.size
    if embed.shape != (b, a) or project.shape != (a, b):
        raise ValueError("embed must be (dim B, dim A) and project (dim A, dim B)")
    if np.max(np.abs(project @ embed - np.eye(a))) > BUILD_TOL:
        raise ValueError("project o embed is not the identity")
    out = np.empty(N + 1)
    An, Bn = np.eye(a), np.eye(b)
    for n in range(N + 1):
        out[n] = np.max(np.abs(project @ Bn @ embed - An))
        An, Bn = A.matrix @ An, B.matrix @ Bn
    return out
