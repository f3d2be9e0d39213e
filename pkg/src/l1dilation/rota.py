"""Rota's reversed-martingale dilation of ``P^{2n}`` for reversible chains.

A self-adjoint, unital positive contraction ``P`` on ``L2(mu)`` of a finite
space is a reversible transition matrix with stationary law ``mu``.  The
stationary path measure on ``(x_0, ..., x_L)`` carries the decreasing
filtration ``F_n = sigma(x_n, ..., x_L)``; conditional expectations are
computed here by summing the path-mass tensor directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .interval_space import BUILD_TOL, PcFunction, make_partition
from .markov_ops import L1Operator, apply_operator

__all__ = [
    "PathSpace",
    "Hypotheses",
    "Conditional",
    "PowerLimit",
    "check_hypotheses",
    "reversed_conditional",
    "conditional_on_start",
    "rota_check",
    "rota_l_independence",
    "power_limit",
    "random_reversible_chain",
    "MAX_PATHS",
]

MAX_PATHS = 50_000_000


class Hypotheses(NamedTuple):
    positive: bool
    stochastic: bool
    detailed_balance: bool
    positivity_residual: float
    stochastic_residual: float
    balance_residual: float

    def __bool__(self) -> bool:
        return self.positive and self.stochastic and self.detailed_balance


def check_hypotheses(P: L1Operator, tol: float = BUILD_TOL) -> Hypotheses:
    mu = P.weights
    A = P.matrix
    pos = float(max(0.0, -A.min()))
    stoch = float(np.max(np.abs(A.sum(axis=1) - 1.0)))
    flow = mu[:, None] * A
    bal = float(np.max(np.abs(flow - flow.T)))
    return Hypotheses(pos <= tol, stoch <= tol, bal <= tol, pos, stoch, bal)


@dataclass(frozen=True, eq=False)
class PathSpace:
    """Stationary path measure of ``P`` on ``m^(L+1)`` paths."""

    P: L1Operator
    length: int
    mass: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        m, L = self.P.size, self.length
        if L < 0:
            raise ValueError("path length must be nonnegative")
        if m ** (L + 1) > MAX_PATHS:
            raise ValueError(f"{m}^{L + 1} paths exceed the enumeration limit {MAX_PATHS}")
        hyp = check_hypotheses(self.P)
        if not hyp.stochastic:
            raise ValueError(f"rows of P do not sum to 1 (residual {hyp.stochastic_residual!r})")
        if not hyp.detailed_balance:
            raise ValueError(f"P violates detailed balance (residual {hyp.balance_residual!r})")
        t = np.array(self.P.weights, dtype=float)
        for i in range(L):
            t = t[..., None] * self.P.matrix.reshape((1,) * i + (m, m))
        if abs(t.sum() - 1.0) > 1e-10:
            raise ValueError(f"path masses sum to {t.sum()!r}")
        t.setflags(write=False)
        object.__setattr__(self, "mass", t)

    @property
    def states(self) -> int:
        return self.P.size

    def lift(self, f: PcFunction) -> np.ndarray:
        """``f(x_0)`` as a function on paths (broadcast view)."""
        shape = (self.states,) + (1,) * self.length
        return np.broadcast_to(np.asarray(f.values).reshape(shape), self.mass.shape)


class Conditional(NamedTuple):
    values: np.ndarray
    null_atoms: np.ndarray


def reversed_conditional(ps: PathSpace, F, n: int) -> Conditional:
    """``E[F | x_n, ..., x_L]`` by summing over the prefixes ``x_0 .. x_{n-1}``.

    ``F`` is a :class:`PcFunction` (read as ``f(x_0)``) or an array over
    paths.  Conditioning atoms of zero mass get value 0 and are reported in
    ``null_atoms``.
    """
    if not 0 <= n <= ps.length:
        raise ValueError(f"n must lie in [0, {ps.length}]")
    G = ps.lift(F) if isinstance(F, PcFunction) else np.broadcast_to(F, ps.mass.shape)
    axes = tuple(range(n))
    num = np.sum(G * ps.mass, axis=axes)
    den = np.sum(ps.mass, axis=axes)
    null = den <= 0
    vals = np.divide(num, den, out=np.zeros_like(num), where=~null)
    shape = (1,) * n + vals.shape
    return Conditional(np.broadcast_to(vals.reshape(shape), ps.mass.shape), null)


def conditional_on_start(ps: PathSpace, G) -> np.ndarray:
    """``E[G | x_0]`` as a vector over states."""
    G = np.broadcast_to(G, ps.mass.shape)
    axes = tuple(range(1, ps.length + 1))
    num = np.sum(G * ps.mass, axis=axes)
    den = np.sum(ps.mass, axis=axes)
    return np.divide(num, den, out=np.zeros_like(num), where=den > 0)


def rota_value(ps: PathSpace, f: PcFunction, n: int) -> np.ndarray:
    return conditional_on_start(ps, reversed_conditional(ps, f, n).values)


def rota_check(ps: PathSpace, f: PcFunction, n: int) -> float:
    """``max |E^(E_n f) - P^{2n} f|``."""
    lhs = rota_value(ps, f, n)
    return float(np.max(np.abs(lhs - apply_operator(ps.P, f, 2 * n).values)))


def rota_l_independence(P: L1Operator, f: PcFunction, n: int) -> float:
    """Spread of ``E^(E_n f)`` over path lengths ``L = n .. 2n+2``."""
    vals = [rota_value(PathSpace(P, L), f, n) for L in range(n, 2 * n + 3)]
    return float(max(np.max(np.abs(v - vals[0])) for v in vals))


class PowerLimit(NamedTuple):
    limit: PcFunction
    converged: bool
    iterations: int
    spectral: PcFunction

    @property
    def discrepancy(self) -> float:
        return float(np.max(np.abs(self.limit.values - self.spectral.values)))


def power_limit(P: L1Operator, f: PcFunction, tol: float = 1e-10, max_iter: int = 10_000) -> PowerLimit:
    """``lim P^{2n} f`` by iteration, cross-checked by the spectral projection.

    ``P`` is symmetric in ``L2(mu)``, so ``P^{2n}`` converges to the
    projection onto the eigenspaces of ``P`` for eigenvalues ``+1`` and ``-1``.
    """
    hyp = check_hypotheses(P)
    if not hyp:
        raise ValueError(f"hypotheses fail: {hyp}")
    v = f.values
    converged = False
    it = 0
    P2 = P.matrix @ P.matrix
    while it < max_iter:
        w = P2 @ v
        it += 1
        if np.max(np.abs(w - v)) <= tol:
            converged = True
            v = w
            break
        v = w
    root = np.sqrt(P.weights)
    S = root[:, None] * P.matrix / root[None, :]
    evals, evecs = np.linalg.eigh(0.5 * (S + S.T))
    keep = np.abs(np.abs(evals) - 1.0) <= 1e-9
    U = evecs[:, keep]
    spectral = (U @ (U.T @ (root * f.values))) / root
    return PowerLimit(PcFunction(P.base, v), converged, it, PcFunction(P.base, spectral))


def random_reversible_chain(m: int, rng: np.random.Generator) -> L1Operator:
    """``P = D^-1 A`` for a random symmetric nonnegative ``A``; ``mu`` proportional to row sums."""
    A = rng.random((m, m))
    A = A + A.T
    rows = A.sum(axis=1)
    mu = rows / rows.sum()
    return L1Operator(make_partition(mu), A / rows[:, None])
