"""Finite-scale construction of Akcoglu's dilation of an L1 positive contraction.

The base space ``J_0`` is a weighted partition with Lebesgue measure on each
cell (so ``mu`` of a cell is its length).  Every other coordinate ``J_i`` is
``[0, 1)`` with Lebesgue measure.  An integral-preserving positive
contraction ``T`` is encoded by an equivalence

    phi : J_{-1} x J_0 -> J_0 x J_1,   B_jk x I_k -> I_j x S_jk,

affine on each piece, with ``|B_jk| = mu_j T_jk / mu_k`` and
``|S_jk| = T_jk / (T1)_j``.  The shift ``tau`` twisted by ``phi`` at the
seam between coordinates 0 and 1 induces the transfer operator ``Q``, and
averaging out every coordinate except ``x_0`` recovers ``T^n`` from ``Q^n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .interval_space import (
    BUILD_TOL,
    GridMeasure,
    IntervalMeasure,
    PcFunction,
    PwAffineBijection,
    WeightedPartition,
    make_partition,
    partition_from_breakpoints,
)
from .markov_ops import (
    L1Operator,
    MarkovKernel,
    apply_operator,
    classify,
    conditional_expectation,
    kernel_joint_measure,
)

__all__ = [
    "Coupling",
    "WindowPoint",
    "GridFunction",
    "make_integral_preserving",
    "build_coupling",
    "coupling_residuals",
    "verify_phi_transport",
    "verify_main_result",
    "main_result_quadrature",
    "tau_apply",
    "window_density",
    "q_apply_pointwise",
    "q_apply_batch",
    "path_weights",
    "expectation_EQn",
    "verify_dilation",
    "expectation_Q_grid",
    "expectation_QE_grid",
    "verify_EQE",
    "verify_tau_transport",
    "verify_window_density",
]


@dataclass(frozen=True, eq=False)
class Coupling:
    """``phi`` together with the data it was built from.

    ``blocks[j, k] = |B_jk|`` (laid out in ``J_{-1}`` by increasing ``j`` for
    each ``k``) and ``slices[j, k] = |S_jk|`` (laid out in ``J_1`` by
    increasing ``k`` for each ``j``).
    """

    T: L1Operator
    T1: PcFunction
    nu: IntervalMeasure
    alpha: MarkovKernel
    blocks: np.ndarray
    slices: np.ndarray
    phi: PwAffineBijection

    @property
    def base(self) -> WeightedPartition:
        return self.T.base

    @property
    def mu(self) -> IntervalMeasure:
        return IntervalMeasure.lebesgue(self.base)

    @property
    def size(self) -> int:
        return self.T.size


def make_integral_preserving(T: L1Operator):
    """Extend ``T`` by an absorbing cemetery cell of weight 1.

    The cemetery row collects the deficit ``mu_j - sum_i mu_i T_ij`` of each
    column, which makes the extension integral preserving.  Returns
    ``(T_ext, embed, project)`` with ``embed`` the zero padding and
    ``project`` the restriction to the original cells.
    """
    flags = classify(T)
    if not flags.positive or not flags.contraction:
        raise ValueError(
            f"not a positive contraction (positive={flags.positive}, norm={flags.norm!r})"
        )
    m = T.size
    deficit = np.clip(flags.deficit, 0.0, None)
    ext = np.zeros((m + 1, m + 1))
    ext[:m, :m] = T.matrix
    ext[m, :m] = deficit
    ext[m, m] = 1.0
    labels = tuple(T.base.labels) + ("cemetery",)
    base = make_partition(list(T.weights) + [1.0], labels=labels)
    embed = np.vstack([np.eye(m), np.zeros((1, m))])
    project = embed.T.copy()
    return L1Operator(base, ext), embed, project


def _layout(lengths: np.ndarray, end: float = 1.0) -> np.ndarray:
    bp = np.concatenate([[0.0], np.cumsum(lengths)])
    # snap from the end of the last nonempty piece so trailing empty pieces
    # cannot leave a sliver uncovered
    pos = np.flatnonzero(np.asarray(lengths) > 0)
    bp[(pos[-1] + 1 if pos.size else len(bp) - 1):] = end
    return bp


def _assemble(T: L1Operator, blocks: np.ndarray, slices: np.ndarray) -> PwAffineBijection:
    base_bp = T.base.breakpoints
    m = T.size
    block_bp = [_layout(blocks[:, k]) for k in range(m)]
    slice_bp = [_layout(slices[j, :]) for j in range(m)]
    pairs = []
    for j in range(m):
        for k in range(m):
            if T.matrix[j, k] <= 0:
                continue
            src = ((block_bp[k][j], block_bp[k][j + 1]), (base_bp[k], base_bp[k + 1]))
            dst = ((base_bp[j], base_bp[j + 1]), (slice_bp[j][k], slice_bp[j][k + 1]))
            pairs.append((src, dst))
    total = T.base.total
    return PwAffineBijection.from_boxes(pairs, ((0.0, 1.0), (0.0, total)), ((0.0, total), (0.0, 1.0)))


def build_coupling(T: L1Operator) -> Coupling:
    """Construct ``{alpha}`` and ``phi`` for an integral-preserving positive contraction."""
    flags = classify(T)
    if not (flags.positive and flags.contraction and flags.integral_preserving):
        raise ValueError(
            "build_coupling needs an integral-preserving positive contraction "
            f"(positive={flags.positive}, contraction={flags.contraction}, "
            f"integral_preserving={flags.integral_preserving})"
        )
    A = np.clip(T.matrix, 0.0, None)
    mu = T.weights
    t1 = A.sum(axis=1)
    low = np.flatnonzero(t1 <= BUILD_TOL)
    if low.size:
        raise ValueError(f"(T1) vanishes on cell {int(low[0])}; such rows are not supported")
    blocks = mu[:, None] * A / mu[None, :]
    slices = A / t1[:, None]
    for k, s in enumerate(blocks.sum(axis=0)):
        if abs(s - 1.0) > BUILD_TOL:
            raise ValueError(f"blocks of column {k} sum to {s!r}")
    phi = _assemble(T, blocks, slices)
    block_grid = partition_from_breakpoints(
        np.concatenate([_layout(blocks[:, k]) for k in range(T.size)])
    )
    alpha = MarkovKernel.constant(T.base, IntervalMeasure.lebesgue(block_grid))
    T1 = PcFunction(T.base, t1)
    return Coupling(T, T1, IntervalMeasure(T.base, t1), alpha, blocks, slices, phi)


def _piece_cells(c: Coupling):
    """``(j, k)`` for each piece of ``phi``, read off the piece geometry."""
    out = []
    for p in c.phi.pieces:
        (_, _), (y0, y1) = p.source
        (x0, x1), (_, _) = p.target
        out.append((c.base.cell_of(0.5 * (x0 + x1)), c.base.cell_of(0.5 * (y0 + y1))))
    return out


def coupling_residuals(c: Coupling, n_points: int = 200, seed: int = 0) -> dict:
    """Residuals of every structural invariant of a coupling."""
    mu = c.T.weights
    A = c.T.matrix
    res = {}
    res["block_sums"] = float(np.max(np.abs(c.blocks.sum(axis=0) - 1.0)))
    res["slice_sums"] = float(np.max(np.abs(c.slices.sum(axis=1) - 1.0)))
    src_measure = kernel_joint_measure(c.mu, c.alpha).transpose()
    lam = IntervalMeasure.lebesgue(make_partition([1.0]))
    dst_measure = GridMeasure.product(c.nu, lam)
    worst = 0.0
    for p, (j, k) in zip(c.phi.pieces, _piece_cells(c)):
        want = mu[j] * A[j, k]
        worst = max(worst, abs(src_measure.box_mass(p.source) - want), abs(dst_measure.box_mass(p.target) - want))
    res["piece_mass"] = worst
    rng = np.random.default_rng(seed)
    pts = rng.random((n_points, 2)) * np.array([1.0, c.base.total])
    back = c.phi.invert(c.phi.apply(pts))
    res["roundtrip"] = float(np.max(np.abs(back - pts)))
    res["nu_mass"] = abs(c.nu.mass - c.mu.mass)
    return res


def verify_phi_transport(c: Coupling) -> float:
    """Largest per-piece gap between ``({alpha} x mu)(source)`` and ``(nu x lambda)(image)``."""
    src_measure = kernel_joint_measure(c.mu, c.alpha).transpose()
    lam = IntervalMeasure.lebesgue(make_partition([1.0]))
    dst_measure = GridMeasure.product(c.nu, lam)
    return max(abs(src_measure.box_mass(p.source) - dst_measure.box_mass(p.target)) for p in c.phi.pieces)


def verify_main_result(c: Coupling, f: PcFunction) -> float:
    """Compare ``(T1)_j sum_k |S_jk| f_k`` (slice lengths read from ``phi``) with ``Tf``."""
    lhs = np.zeros(c.size)
    for p, (j, k) in zip(c.phi.pieces, _piece_cells(c)):
        (_, _), (s0, s1) = p.target
        lhs[j] += (s1 - s0) * f.values[k]
    lhs *= c.T1.values
    return float(np.max(np.abs(lhs - apply_operator(c.T, f, 1).values)))


def main_result_quadrature(c: Coupling, f: PcFunction, refine: int = 10) -> float:
    """Same comparison, with the ``x_1`` integral done by midpoint quadrature.

    The integrand ``x_1 -> f(phi^-1_0(x_0, x_1))`` is evaluated pointwise
    through ``phi`` on a grid ``refine`` times finer than the slice grid.
    """
    lhs = np.zeros(c.size)
    for j in range(c.size):
        x0 = c.base.midpoints[j]
        cuts = [0.0, 1.0]
        for p in c.phi.pieces:
            (a, b), (s0, s1) = p.target
            if a <= x0 < b:
                cuts += [s0, s1]
        coarse = np.unique(cuts)
        fine = np.concatenate(
            [np.linspace(lo, hi, refine + 1)[:-1] for lo, hi in zip(coarse[:-1], coarse[1:])] + [[1.0]]
        )
        mids = 0.5 * (fine[:-1] + fine[1:])
        pts = np.column_stack([np.full_like(mids, x0), mids])
        vals = f(c.phi.invert(pts)[:, 1])
        lhs[j] = c.T1.values[j] * np.sum(vals * np.diff(fine))
    return float(np.max(np.abs(lhs - apply_operator(c.T, f, 1).values)))


@dataclass(frozen=True)
class WindowPoint:
    """Coordinates ``x_i`` for ``i`` in ``[start, start + len(values) - 1]``.

    Coordinate 0 lives in ``J_0 = [0, total)``; all others in ``[0, 1)``.
    """

    start: int
    values: tuple[float, ...]

    @classmethod
    def from_mapping(cls, coords: dict) -> "WindowPoint":
        idx = sorted(coords)
        if idx != list(range(idx[0], idx[-1] + 1)):
            raise ValueError("window indices must be contiguous")
        return cls(idx[0], tuple(float(coords[i]) for i in idx))

    @property
    def L(self) -> int:
        return -self.start

    @property
    def R(self) -> int:
        return self.start + len(self.values) - 1

    def __getitem__(self, i: int) -> float:
        if not self.start <= i <= self.R:
            raise KeyError(f"coordinate {i} outside window [{self.start}, {self.R}]")
        return self.values[i - self.start]

    def as_dict(self) -> dict:
        return {self.start + n: v for n, v in enumerate(self.values)}


def tau_apply(c: Coupling, w: WindowPoint, direction: str = "forward") -> WindowPoint:
    """One step of ``tau`` (or ``tau^-1``) on a finite window.

    Forward maps ``[-L, R]`` to ``[-L+1, R+1]`` and needs ``L >= 1``;
    inverse maps ``[-L, R]`` to ``[-L-1, R-1]`` and needs ``R >= 1``.
    """
    x = w.as_dict()
    if direction == "forward":
        if w.L < 1 or w.R < 0:
            raise ValueError(f"forward tau needs a window covering [-1, 0]; got [{w.start}, {w.R}]")
        y0, y1 = c.phi.apply((x[-1], x[0]))
        out = {i + 1: v for i, v in x.items() if i not in (-1, 0)}
        out[0], out[1] = float(y0), float(y1)
    elif direction == "inverse":
        if w.R < 1 or w.L < 0:
            raise ValueError(f"inverse tau needs a window covering [0, 1]; got [{w.start}, {w.R}]")
        y_1, y0 = c.phi.invert((x[0], x[1]))
        out = {i - 1: v for i, v in x.items() if i not in (0, 1)}
        out[-1], out[0] = float(y_1), float(y0)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    return WindowPoint.from_mapping(out)


def window_density(c: Coupling, w: WindowPoint) -> float:
    """``dnu_inf / dmu_inf`` at ``w``: the value of ``T1`` at ``x_0``."""
    try:
        x0 = w[0]
    except KeyError:
        raise ValueError("window does not contain coordinate 0") from None
    return float(c.T1(x0))


def _same_base(c: Coupling, f: PcFunction) -> None:
    if f.base != c.base:
        raise ValueError("f is not defined on the partition of the coupling")


def q_apply_pointwise(c: Coupling, f: PcFunction, n: int, w: WindowPoint) -> float:
    """``(Q^n f)(w)`` for ``f`` depending on ``x_0`` only."""
    _same_base(c, f)
    if w.L < 0 or w.R < n:
        raise ValueError(f"Q^{n} needs a window covering [0, {n}]; got [{w.start}, {w.R}]")
    weight = 1.0
    for _ in range(n):
        weight *= window_density(c, w)
        w = tau_apply(c, w, "inverse")
    return weight * float(f(w[0]))


def q_apply_batch(c: Coupling, f: PcFunction, x0, future: np.ndarray) -> np.ndarray:
    """Vectorized ``(Q^n f)`` at points ``(x_0, x_1, ..., x_n)``.

    ``future`` has shape ``(samples, n)`` and holds ``x_1 .. x_n``.
    """
    _same_base(c, f)
    future = np.asarray(future, dtype=float)
    x = np.broadcast_to(np.asarray(x0, dtype=float), future.shape[:1]).copy()
    weight = np.ones_like(x)
    t1 = c.T1.values
    for i in range(future.shape[1]):
        weight *= t1[c.base.cell_of(x)]
        x = c.phi.invert(np.column_stack([x, future[:, i]]))[:, 1]
    return weight * f(x)


def path_weights(c: Coupling) -> np.ndarray:
    """``W[j, k] = (T1)_j |S_jk|`` measured from the pieces of ``phi``.

    ``(T1)_j`` is the ratio of source to target area (the inverse Jacobian)
    and ``|S_jk|`` is the height of the target box.
    """
    W = np.zeros((c.size, c.size))
    for p, (j, k) in zip(c.phi.pieces, _piece_cells(c)):
        (a0, a1), (b0, b1) = p.source
        (u0, u1), (v0, v1) = p.target
        src_area = (a1 - a0) * (b1 - b0)
        dst_area = (u1 - u0) * (v1 - v0)
        W[j, k] = src_area / dst_area * (v1 - v0)
    return W


def expectation_EQn(c: Coupling, f: PcFunction, n: int) -> PcFunction:
    """``E Q^n f`` by explicit enumeration of all cell paths of length ``n``.

    Each path ``j = k_0 -> k_1 -> ... -> k_n`` contributes the product of its
    step weights times ``f_{k_n}``.  No matrix products are formed.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    _same_base(c, f)
    m = c.size
    if n == 0:
        return PcFunction(c.base, f.values)
    W = path_weights(c)
    # paths[:, i] is k_i; rows enumerate m^(n+1) paths in lexicographic order
    paths = np.indices((m,) * (n + 1)).reshape(n + 1, -1).T
    w = np.ones(paths.shape[0])
    for i in range(n):
        w *= W[paths[:, i], paths[:, i + 1]]
    contrib = (w * f.values[paths[:, -1]]).reshape(m, -1)
    return PcFunction(c.base, contrib.sum(axis=1))


def verify_dilation(T: L1Operator, f: PcFunction, N: int) -> np.ndarray:
    """``max_cell |E Q^n f - T^n f|`` for ``n = 0..N``.

    Non-integral-preserving ``T`` is first extended by a cemetery cell and
    compared back through the restriction.
    """
    flags = classify(T)
    if flags.integral_preserving and flags.positive and flags.contraction:
        Tp, embed, project = T, np.eye(T.size), np.eye(T.size)
    else:
        Tp, embed, project = make_integral_preserving(T)
    c = build_coupling(Tp)
    fp = PcFunction(Tp.base, embed @ f.values)
    out = np.empty(N + 1)
    for n in range(N + 1):
        lhs = project @ expectation_EQn(c, fp, n).values
        out[n] = np.max(np.abs(lhs - apply_operator(T, f, n).values))
    return out


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Function of ``(x_0, x_1)`` constant on the cells of ``x`` times ``y``."""

    x: WeightedPartition
    y: WeightedPartition
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float)
        if v.shape != (len(self.x), len(self.y)):
            raise ValueError("values shape does not match the grid")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __call__(self, x0, x1):
        return self.values[self.x.cell_of(x0), self.y.cell_of(x1)]


def expectation_Q_grid(c: Coupling, f: GridFunction) -> PcFunction:
    """``E Q f`` for ``f(x_0, x_1)``, integrating ``x_1, x_2`` through ``tau^-1``.

    ``(Qf)(x) = (T1)(x_0) f(tau^-1 x)`` depends on ``(x_0, x_1, x_2)``; for
    ``x_0`` in a base cell the integrand is piecewise constant in
    ``(x_1, x_2)`` on a grid assembled from the pieces of ``phi``, so the
    midpoint rule on that grid is exact.
    """
    if not f.x.refines(c.base):
        raise ValueError("the x_0 grid of f must refine the base partition")
    out = np.empty(c.size)
    x2 = f.y.midpoints
    for j in range(c.size):
        x0 = c.base.midpoints[j]
        cuts = [0.0, 1.0]
        for p in c.phi.pieces:
            (a, b), (s0, s1) = p.target
            if not a <= x0 < b:
                continue
            cuts += [s0, s1]
            (_, _), (y0, y1) = p.source
            inner = f.x.breakpoints[(f.x.breakpoints > y0) & (f.x.breakpoints < y1)]
            cuts += [p.forward(np.array([0.0, y]))[1] for y in inner]
        x1_grid = partition_from_breakpoints(cuts)
        x1 = x1_grid.midpoints
        # tau^-1 sends (x_0, x_1, x_2) to x_0' = phi^-1(x_0, x_1)_0 and x_1' = x_2
        new_x0 = c.phi.invert(np.column_stack([np.full(x1.size, x0), x1]))[:, 1]
        vals = f(new_x0[:, None], x2[None, :])
        area = np.outer(x1_grid.lengths, f.y.lengths)
        out[j] = window_density(c, WindowPoint(0, (x0,))) * np.sum(vals * area)
    return PcFunction(c.base, out)


def expectation_QE_grid(c: Coupling, f: GridFunction) -> PcFunction:
    """``E Q E f``: average out ``x_1`` first, then push lengths through the slices."""
    kernel = MarkovKernel.constant(f.x, IntervalMeasure.lebesgue(f.y))
    Ef = conditional_expectation(kernel, f.values)
    owner = c.base.cell_of(f.x.midpoints)
    # integral of Ef over I_k, in mu-measure
    per_cell = np.bincount(owner, weights=Ef.values * f.x.lengths, minlength=c.size)
    # x_1 in S_jk pulls back affinely onto I_k, scaling lengths by |S_jk| / |I_k|
    inner = c.slices @ (per_cell / c.base.lengths)
    return PcFunction(c.base, c.T1.values * inner)


def verify_EQE(c: Coupling, f: GridFunction) -> float:
    lhs = expectation_Q_grid(c, f)
    rhs = expectation_QE_grid(c, f)
    return float(np.max(np.abs(lhs.values - rhs.values)))


def _split(grid: WeightedPartition, parts: int) -> WeightedPartition:
    pts = [np.linspace(a, b, parts + 1) for a, b in zip(grid.breakpoints[:-1], grid.breakpoints[1:])]
    return partition_from_breakpoints(np.concatenate(pts))


def _seam_grids(c: Coupling):
    x_grid = _split(c.base, 2)
    y_pts = np.concatenate([c.phi.breakpoints(axis=1, side="target")])
    y_grid = _split(partition_from_breakpoints(y_pts), 2)
    return x_grid, y_grid


def _seam_masses(c: Coupling):
    """Pushforward and target masses on a grid of the ``(x_0, x_1)`` seam.

    Pushforward mass of a grid box is the ``{alpha} x mu`` measure of its
    preimage under ``phi``; target mass is its ``nu x lambda`` measure.
    """
    x_grid, y_grid = _seam_grids(c)
    src_measure = kernel_joint_measure(c.mu, c.alpha).transpose()
    lam = IntervalMeasure.lebesgue(make_partition([1.0]))
    dst_measure = GridMeasure.product(c.nu, lam)
    base_measure = GridMeasure.product(c.mu, lam)
    bx, by = x_grid.breakpoints, y_grid.breakpoints
    push, target, ref, mids = [], [], [], []
    for i in range(len(x_grid)):
        for k in range(len(y_grid)):
            box = ((bx[i], bx[i + 1]), (by[k], by[k + 1]))
            push.append(sum(src_measure.box_mass(b) for b in c.phi.preimage(box)))
            target.append(dst_measure.box_mass(box))
            ref.append(base_measure.box_mass(box))
            mids.append((0.5 * (bx[i] + bx[i + 1]), 0.5 * (by[k] + by[k + 1])))
    return np.array(push), np.array(target), np.array(ref), np.array(mids)


def _factor_grids(radius: int, rng):
    """Independent input/output partitions for every non-seam coordinate."""
    def rand_grid():
        cuts = np.sort(rng.random(3)) if rng is not None else np.array([0.2, 0.5, 0.8])
        return partition_from_breakpoints(np.concatenate([[0.0], cuts, [1.0]]))

    out_coords = [i for i in range(-radius + 1, radius + 2) if i not in (0, 1)]
    return {i: (rand_grid(), rand_grid()) for i in out_coords}


def verify_tau_transport(c: Coupling, radius: int = 2, seed: int | None = None) -> float:
    """Windowed check that ``tau`` carries ``mu_inf`` to ``nu_inf``.

    On ``[-radius, radius]`` the truncated ``mu_inf`` is Lebesgue on every
    coordinate but 0, where it is ``mu``.  Its image lives on
    ``[-radius+1, radius+1]`` and is compared with the truncated ``nu_inf``
    on a product grid: the seam boxes of ``(x_0, x_1)`` times cells of the
    other output coordinates, whose preimages are the same intervals one
    coordinate to the left.
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    rng = None if seed is None else np.random.default_rng(seed)
    push, target, _, _ = _seam_masses(c)
    for out_grid, in_grid in _factor_grids(radius, rng).values():
        src = IntervalMeasure.lebesgue(in_grid)  # the coordinate one to the left, before the shift
        bp = out_grid.breakpoints
        pushed = src.mass_of(bp[:-1], bp[1:])
        push = np.outer(push, pushed).ravel()
        target = np.outer(target, IntervalMeasure.lebesgue(out_grid).cell_masses).ravel()
    return float(np.max(np.abs(push - target)))


def verify_window_density(c: Coupling, radius: int = 2, seed: int | None = None) -> float:
    """Cellwise ``nu_inf / mu_inf`` against :func:`window_density` at the cell centre."""
    rng = None if seed is None else np.random.default_rng(seed)
    _, target, ref, mids = _seam_masses(c)
    dens = np.array([window_density(c, WindowPoint(0, (x0, x1))) for x0, x1 in mids])
    for out_grid, _ in _factor_grids(radius, rng).values():
        lam = IntervalMeasure.lebesgue(out_grid).cell_masses
        target = np.outer(target, lam).ravel()
        ref = np.outer(ref, lam).ravel()
        dens = np.repeat(dens, len(lam))
    return float(np.max(np.abs(target / ref - dens)))


def random_window(c: Coupling, lo: int, hi: int, rng) -> WindowPoint:
    vals = rng.random(hi - lo + 1)
    if lo <= 0 <= hi:
        vals[-lo] *= c.base.total
    return WindowPoint(lo, tuple(vals.tolist()))


def instance_A() -> L1Operator:
    """Doubly stochastic averaging on two equal cells."""
    return L1Operator(make_partition([0.5, 0.5]), [[0.5, 0.5], [0.5, 0.5]])


def instance_B() -> L1Operator:
    """``mu = (1/3, 2/3)``, ``T = [[0, 1], [1/2, 1/2]]``."""
    return L1Operator(make_partition([1 / 3, 2 / 3]), [[0.0, 1.0], [0.5, 0.5]])


def instance_C() -> L1Operator:
    """``diag(1/2, 1/2)`` on two equal cells; not integral preserving."""
    return L1Operator(make_partition([0.5, 0.5]), [[0.5, 0.0], [0.0, 0.5]])


def named_instances() -> dict[str, L1Operator]:
    return {"A": instance_A(), "B": instance_B(), "C": instance_C()}
