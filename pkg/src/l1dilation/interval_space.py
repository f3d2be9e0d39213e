"""Measure algebra on intervals.

A finite measure space is realized as a partition of ``[0, total)`` into
half-open cells whose lengths are the cell weights.  Functions and measure
densities are piecewise constant on such partitions, and the maps between
spaces are piecewise-affine bijections of intervals or rectangles.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "BUILD_TOL",
    "WeightedPartition",
    "PcFunction",
    "IntervalMeasure",
    "GridMeasure",
    "AffinePiece",
    "PwAffineBijection",
    "make_partition",
    "partition_from_breakpoints",
    "common_refinement",
    "integrate",
    "transport",
    "radon_nikodym",
    "measures_close",
]

BUILD_TOL = 1e-12

Box = tuple[tuple[float, float], ...]


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedPartition:
    """Partition of ``[0, total)`` into consecutive half-open cells.

    Breakpoints are the exact prefix sums of ``lengths`` and are computed
    once, here, so every consumer classifies boundary points identically.
    """

    lengths: np.ndarray
    labels: tuple = ()
    total: float | None = None
    breakpoints: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        lengths = _readonly(self.lengths)
        if lengths.ndim != 1 or lengths.size == 0:
            raise ValueError("a partition needs at least one cell")
        bad = np.flatnonzero(~(lengths > 0))
        if bad.size:
            raise ValueError(f"cell {int(bad[0])} has nonpositive length {lengths[bad[0]]!r}")
        bp = np.concatenate([[0.0], np.cumsum(lengths)])
        total = float(bp[-1]) if self.total is None else float(self.total)
        if abs(bp[-1] - total) > BUILD_TOL:
            raise ValueError(f"lengths sum to {bp[-1]!r}, expected total mass {total!r}")
        bp[-1] = total
        bp.setflags(write=False)
        labels = tuple(self.labels) if self.labels else tuple(range(lengths.size))
        if len(labels) != lengths.size:
            raise ValueError("one label per cell required")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "total", total)
        object.__setattr__(self, "breakpoints", bp)

    def __len__(self) -> int:
        return self.lengths.size

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, WeightedPartition)
            and len(self) == len(other)
            and np.array_equal(self.breakpoints, other.breakpoints)
        )

    __hash__ = None

    @property
    def midpoints(self) -> np.ndarray:
        return 0.5 * (self.breakpoints[:-1] + self.breakpoints[1:])

    def cell_of(self, x):
        """Index of the cell containing ``x`` (right-closed boundaries go right)."""
        x = np.asarray(x, dtype=float)
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        if np.any((idx < 0) | (idx >= len(self))):
            raise ValueError(f"point outside [0, {self.total})")
        return idx if idx.ndim else int(idx)

    def interval(self, i: int) -> tuple[float, float]:
        return float(self.breakpoints[i]), float(self.breakpoints[i + 1])

    def refines(self, other: "WeightedPartition") -> bool:
        """True when every breakpoint of ``other`` is (within tolerance) one of ours."""
        if abs(self.total - other.total) > BUILD_TOL:
            return False
        d = np.abs(other.breakpoints[:, None] - self.breakpoints[None, :]).min(axis=1)
        return bool(np.all(d <= BUILD_TOL))


def make_partition(weights: Sequence[float], labels: Sequence = (), total: float | None = None) -> WeightedPartition:
    """Partition with cells of the given lengths, laid out in order."""
    w = np.asarray(weights, dtype=float)
    bad = np.flatnonzero(~(w > 0))
    if bad.size:
        raise ValueError(f"weight at index {int(bad[0])} is not positive: {w[bad[0]]!r}")
    return WeightedPartition(w, tuple(labels), total)


def partition_from_breakpoints(points, tol: float = BUILD_TOL) -> WeightedPartition:
    """Partition whose breakpoints are ``points`` (sorted; near-duplicates merged)."""
    p = np.unique(np.asarray(points, dtype=float))
    keep = np.concatenate([[True], np.diff(p) > tol])
    p = p[keep]
    if p[0] != 0.0:
        if abs(p[0]) > tol:
            raise ValueError("breakpoints must start at 0")
        p[0] = 0.0
    return WeightedPartition(np.diff(p), total=float(p[-1]))


def common_refinement(p: WeightedPartition, q: WeightedPartition):
    """Coarsest partition refining both ``p`` and ``q``.

    Returns ``(r, into_p, into_q)`` where ``into_p[i]`` is the cell of ``p``
    containing cell ``i`` of ``r`` (likewise ``into_q``).
    """
    if abs(p.total - q.total) > BUILD_TOL:
        raise ValueError(f"total masses differ: {p.total!r} vs {q.total!r}")
    if p == q:
        idx = np.arange(len(p))
        return p, idx, idx
    pts = np.concatenate([p.breakpoints, q.breakpoints[1:-1]])
    r = partition_from_breakpoints(pts)
    r = WeightedPartition(r.lengths, total=p.total)
    mids = r.midpoints
    return r, p.cell_of(mids), q.cell_of(mids)


@dataclass(frozen=True, eq=False)
class PcFunction:
    """Function constant on each cell of ``base``."""

    base: WeightedPartition
    values: np.ndarray

    def __post_init__(self):
        v = _readonly(self.values)
        if v.shape != (len(self.base),):
            raise ValueError(f"expected {len(self.base)} values, got shape {v.shape}")
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, base: WeightedPartition, c: float = 1.0) -> "PcFunction":
        return cls(base, np.full(len(base), float(c)))

    def __call__(self, x):
        return self.values[self.base.cell_of(x)]

    def on(self, grid: WeightedPartition) -> "PcFunction":
        """Same function expressed on a refinement of its base."""
        if grid == self.base:
            return self
        if not grid.refines(self.base):
            raise ValueError("target grid does not refine the function's base")
        return PcFunction(grid, self(grid.midpoints))

    def __mul__(self, other: "PcFunction") -> "PcFunction":
        r, ia, ib = common_refinement(self.base, other.base)
        return PcFunction(r, self.values[ia] * other.values[ib])


@dataclass(frozen=True, eq=False)
class IntervalMeasure:
    """Absolutely continuous measure with piecewise-constant density."""

    base: WeightedPartition
    density: np.ndarray

    def __post_init__(self):
        d = _readonly(self.density)
        if d.shape != (len(self.base),):
            raise ValueError(f"expected {len(self.base)} densities, got shape {d.shape}")
        if np.any(d < 0):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "density", d)

    @classmethod
    def lebesgue(cls, base: WeightedPartition) -> "IntervalMeasure":
        return cls(base, np.ones(len(base)))

    @property
    def cell_masses(self) -> np.ndarray:
        return self.density * self.base.lengths

    @property
    def mass(self) -> float:
        return float(self.cell_masses.sum())

    def mass_of(self, a, b):
        """Measure of ``[a, b)``; vectorized over ``a`` and ``b``."""
        bp = self.base.breakpoints
        a = np.asarray(a, dtype=float)[..., None]
        b = np.asarray(b, dtype=float)[..., None]
        overlap = np.clip(np.minimum(b, bp[1:]) - np.maximum(a, bp[:-1]), 0.0, None)
        return (overlap * self.density).sum(axis=-1)

    def on(self, grid: WeightedPartition) -> "IntervalMeasure":
        if grid == self.base:
            return self
        if not grid.refines(self.base):
            raise ValueError("target grid does not refine the measure's base")
        return IntervalMeasure(grid, self.density[self.base.cell_of(grid.midpoints)])


@dataclass(frozen=True, eq=False)
class GridMeasure:
    """Measure on a product of two partitions with a density per rectangle."""

    x: WeightedPartition
    y: WeightedPartition
    density: np.ndarray

    def __post_init__(self):
        d = _readonly(self.density)
        if d.shape != (len(self.x), len(self.y)):
            raise ValueError("density shape does not match the grid")
        if np.any(d < 0):
            raise ValueError("densities must be nonnegative")
        object.__setattr__(self, "density", d)

    @classmethod
    def product(cls, mx: IntervalMeasure, my: IntervalMeasure) -> "GridMeasure":
        return cls(mx.base, my.base, np.outer(mx.density, my.density))

    @property
    def cell_masses(self) -> np.ndarray:
        return self.density * np.outer(self.x.lengths, self.y.lengths)

    @property
    def mass(self) -> float:
        return float(self.cell_masses.sum())

    def box_mass(self, box: Box) -> float:
        (x0, x1), (y0, y1) = box
        bx, by = self.x.breakpoints, self.y.breakpoints
        ox = np.clip(np.minimum(x1, bx[1:]) - np.maximum(x0, bx[:-1]), 0.0, None)
        oy = np.clip(np.minimum(y1, by[1:]) - np.maximum(y0, by[:-1]), 0.0, None)
        return float(ox @ self.density @ oy)

    def transpose(self) -> "GridMeasure":
        return GridMeasure(self.y, self.x, self.density.T)


def _box_volume(box: Box) -> float:
    return float(np.prod([hi - lo for lo, hi in box]))


def _intersect(a: Box, b: Box) -> Box | None:
    out = []
    for (a0, a1), (b0, b1) in zip(a, b):
        lo, hi = max(a0, b0), min(a1, b1)
        if hi - lo <= BUILD_TOL:
            return None
        out.append((lo, hi))
    return tuple(out)


@dataclass(frozen=True)
class AffinePiece:
    """Orientation-preserving axis-wise affine map of ``source`` onto ``target``."""

    source: Box
    target: Box
    slope: tuple[float, ...]
    offset: tuple[float, ...]

    @classmethod
    def between(cls, source: Box, target: Box) -> "AffinePiece":
        source = tuple((float(a), float(b)) for a, b in source)
        target = tuple((float(a), float(b)) for a, b in target)
        if len(source) != len(target):
            raise ValueError("source and target dimensions differ")
        slope = tuple((t1 - t0) / (s1 - s0) for (s0, s1), (t0, t1) in zip(source, target))
        if not all(s > 0 for s in slope):
            raise ValueError(f"piece {source} -> {target} is degenerate or reversing")
        offset = tuple(t0 - k * s0 for k, (s0, _), (t0, _) in zip(slope, source, target))
        return cls(source, target, slope, offset)

    @property
    def dim(self) -> int:
        return len(self.source)

    def forward(self, x):
        s0 = np.array([lo for lo, _ in self.source])
        t0 = np.array([lo for lo, _ in self.target])
        return t0 + (np.asarray(x) - s0) * np.array(self.slope)

    def backward(self, y):
        s0 = np.array([lo for lo, _ in self.source])
        t0 = np.array([lo for lo, _ in self.target])
        return s0 + (np.asarray(y) - t0) / np.array(self.slope)

    def image(self, box: Box) -> Box:
        lo = self.forward([a for a, _ in box])
        hi = self.forward([b for _, b in box])
        return tuple(zip(lo.tolist(), hi.tolist()))

    def preimage(self, box: Box) -> Box:
        lo = self.backward([a for a, _ in box])
        hi = self.backward([b for _, b in box])
        return tuple(zip(lo.tolist(), hi.tolist()))

    def inverted(self) -> "AffinePiece":
        return AffinePiece.between(self.target, self.source)


def _in_box(points: np.ndarray, box: Box) -> np.ndarray:
    mask = np.ones(points.shape[0], dtype=bool)
    for axis, (lo, hi) in enumerate(box):
        mask &= (points[:, axis] >= lo) & (points[:, axis] < hi)
    return mask


@dataclass(frozen=True)
class PwAffineBijection:
    """Invertible map assembled from affine pieces between boxes.

    Source boxes tile the domain and target boxes tile the codomain, up to
    boundaries.  Pieces of zero volume are dropped at construction.
    """

    pieces: tuple[AffinePiece, ...]
    domain: Box
    codomain: Box

    def __post_init__(self):
        if not self.pieces:
            raise ValueError("a bijection needs at least one piece")
        dims = {p.dim for p in self.pieces}
        if len(dims) != 1 or dims != {len(self.domain)} or len(self.codomain) != len(self.domain):
            raise ValueError("inconsistent piece dimensions")
        for side, whole in (("source", self.domain), ("target", self.codomain)):
            vol = sum(_box_volume(getattr(p, side)) for p in self.pieces)
            if abs(vol - _box_volume(whole)) > 1e-10:
                raise ValueError(f"{side} boxes cover volume {vol!r}, expected {_box_volume(whole)!r}")
            boxes = [getattr(p, side) for p in self.pieces]
            for i in range(len(boxes)):
                for k in range(i + 1, len(boxes)):
                    if _intersect(boxes[i], boxes[k]) is not None:
                        raise ValueError(f"{side} boxes {i} and {k} overlap; map is not invertible")

    @classmethod
    def from_boxes(cls, pairs, domain: Box, codomain: Box) -> "PwAffineBijection":
        pieces = tuple(
            AffinePiece.between(s, t) for s, t in pairs if _box_volume(s) != 0 and _box_volume(t) != 0
        )
        return cls(pieces, tuple(domain), tuple(codomain))

    @classmethod
    def identity(cls, box: Box) -> "PwAffineBijection":
        box = tuple((float(a), float(b)) for a, b in box)
        return cls.from_boxes([(box, box)], box, box)

    @property
    def dim(self) -> int:
        return len(self.domain)

    def _map(self, points, side: str):
        raw = np.asarray(points, dtype=float)
        if self.dim == 1:
            pts = raw.reshape(-1, 1)
        elif raw.ndim == 1:
            pts = raw.reshape(1, -1)
        else:
            pts = raw
        if pts.shape[1] != self.dim:
            raise ValueError(f"expected {self.dim}-dimensional points")
        out = np.full_like(pts, np.nan)
        hit = np.zeros(pts.shape[0], dtype=bool)
        for p in self.pieces:
            box = p.source if side == "source" else p.target
            m = _in_box(pts, box) & ~hit
            if m.any():
                out[m] = p.forward(pts[m]) if side == "source" else p.backward(pts[m])
                hit |= m
        if not hit.all():
            bad = pts[~hit][0]
            raise ValueError(f"point {bad.tolist()} is not covered by any piece")
        return out.reshape(raw.shape)

    def apply(self, points):
        """Image of ``points`` (shape ``(d,)``, ``(n, d)``, or for ``d = 1`` a flat array)."""
        return self._map(points, "source")

    def invert(self, points):
        return self._map(points, "target")

    def inverse(self) -> "PwAffineBijection":
        return PwAffineBijection(tuple(p.inverted() for p in self.pieces), self.codomain, self.domain)

    def preimage(self, box: Box) -> list[Box]:
        """Boxes whose union is the preimage of ``box`` (one per overlapped piece)."""
        out = []
        for p in self.pieces:
            cut = _intersect(p.target, box)
            if cut is not None:
                out.append(p.preimage(cut))
        return out

    def then(self, other: "PwAffineBijection") -> "PwAffineBijection":
        """The composition ``other ∘ self``."""
        pairs = []
        for p in self.pieces:
            for q in other.pieces:
                cut = _intersect(p.target, q.source)
                if cut is None:
                    continue
                pairs.append((p.preimage(cut), q.image(cut)))
        return PwAffineBijection.from_boxes(pairs, self.domain, other.codomain)

    def breakpoints(self, axis: int = 0, side: str = "source") -> np.ndarray:
        pts = set()
        for p in self.pieces:
            lo, hi = (p.source if side == "source" else p.target)[axis]
            pts.update((lo, hi))
        return np.array(sorted(pts))


def integrate(f: PcFunction, m: IntervalMeasure) -> float:
    """``∫ f dm`` summed on the common refinement of the two grids."""
    r, i_f, i_m = common_refinement(f.base, m.base)
    return float(np.sum(f.values[i_f] * m.density[i_m] * r.lengths))


def transport(rho: PwAffineBijection, m: IntervalMeasure) -> IntervalMeasure:
    """Pushforward of ``m`` under a one-dimensional piecewise-affine bijection.

    Each target piece is split at the images of ``m``'s breakpoints, so the
    result is exact even when ``m`` is not uniform on a source piece.
    """
    if rho.dim != 1:
        raise ValueError("transport acts on one-dimensional maps")
    (d0, d1), = rho.domain
    if abs(d0) > BUILD_TOL or abs(d1 - m.base.total) > BUILD_TOL:
        raise ValueError(f"map domain [{d0}, {d1}) does not match the measure's support [0, {m.base.total})")
    pts = [rho.codomain[0][0], rho.codomain[0][1]]
    for p in rho.pieces:
        (s0, s1), = p.source
        (t0, t1), = p.target
        pts += [t0, t1]
        inner = m.base.breakpoints[(m.base.breakpoints > s0) & (m.base.breakpoints < s1)]
        pts += list(p.forward(inner[:, None])[:, 0]) if inner.size else []
    grid = partition_from_breakpoints(pts)
    bp = grid.breakpoints
    src = rho.invert(grid.midpoints)
    # map each target cell back through the piece holding its midpoint
    masses = np.empty(len(grid))
    for i, x in enumerate(src):
        piece = next(p for p in rho.pieces if p.source[0][0] <= x < p.source[0][1])
        (a, b), = piece.preimage(((bp[i], bp[i + 1]),))
        masses[i] = m.mass_of(a, b)
    return IntervalMeasure(grid, masses / grid.lengths)


def radon_nikodym(nu: IntervalMeasure, mu: IntervalMeasure, tol: float = 1e-15) -> PcFunction:
    """Density ``dnu/dmu`` as a cellwise ratio on the common refinement."""
    r, i_nu, i_mu = common_refinement(nu.base, mu.base)
    dn, dm = nu.density[i_nu], mu.density[i_mu]
    bad = np.flatnonzero((dm <= 0) & (dn > tol))
    if bad.size:
        a, b = r.interval(int(bad[0]))
        raise ValueError(f"nu is not absolutely continuous w.r.t. mu on cell [{a}, {b})")
    out = np.divide(dn, dm, out=np.zeros_like(dn), where=dm > 0)
    return PcFunction(r, out)


def measures_close(a: IntervalMeasure, b: IntervalMeasure) -> float:
    """Largest cellwise mass difference on the common refinement."""
    r, ia, ib = common_refinement(a.base, b.base)
    return float(np.max(np.abs((a.density[ia] - b.density[ib]) * r.lengths)))
