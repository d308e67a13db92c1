"""Exact L-infinity star discrepancy over point sets in the unit cube.

The supremum of |count([0,q))/n - vol([0,q))| over anchored half-open boxes
is attained on the critical grid built from the per-dimension point
coordinates (plus 1). Volume-deficit values use open counts on the full
grid; count-excess values are the limits of boxes approaching a corner from
above, which exist only below 1, so they use closed counts on corners
strictly inside the cube. This stays exact for point sets touching the
upper boundary, where a naive closed count would overestimate.

The grid scan is the package's hot kernel: a compiled Cython extension is
used when available, with a numpy fallback selected at import. Set
ASKBENCH_PURE_PYTHON=1 to force the fallback. Both backends produce
bit-identical results.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..errors import CapacityError, DomainError

_FORCE_PURE = os.environ.get("ASKBENCH_PURE_PYTHON", "") not in ("", "0")

if _FORCE_PURE:
    from . import _pykernel as _backend

    BACKEND = "python"
else:
    try:
        from . import _ckernel as _backend  # type: ignore[no-redef]

        BACKEND = "compiled"
    except ImportError:
        from . import _pykernel as _backend  # type: ignore[no-redef]

        BACKEND = "python"

MAX_CORNERS = 200_000_000
MAX_DIMENSION = 4

SIDE_DEFICIT = "open-deficit"
SIDE_EXCESS = "closed-excess"


@dataclass(frozen=True)
class PointSet:
    """n points in [0,1]^d; duplicates are allowed and counted."""

    points: np.ndarray

    def __init__(self, points):
        arr = np.ascontiguousarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise DomainError("a point set needs an (n, d) array with n, d >= 1")
        if np.any(arr < 0.0) or np.any(arr > 1.0):
            raise DomainError("point coordinates must lie in [0, 1]")
        object.__setattr__(self, "points", arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class CriticalGrid:
    """Per-dimension sorted unique coordinates, augmented with 1."""

    axes: tuple[np.ndarray, ...]

    @classmethod
    def from_points(cls, ps: PointSet) -> "CriticalGrid":
        axes = []
        for j in range(ps.d):
            vals = np.unique(ps.points[:, j])
            if vals[-1] != 1.0:
                vals = np.append(vals, 1.0)
            axes.append(vals)
        return cls(tuple(axes))

    @property
    def n_corners(self) -> int:
        out = 1
        for ax in self.axes:
            out *= len(ax)
        return out


@dataclass(frozen=True)
class WorstBox:
    """A box corner attaining the star discrepancy.

    ``defining_points[j]`` is the index of a point whose coordinate defines
    the corner in dimension j, or None when the corner sits on the boundary
    value 1 with no point there.
    """

    corner: tuple[float, ...]
    value: float
    side: str
    defining_points: tuple[int | None, ...]
    fallback: tuple[int, int] | None = None


def local_discrepancy(ps: PointSet, q, side: str | None = None) -> float:
    """Discrepancy of the single anchored box with corner q.

    The open term is vol([0,q)) minus the open-count proportion; the closed
    term is the supremum over boxes approaching q from above, so counts stay
    strict in dimensions where q is already 1.
    """
    q = np.asarray(q, dtype=float)
    if q.shape != (ps.d,):
        raise DomainError(f"corner must have dimension {ps.d}")
    if np.any(q < 0.0) or np.any(q > 1.0):
        raise DomainError("corner must lie in [0, 1]^d")
    pts = ps.points
    vol = 1.0
    for j in range(ps.d):
        vol *= q[j]
    inside_open = np.all(pts < q, axis=1)
    closed_mask = np.ones(ps.n, dtype=bool)
    for j in range(ps.d):
        if q[j] < 1.0:
            closed_mask &= pts[:, j] <= q[j]
        else:
            closed_mask &= pts[:, j] < 1.0
    deficit = vol - np.count_nonzero(inside_open) / ps.n
    excess = np.count_nonzero(closed_mask) / ps.n - vol
    if side == SIDE_DEFICIT:
        return float(deficit)
    if side == SIDE_EXCESS:
        return float(excess)
    if side is not None:
        raise DomainError(f"unknown side {side!r}")
    return float(max(deficit, excess))


def _largest_gap(ps: PointSet) -> tuple[int, int]:
    """Fallback outgoing candidate: dimension with the widest coordinate gap."""
    best = (-1.0, 0, 0)
    for j in range(ps.d):
        order = np.argsort(ps.points[:, j], kind="stable")
        coords = ps.points[order, j]
        edges = np.concatenate(([0.0], coords, [1.0]))
        gaps = np.diff(edges)
        g = int(np.argmax(gaps))
        width = float(gaps[g])
        # point at the lower edge of the gap, or the upper edge if it is 0
        pt = int(order[g - 1]) if g > 0 else int(order[0])
        if width > best[0]:
            best = (width, j, pt)
    return best[1], best[2]


def star_discrepancy_exact(
    ps: PointSet, max_corners: int = MAX_CORNERS
) -> tuple[float, WorstBox]:
    """Exact star discrepancy and one maximizing box.

    Enumerates the critical grid with incremental counts. Intended for
    d <= 4 and moderate n; larger inputs raise CapacityError (use the
    subset-selection heuristic instead of exact evaluation there).
    """
    if ps.d > MAX_DIMENSION:
        raise CapacityError(
            f"exact computation supports d <= {MAX_DIMENSION}; "
            "use the swap heuristic for subset work in higher dimensions"
        )
    grid = CriticalGrid.from_points(ps)
    if grid.n_corners > max_corners:
        raise CapacityError(
            f"critical grid has {grid.n_corners} corners (> {max_corners}); "
            "use the swap heuristic instead of exact evaluation"
        )
    value, is_deficit, idx = _backend.scan(ps.points, list(grid.axes))
    corner = tuple(float(grid.axes[j][idx[j]]) for j in range(ps.d))
    defining = []
    for j in range(ps.d):
        matches = np.flatnonzero(ps.points[:, j] == corner[j])
        defining.append(int(matches[0]) if len(matches) else None)
    fallback = None
    if all(p is None for p in defining):
        fallback = _largest_gap(ps)
    box = WorstBox(
        corner=corner,
        value=float(value),
        side=SIDE_DEFICIT if is_deficit else SIDE_EXCESS,
        defining_points=tuple(defining),
        fallback=fallback,
    )
    return float(value), box


def worst_box_dimension(wb: WorstBox) -> tuple[int, int]:
    """Dimension (and point) defining the worst box; ties pick the lowest dim."""
    for j, pt in enumerate(wb.defining_points):
        if pt is not None:
            return j, pt
    if wb.fallback is not None:
        return wb.fallback
    raise DomainError("worst box has no defining points and no fallback")


def star_discrepancy_to_reference(subset: PointSet, reference: PointSet) -> float:
    """Empirical-measure variant: worst gap between the subset's and the
    reference set's box proportions (optional mode, not the Eq.-style default).
    """
    if subset.d != reference.d:
        raise DomainError("subset and reference must share a dimension")
    d = subset.d
    axes = []
    for j in range(d):
        vals = np.unique(np.concatenate([subset.points[:, j], reference.points[:, j]]))
        if vals[-1] != 1.0:
            vals = np.append(vals, 1.0)
        axes.append(vals)
    n_corners = 1
    for ax in axes:
        n_corners *= len(ax)
    if n_corners > MAX_CORNERS // 10 or d > MAX_DIMENSION:
        raise CapacityError("reference-mode grid too large")

    def open_counts(pts):
        hist_shape = tuple(len(ax) for ax in axes)
        idx = [np.searchsorted(axes[j], pts[:, j], side="right") for j in range(d)]
        mask = np.ones(pts.shape[0], dtype=bool)
        for j in range(d):
            mask &= idx[j] < hist_shape[j]
        h = np.zeros(hist_shape)
        np.add.at(h, tuple(ix[mask] for ix in idx), 1.0)
        for ax_i in range(d):
            np.cumsum(h, axis=ax_i, out=h)
        return h

    def closed_counts(pts):
        shape_r = tuple(len(ax) - 1 for ax in axes)
        idx = [np.searchsorted(axes[j], pts[:, j], side="left") for j in range(d)]
        mask = np.ones(pts.shape[0], dtype=bool)
        for j in range(d):
            mask &= idx[j] < shape_r[j]
        h = np.zeros(shape_r)
        np.add.at(h, tuple(ix[mask] for ix in idx), 1.0)
        for ax_i in range(d):
            np.cumsum(h, axis=ax_i, out=h)
        return h

    k, m = subset.n, reference.n
    diff_open = np.abs(open_counts(subset.points) / k - open_counts(reference.points) / m)
    best = float(diff_open.max())
    if all(len(ax) > 1 for ax in axes):
        diff_closed = np.abs(
            closed_counts(subset.points) / k - closed_counts(reference.points) / m
        )
        best = max(best, float(diff_closed.max()))
    return best
