"""Numpy fallback for the star-discrepancy grid scan.

Mirrors the compiled kernel operation for operation so that both backends
return bit-identical values and the same maximizing corner: volumes are
accumulated as left-associated prefix products and counts are multiplied by
the same 1/n factor. The scan slabs over the outermost grid axis to keep
memory proportional to the grid's inner face.
"""

from __future__ import annotations

import numpy as np


def _first_max(arr: np.ndarray) -> tuple[float, int]:
    flat = arr.reshape(-1)
    i = int(np.argmax(flat))
    return float(flat[i]), i


def _scan_1d(pts: np.ndarray, grid: np.ndarray):
    n = pts.shape[0]
    inv_n = 1.0 / n
    coords = pts[:, 0]
    m = len(grid)

    open_idx = np.searchsorted(grid, coords, side="right")
    h_open = np.zeros(m)
    np.add.at(h_open, open_idx[open_idx < m], 1.0)
    open_counts = np.cumsum(h_open)
    deficit = 1.0 * grid - open_counts * inv_n

    best_val, best_flat = _first_max(deficit)
    best_side_deficit = True

    if m > 1:
        closed_idx = np.searchsorted(grid, coords, side="left")
        h_closed = np.zeros(m - 1)
        sel = closed_idx < m - 1
        np.add.at(h_closed, closed_idx[sel], 1.0)
        closed_counts = np.cumsum(h_closed)
        excess = closed_counts * inv_n - 1.0 * grid[:-1]
        ev, ef = _first_max(excess)
        if ev > best_val or (ev == best_val and ef < best_flat):
            best_val, best_flat, best_side_deficit = ev, ef, False
    return best_val, best_side_deficit, (best_flat,)


def scan(pts: np.ndarray, grids: list[np.ndarray]):
    """Return (value, is_deficit, corner_index_tuple) for the grid maximum.

    Ties resolve to the first corner in C order (axis 0 outermost), with the
    deficit side winning over the excess side at the same corner.
    """
    pts = np.ascontiguousarray(pts, dtype=float)
    n, d = pts.shape
    if d == 1:
        return _scan_1d(pts, grids[0])

    inv_n = 1.0 / n
    sizes = [len(g) for g in grids]
    rest_shape = tuple(sizes[1:])
    rest_size = int(np.prod(rest_shape))
    rest_shape_r = tuple(s - 1 for s in rest_shape)

    # per-point grid slots for the open (coord < g) and closed (coord <= g) counts
    open_idx = [np.searchsorted(grids[j], pts[:, j], side="right") for j in range(d)]
    closed_idx = [np.searchsorted(grids[j], pts[:, j], side="left") for j in range(d)]

    open_rest_ok = np.ones(n, dtype=bool)
    for j in range(1, d):
        open_rest_ok &= open_idx[j] < sizes[j]
    closed_rest_ok = np.ones(n, dtype=bool)
    for j in range(1, d):
        closed_rest_ok &= closed_idx[j] < sizes[j] - 1
    closed_axis0_ok = closed_idx[0] < sizes[0] - 1

    # group points by their axis-0 slot so each slab adds its mass once
    carry_open = np.zeros(rest_shape)
    carry_closed = np.zeros(rest_shape_r)

    best_d = (-np.inf, -1)  # (value, global flat index in the full grid)
    best_e = (-np.inf, -1)

    full_strides = np.ones(d, dtype=np.int64)
    for j in range(d - 2, -1, -1):
        full_strides[j] = full_strides[j + 1] * sizes[j + 1]

    g0 = grids[0]
    for i0 in range(sizes[0]):
        sel_o = open_rest_ok & (open_idx[0] == i0)
        if np.any(sel_o):
            np.add.at(
                carry_open, tuple(open_idx[j][sel_o] for j in range(1, d)), 1.0
            )
        counts = carry_open.copy()
        for ax in range(d - 1):
            np.cumsum(counts, axis=ax, out=counts)

        # volume as left-associated prefix products, matching the compiled path
        vol = np.array([g0[i0]])
        for j in range(1, d):
            vol = np.multiply.outer(vol, grids[j])
        vol = vol.reshape(rest_shape)

        deficit = vol - counts * inv_n
        v, flat = _first_max(deficit)
        if v > best_d[0]:
            best_d = (v, i0 * rest_size + flat)

        if i0 < sizes[0] - 1 and all(s > 0 for s in rest_shape_r):
            sel_c = closed_rest_ok & closed_axis0_ok & (closed_idx[0] == i0)
            if np.any(sel_c):
                np.add.at(
                    carry_closed,
                    tuple(closed_idx[j][sel_c] for j in range(1, d)),
                    1.0,
                )
            counts_c = carry_closed.copy()
            for ax in range(d - 1):
                np.cumsum(counts_c, axis=ax, out=counts_c)
            vol_r = vol[tuple(slice(0, s) for s in rest_shape_r)]
            excess = counts_c * inv_n - vol_r
            v, flat_r = _first_max(excess)
            if v > best_e[0]:
                idx_r = np.unravel_index(flat_r, rest_shape_r)
                flat_full = i0 * rest_size + int(
                    sum(idx_r[j] * full_strides[j + 1] for j in range(d - 1))
                )
                best_e = (v, flat_full)

    if best_e[0] > best_d[0] or (
        best_e[0] == best_d[0] and 0 <= best_e[1] < best_d[1]
    ):
        value, flat = best_e
        is_deficit = False
    else:
        value, flat = best_d
        is_deficit = True
    idx = np.unravel_index(flat, tuple(sizes))
    return float(value), is_deficit, tuple(int(i) for i in idx)
