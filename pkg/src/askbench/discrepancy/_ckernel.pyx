# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled star-discrepancy grid scan.

Odometer over the outer grid axes with incremental pass masks; the
innermost axis is swept with a merge over coordinate-sorted points.
Arithmetic mirrors the numpy fallback exactly (left-associated volume
prefix products, counts scaled by the same 1/n), so both backends return
bit-identical values and corners.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def scan(pts_in, grids):
    """Return (value, is_deficit, corner_index_tuple) for the grid maximum."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] pts = np.ascontiguousarray(
        pts_in, dtype=np.float64
    )
    cdef Py_ssize_t n = pts.shape[0]
    cdef Py_ssize_t d = pts.shape[1]
    cdef double inv_n = 1.0 / n

    cdef Py_ssize_t j, p, gi, level, q
    cdef Py_ssize_t n_outer = d - 1

    # ragged grid storage
    sizes_py = [len(axis) for axis in grids]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] sizes = np.asarray(sizes_py, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] offsets = np.zeros(d + 1, dtype=np.int64)
    for j in range(d):
        offsets[j + 1] = offsets[j] + sizes[j]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] gflat = np.concatenate(
        [np.asarray(axis, dtype=np.float64) for axis in grids]
    )

    # inner axis: points sorted by their last coordinate
    cdef cnp.ndarray[cnp.int64_t, ndim=1] order = np.argsort(
        pts[:, d - 1], kind="stable"
    ).astype(np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] coord_sorted = np.ascontiguousarray(
        pts[:, d - 1]
    )[order]

    # odometer state over outer axes
    cdef cnp.ndarray[cnp.int64_t, ndim=1] idx = np.zeros(max(n_outer, 1), dtype=np.int64)
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] open_pref = np.ones(
        (max(n_outer, 1), n), dtype=np.uint8
    )
    cdef cnp.ndarray[cnp.uint8_t, ndim=2] closed_pref = np.ones(
        (max(n_outer, 1), n), dtype=np.uint8
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vol_pref = np.ones(
        max(n_outer, 1), dtype=np.float64
    )
    # C-order strides of the full grid
    cdef cnp.ndarray[cnp.int64_t, ndim=1] strides = np.ones(d, dtype=np.int64)
    for j in range(d - 2, -1, -1):
        strides[j] = strides[j + 1] * sizes[j + 1]

    cdef double best_val = -np.inf
    cdef Py_ssize_t best_flat = -1
    cdef bint best_deficit = True

    cdef double c, vol_outer, g, vgd, vd, ve
    cdef Py_ssize_t cnt_o, cnt_c, eq, p2, m_inner, inner_off
    cdef Py_ssize_t outer_flat
    cdef bint excess_outer_ok, done

    m_inner = sizes[d - 1]
    inner_off = offsets[d - 1]

    # initial mask computation for all outer levels
    for level in range(n_outer):
        c = gflat[offsets[level] + idx[level]]
        if level == 0:
            vol_pref[0] = c
            for p in range(n):
                open_pref[0, p] = 1 if pts[p, 0] < c else 0
                closed_pref[0, p] = 1 if pts[p, 0] <= c else 0
        else:
            vol_pref[level] = vol_pref[level - 1] * c
            for p in range(n):
                open_pref[level, p] = open_pref[level - 1, p] and pts[p, level] < c
                closed_pref[level, p] = (
                    closed_pref[level - 1, p] and pts[p, level] <= c
                )

    done = False
    while not done:
        # current outer corner
        if n_outer > 0:
            vol_outer = vol_pref[n_outer - 1]
            excess_outer_ok = True
            outer_flat = 0
            for j in range(n_outer):
                outer_flat += idx[j] * strides[j]
                if idx[j] >= sizes[j] - 1:
                    excess_outer_ok = False
        else:
            vol_outer = 1.0
            excess_outer_ok = True
            outer_flat = 0

        # inner sweep, merging sorted coordinates against the inner grid
        p = 0
        cnt_o = 0
        cnt_c = 0
        for gi in range(m_inner):
            g = gflat[inner_off + gi]
            while p < n and coord_sorted[p] < g:
                q = order[p]
                if n_outer > 0:
                    cnt_o += open_pref[n_outer - 1, q]
                    cnt_c += closed_pref[n_outer - 1, q]
                else:
                    cnt_o += 1
                    cnt_c += 1
                p += 1
            vgd = vol_outer * g
            vd = vgd - cnt_o * inv_n
            if vd > best_val:
                best_val = vd
                best_flat = outer_flat + gi
                best_deficit = True
            if excess_outer_ok and gi < m_inner - 1:
                eq = 0
                p2 = p
                while p2 < n and coord_sorted[p2] == g:
                    q = order[p2]
                    if n_outer > 0:
                        eq += closed_pref[n_outer - 1, q]
                    else:
                        eq += 1
                    p2 += 1
                ve = (cnt_c + eq) * inv_n - vgd
                if ve > best_val:
                    best_val = ve
                    best_flat = outer_flat + gi
                    best_deficit = False

        # advance the odometer (last outer axis fastest)
        if n_outer == 0:
            done = True
        else:
            level = n_outer - 1
            while level >= 0:
                idx[level] += 1
                if idx[level] < sizes[level]:
                    break
                idx[level] = 0
                level -= 1
            if level < 0:
                done = True
            else:
                # refresh masks and volumes from the changed level down
                for j in range(level, n_outer):
                    c = gflat[offsets[j] + idx[j]]
                    if j == 0:
                        vol_pref[0] = c
                        for p in range(n):
                            open_pref[0, p] = 1 if pts[p, 0] < c else 0
                            closed_pref[0, p] = 1 if pts[p, 0] <= c else 0
                    else:
                        vol_pref[j] = vol_pref[j - 1] * c
                        for p in range(n):
                            open_pref[j, p] = (
                                open_pref[j - 1, p] and pts[p, j] < c
                            )
                            closed_pref[j, p] = (
                                closed_pref[j - 1, p] and pts[p, j] <= c
                            )

    out_idx = []
    cdef Py_ssize_t rem = best_flat
    for j in range(d):
        out_idx.append(rem // strides[j])
        rem = rem % strides[j]
    return float(best_val), bool(best_deficit), tuple(int(i) for i in out_idx)
