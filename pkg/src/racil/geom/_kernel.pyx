# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled ray-cast kernel.

Operation-for-operation twin of pure.py (same formulas, same iteration order,
same tie-breaking) so results are bit-identical across backends.  Compiled
with -ffp-contract=off to forbid FMA contraction.  Keep in sync with pure.py.
"""

from libc.math cimport sqrt, INFINITY

import numpy as np

from .scene import KIND_UAV as _KIND_UAV

cdef int KIND_UAV = _KIND_UAV
cdef int TAG_OBSTACLE = 0
cdef int TAG_GOAL = 1
cdef int TAG_OWN_GOAL = 2
cdef int TAG_UAV = 3
cdef int TAG_WALL = 4
cdef int TAG_NONE = -1
cdef int NO_COLLIDER = -1
cdef double PARALLEL_EPS = 1e-12

BACKEND = "compiled"


def cast_rays(scene, int agent_id, double ox, double oy, dir_x, dir_y,
              double max_range):
    """See pure.cast_rays; identical contract and results."""
    cdef double[:, ::1] circles = scene.circles
    cdef int[::1] ckind = scene.circle_kind
    cdef int[::1] cowner = scene.circle_owner
    cdef int[::1] cid = scene.circle_id
    cdef double[:, ::1] boxes = scene.boxes
    cdef int[::1] bid = scene.box_id
    cdef double[:, ::1] segs = scene.segments
    cdef int[::1] sid = scene.segment_id

    cdef double[::1] dxs = np.ascontiguousarray(dir_x, dtype=np.float64)
    cdef double[::1] dys = np.ascontiguousarray(dir_y, dtype=np.float64)
    cdef Py_ssize_t n = dxs.shape[0]

    out_hit_arr = np.zeros(n, dtype=np.uint8)
    out_dist_arr = np.empty(n, dtype=np.float64)
    out_tag_arr = np.empty(n, dtype=np.int32)
    out_nx_arr = np.zeros(n, dtype=np.float64)
    out_ny_arr = np.zeros(n, dtype=np.float64)
    out_col_arr = np.empty(n, dtype=np.int32)
    cdef unsigned char[::1] out_hit = out_hit_arr
    cdef double[::1] out_dist = out_dist_arr
    cdef int[::1] out_tag = out_tag_arr
    cdef double[::1] out_nx = out_nx_arr
    cdef double[::1] out_ny = out_ny_arr
    cdef int[::1] out_col = out_col_arr

    cdef Py_ssize_t k, i
    cdef int kind, owner, axis, axis_min, exit_axis
    cdef double dx, dy, best_t, best_nx, best_ny
    cdef int best_tag, best_col
    cdef double cx, cy, r, fx, fy, b, c, disc, s, t, px, py
    cdef double bx, by, cr, sr, hl, hw, rx, ry, ou, ov, du, dv
    cdef double tmin, tmax, sign_min, o_a, d_a, h_a, t1, t2, sign, tmp
    cdef double nx, ny, sgn, tu
    cdef double ax, ay, ex, ey, denom, wx, wy, u, seg_len
    cdef bint ok

    for k in range(n):
        dx = dxs[k]
        dy = dys[k]
        best_t = INFINITY
        best_tag = TAG_NONE
        best_col = NO_COLLIDER
        best_nx = 0.0
        best_ny = 0.0

        # --- circles ---
        for i in range(circles.shape[0]):
            kind = ckind[i]
            owner = cowner[i]
            if kind == KIND_UAV and owner == agent_id:
                continue
            cx = circles[i, 0]
            cy = circles[i, 1]
            r = circles[i, 2]
            fx = ox - cx
            fy = oy - cy
            b = fx * dx + fy * dy
            c = fx * fx + fy * fy - r * r
            disc = b * b - c
            if disc < 0.0:
                continue
            s = sqrt(disc)
            t = -b - s
            if t < 0.0:
                t = -b + s
                if t < 0.0:
                    continue
            if t < best_t:
                best_t = t
                if kind == KIND_UAV:
                    best_tag = TAG_UAV
                elif owner == agent_id:
                    best_tag = TAG_OWN_GOAL
                else:
                    best_tag = TAG_GOAL
                best_col = cid[i]
                px = ox + t * dx
                py = oy + t * dy
                best_nx = (px - cx) / r
                best_ny = (py - cy) / r

        # --- oriented boxes ---
        for i in range(boxes.shape[0]):
            bx = boxes[i, 0]
            by = boxes[i, 1]
            cr = boxes[i, 2]
            sr = boxes[i, 3]
            hl = boxes[i, 4]
            hw = boxes[i, 5]
            rx = ox - bx
            ry = oy - by
            ou = rx * cr + ry * sr
            ov = -rx * sr + ry * cr
            du = dx * cr + dy * sr
            dv = -dx * sr + dy * cr
            tmin = -INFINITY
            tmax = INFINITY
            axis_min = -1
            sign_min = 0.0
            ok = True
            for axis in range(2):
                if axis == 0:
                    o_a = ou
                    d_a = du
                    h_a = hl
                else:
                    o_a = ov
                    d_a = dv
                    h_a = hw
                if d_a > -PARALLEL_EPS and d_a < PARALLEL_EPS:
                    if o_a < -h_a or o_a > h_a:
                        ok = False
                        break
                    continue
                t1 = (-h_a - o_a) / d_a
                t2 = (h_a - o_a) / d_a
                sign = -1.0 if d_a > 0.0 else 1.0
                if t1 > t2:
                    tmp = t1
                    t1 = t2
                    t2 = tmp
                if t1 > tmin:
                    tmin = t1
                    axis_min = axis
                    sign_min = sign
                if t2 < tmax:
                    tmax = t2
                if tmin > tmax:
                    ok = False
                    break
            if not ok:
                continue
            if tmax < 0.0:
                continue
            if tmin >= 0.0:
                t = tmin
                if axis_min == 0:
                    nx = sign_min * cr
                    ny = sign_min * sr
                else:
                    nx = sign_min * -sr
                    ny = sign_min * cr
            else:
                t = tmax
                exit_axis = 0
                if du > -PARALLEL_EPS and du < PARALLEL_EPS:
                    exit_axis = 1
                else:
                    tu = ((hl if du > 0.0 else -hl) - ou) / du
                    if tu != tmax:
                        exit_axis = 1
                if exit_axis == 0:
                    sgn = 1.0 if du > 0.0 else -1.0
                    nx = sgn * cr
                    ny = sgn * sr
                else:
                    sgn = 1.0 if dv > 0.0 else -1.0
                    nx = sgn * -sr
                    ny = sgn * cr
            if t < best_t:
                best_t = t
                best_tag = TAG_OBSTACLE
                best_col = bid[i]
                best_nx = nx
                best_ny = ny

        # --- wall segments ---
        for i in range(segs.shape[0]):
            ax = segs[i, 0]
            ay = segs[i, 1]
            ex = segs[i, 2] - ax
            ey = segs[i, 3] - ay
            denom = dx * ey - dy * ex
            if denom > -PARALLEL_EPS and denom < PARALLEL_EPS:
                continue
            wx = ax - ox
            wy = ay - oy
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
            if t < 0.0 or u < 0.0 or u > 1.0:
                continue
            if t < best_t:
                seg_len = sqrt(ex * ex + ey * ey)
                nx = ey / seg_len
                ny = -ex / seg_len
                if nx * dx + ny * dy > 0.0:
                    nx = -nx
                    ny = -ny
                best_t = t
                best_tag = TAG_WALL
                best_col = sid[i]
                best_nx = nx
                best_ny = ny

        if best_t <= max_range:
            out_hit[k] = 1
            out_dist[k] = best_t
            out_tag[k] = best_tag
            out_nx[k] = best_nx
            out_ny[k] = best_ny
            out_col[k] = best_col
        else:
            out_hit[k] = 0
            out_dist[k] = max_range
            out_tag[k] = TAG_NONE
            out_nx[k] = 0.0
            out_ny[k] = 0.0
            out_col[k] = NO_COLLIDER

    return (out_hit_arr, out_dist_arr, out_tag_arr, out_nx_arr, out_ny_arr,
            out_col_arr)
