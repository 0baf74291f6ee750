"""Pure-Python ray-cast kernel (fallback when the compiled extension is absent).

Mirrors _kernel.pyx operation-for-operation: same intersection formulas, same
iteration order, same tie-breaking, all in IEEE double precision, so the two
backends return bit-identical results.  Keep the two files in sync.
"""

from __future__ import annotations

import math

import numpy as np

from .scene import KIND_UAV, NO_COLLIDER, TAG_GOAL, TAG_NONE, TAG_OBSTACLE, \
    TAG_OWN_GOAL, TAG_UAV, TAG_WALL

_PARALLEL_EPS = 1e-12

BACKEND = "pure"


def cast_rays(scene, agent_id, ox, oy, dir_x, dir_y, max_range):
    """Cast n rays from (ox, oy) into the scene.

    dir_x/dir_y are unit direction components.  agent_id excludes that UAV's
    own disc and marks its goal OwnGoal (-1 disables both).  Returns
    (hit, dist, tag, nx, ny, collider) arrays of length n; misses carry
    dist=max_range, tag=-1, zero normal, collider=-1.
    """
    n = len(dir_x)
    out_hit = np.zeros(n, dtype=np.uint8)
    out_dist = np.empty(n, dtype=np.float64)
    out_tag = np.empty(n, dtype=np.int32)
    out_nx = np.zeros(n, dtype=np.float64)
    out_ny = np.zeros(n, dtype=np.float64)
    out_col = np.empty(n, dtype=np.int32)

    circles = scene.circles
    ckind = scene.circle_kind
    cowner = scene.circle_owner
    cid = scene.circle_id
    boxes = scene.boxes
    bid = scene.box_id
    segs = scene.segments
    sid = scene.segment_id

    for k in range(n):
        dx = float(dir_x[k])
        dy = float(dir_y[k])
        best_t = math.inf
        best_tag = TAG_NONE
        best_col = NO_COLLIDER
        best_nx = 0.0
        best_ny = 0.0

        # --- circles: solve |O + t*D - C|^2 = r^2 with unit D ---
        for i in range(circles.shape[0]):
            kind = int(ckind[i])
            owner = int(cowner[i])
            if kind == KIND_UAV and owner == agent_id:
                continue
            cx = float(circles[i, 0])
            cy = float(circles[i, 1])
            r = float(circles[i, 2])
            fx = ox - cx
            fy = oy - cy
            b = fx * dx + fy * dy
            c = fx * fx + fy * fy - r * r
            disc = b * b - c
            if disc < 0.0:
                continue
            s = math.sqrt(disc)
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
                best_col = int(cid[i])
                px = ox + t * dx
                py = oy + t * dy
                best_nx = (px - cx) / r
                best_ny = (py - cy) / r

        # --- oriented boxes: slab test in the box frame ---
        for i in range(boxes.shape[0]):
            bx = float(boxes[i, 0])
            by = float(boxes[i, 1])
            cr = float(boxes[i, 2])
            sr = float(boxes[i, 3])
            hl = float(boxes[i, 4])
            hw = float(boxes[i, 5])
            rx = ox - bx
            ry = oy - by
            # box frame: u = (cr, sr), v = (-sr, cr)
            ou = rx * cr + ry * sr
            ov = -rx * sr + ry * cr
            du = dx * cr + dy * sr
            dv = -dx * sr + dy * cr
            tmin = -math.inf
            tmax = math.inf
            axis_min = -1   # 0 = u slab, 1 = v slab
            sign_min = 0.0
            ok = True
            for axis in range(2):
                if axis == 0:
                    o_a, d_a, h_a = ou, du, hl
                else:
                    o_a, d_a, h_a = ov, dv, hw
                if d_a > -_PARALLEL_EPS and d_a < _PARALLEL_EPS:
                    if o_a < -h_a or o_a > h_a:
                        ok = False
                        break
                    continue
                t1 = (-h_a - o_a) / d_a
                t2 = (h_a - o_a) / d_a
                sign = -1.0 if d_a > 0.0 else 1.0
                if t1 > t2:
                    t1, t2 = t2, t1
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
                # entering face normal
                if axis_min == 0:
                    nx = sign_min * cr
                    ny = sign_min * sr
                else:
                    nx = sign_min * -sr
                    ny = sign_min * cr
            else:
                # origin inside the box: report the exit face
                t = tmax
                exit_axis = 0
                if du > -_PARALLEL_EPS and du < _PARALLEL_EPS:
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
                best_col = int(bid[i])
                best_nx = nx
                best_ny = ny

        # --- wall segments: 2x2 solve via cross products ---
        for i in range(segs.shape[0]):
            ax = float(segs[i, 0])
            ay = float(segs[i, 1])
            ex = float(segs[i, 2]) - ax
            ey = float(segs[i, 3]) - ay
            denom = dx * ey - dy * ex
            if denom > -_PARALLEL_EPS and denom < _PARALLEL_EPS:
                continue
            wx = ax - ox
            wy = ay - oy
            t = (wx * ey - wy * ex) / denom
            u = (wx * dy - wy * dx) / denom
            if t < 0.0 or u < 0.0 or u > 1.0:
                continue
            if t < best_t:
                seg_len = math.sqrt(ex * ex + ey * ey)
                nx = ey / seg_len
                ny = -ex / seg_len
                if nx * dx + ny * dy > 0.0:
                    nx = -nx
                    ny = -ny
                best_t = t
                best_tag = TAG_WALL
                best_col = int(sid[i])
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

    return out_hit, out_dist, out_tag, out_nx, out_ny, out_col
