"""Packed scene representation consumed by the ray-cast kernels.

A scene is three flat entity tables (circles, oriented boxes, wall segments)
stored as contiguous float64/int32 arrays so the compiled kernel and the
pure-Python fallback iterate the exact same data in the exact same order.
Trigonometry for box orientation is precomputed here once, which also keeps
the two kernel backends bit-identical (they never call cos/sin themselves).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Tag indices: fixed, versioned layout (observation one-hot order depends on it).
TAG_OBSTACLE = 0
TAG_GOAL = 1
TAG_OWN_GOAL = 2
TAG_UAV = 3
TAG_WALL = 4
TAG_NAMES = ("Obstacle", "Goal", "OwnGoal", "UAV", "Wall")
TAG_NONE = -1

# Circle sub-kinds (the kernel resolves UAV/Goal/OwnGoal tags per casting agent).
KIND_UAV = 0
KIND_GOAL = 1

# Collider id blocks, stable across a scene's lifetime.
UAV_ID_BASE = 0
GOAL_ID_BASE = 1000
OBSTACLE_ID_BASE = 2000
WALL_ID_BASE = 3000
NO_COLLIDER = -1


@dataclass(frozen=True)
class PackedScene:
    """Flat entity tables for one world snapshot."""

    circles: np.ndarray       # (n_c, 3) cx, cy, radius
    circle_kind: np.ndarray   # (n_c,)  KIND_UAV | KIND_GOAL
    circle_owner: np.ndarray  # (n_c,)  owning agent id
    circle_id: np.ndarray     # (n_c,)  collider id
    boxes: np.ndarray         # (n_b, 6) cx, cy, cos_rot, sin_rot, half_len, half_wid
    box_id: np.ndarray        # (n_b,)
    segments: np.ndarray      # (n_s, 4) x1, y1, x2, y2
    segment_id: np.ndarray    # (n_s,)


def _rows(lst, width):
    arr = np.asarray(lst, dtype=np.float64)
    if arr.size == 0:
        return np.zeros((0, width), dtype=np.float64)
    return np.ascontiguousarray(arr.reshape(-1, width))


def build_scene(circles=(), boxes=(), segments=()):
    """Assemble a PackedScene from plain tuples.

    circles:  (cx, cy, r, kind, owner, collider_id)
    boxes:    (cx, cy, rotation_degrees, half_len, half_wid, collider_id)
    segments: (x1, y1, x2, y2, collider_id)
    """
    c_geo, c_kind, c_owner, c_id = [], [], [], []
    for cx, cy, r, kind, owner, cid in circles:
        c_geo.append((cx, cy, r))
        c_kind.append(kind)
        c_owner.append(owner)
        c_id.append(cid)
    b_geo, b_id = [], []
    for cx, cy, rot_deg, hl, hw, cid in boxes:
        rad = math.radians(rot_deg)
        b_geo.append((cx, cy, math.cos(rad), math.sin(rad), hl, hw))
        b_id.append(cid)
    s_geo, s_id = [], []
    for x1, y1, x2, y2, cid in segments:
        s_geo.append((x1, y1, x2, y2))
        s_id.append(cid)
    return PackedScene(
        circles=_rows(c_geo, 3),
        circle_kind=np.asarray(c_kind, dtype=np.int32),
        circle_owner=np.asarray(c_owner, dtype=np.int32),
        circle_id=np.asarray(c_id, dtype=np.int32),
        boxes=_rows(b_geo, 6),
        box_id=np.asarray(b_id, dtype=np.int32),
        segments=_rows(s_geo, 4),
        segment_id=np.asarray(s_id, dtype=np.int32),
    )


def scene_from_world(world):
    """Pack a sim WorldState: alive UAV discs, active goal discs, obstacle
    boxes, and the four arena walls."""
    circles = []
    for uav in world.uavs:
        if uav.alive:
            circles.append((uav.x, uav.y, world.uav_radius, KIND_UAV, uav.id,
                            UAV_ID_BASE + uav.id))
    for goal in world.goals:
        if goal.active:
            circles.append((goal.x, goal.y, world.goal_radius, KIND_GOAL,
                            goal.owner_id, GOAL_ID_BASE + goal.owner_id))
    boxes = [
        (ob.cx, ob.cy, ob.rotation_degrees, ob.half_length, ob.half_width,
         OBSTACLE_ID_BASE + i)
        for i, ob in enumerate(world.obstacles)
    ]
    x0, x1, y0, y1 = world.x_min, world.x_max, world.y_min, world.y_max
    segments = [
        (x0, y0, x1, y0, WALL_ID_BASE + 0),  # south
        (x1, y0, x1, y1, WALL_ID_BASE + 1),  # east
        (x1, y1, x0, y1, WALL_ID_BASE + 2),  # north
        (x0, y1, x0, y0, WALL_ID_BASE + 3),  # west
    ]
    return build_scene(circles, boxes, segments)
