"""Collision predicates used by spawning and stepping."""

from __future__ import annotations

import math


def point_obb_distance(px, py, ob):
    """Euclidean distance from a point to an oriented box (0 inside)."""
    rad = math.radians(ob.rotation_degrees)
    c, s = math.cos(rad), math.sin(rad)
    rx = px - ob.cx
    ry = py - ob.cy
    # box frame coordinates
    u = abs(rx * c + ry * s)
    v = abs(-rx * s + ry * c)
    du = max(u - ob.half_length, 0.0)
    dv = max(v - ob.half_width, 0.0)
    return math.hypot(du, dv)


def disc_obb_overlap(px, py, radius, ob):
    return point_obb_distance(px, py, ob) < radius


def dist(x1, y1, x2, y2):
    return math.hypot(x2 - x1, y2 - y1)
