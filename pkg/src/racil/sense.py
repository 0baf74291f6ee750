"""Ray-cast perception and observation-vector assembly.

An agent senses the world through n rays evenly spaced across an arc centered
on its heading.  Each ray reports the first surface it strikes (distance, tag,
outward normal, collider id).  The observation vector is:

    [x_a, y_a, x_g, y_g]                      positions, normalized to [-1, 1]
    n_rays blocks of [one-hot(tag), miss_flag, distance / max_range]

A coordinate-only observation (obstacle centers and peer positions instead of
ray blocks, nearest-first, zero-padded) backs the no-ray-sensing baseline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import geom
from .geom import TAG_NAMES, scene_from_world
from .sim import WorldState


class SenseError(ValueError):
    pass


@dataclass(frozen=True)
class SensorConfig:
    n_rays: int = 15
    arc_degrees: float = 180.0
    max_range: float = 20.0
    tag_set: tuple = TAG_NAMES  # fixed order; observation layout depends on it

    def __post_init__(self):
        if self.n_rays < 1:
            raise SenseError("n_rays must be >= 1")
        if not 0 < self.arc_degrees <= 360:
            raise SenseError("arc_degrees must be in (0, 360]")
        if self.max_range <= 0:
            raise SenseError("max_range must be > 0")
        if tuple(self.tag_set) != TAG_NAMES:
            raise SenseError(f"tag_set order is fixed as {TAG_NAMES}")

    @property
    def block_size(self):
        return len(self.tag_set) + 2  # one-hot + miss flag + distance

    def obs_dim(self):
        return 4 + self.n_rays * self.block_size

    def ray_offsets(self):
        """Ray angles relative to the heading, degrees, fan order right-to-left."""
        n, arc = self.n_rays, self.arc_degrees
        if n == 1:
            return [0.0]
        if arc >= 360.0:
            return [-180.0 + 360.0 * k / n for k in range(n)]
        return [-arc / 2 + arc * k / (n - 1) for k in range(n)]


@dataclass(frozen=True)
class RayHit:
    hit: bool
    distance: float
    tag: int            # index into SensorConfig.tag_set, -1 on miss
    normal: tuple       # unit outward normal, (0, 0) on miss
    collider_id: int    # -1 on miss


def cast_ray(origin, direction, world: WorldState, agent_id, max_range) -> RayHit:
    """First intersection of one ray with obstacles, peer discs, goal discs,
    and arena walls.  direction must be unit length; the casting agent's own
    disc is excluded."""
    dx, dy = float(direction[0]), float(direction[1])
    norm = math.hypot(dx, dy)
    if norm < 1e-12:
        raise SenseError("zero-length ray direction")
    scene = scene_from_world(world)
    hit, dist_, tag, nx, ny, col = geom.cast_rays(
        scene, agent_id, float(origin[0]), float(origin[1]),
        np.array([dx]), np.array([dy]), float(max_range))
    return RayHit(
        hit=bool(hit[0]),
        distance=float(dist_[0]),
        tag=int(tag[0]),
        normal=(float(nx[0]), float(ny[0])),
        collider_id=int(col[0]),
    )


def cast_all(world: WorldState, agent_id, sensor: SensorConfig, scene=None):
    """All sensor rays for one agent, fan order.  Returns list[RayHit]."""
    if scene is None:
        scene = scene_from_world(world)
    uav = world.uav(agent_id)
    angles = [math.radians(uav.heading + off) for off in sensor.ray_offsets()]
    dir_x = np.array([math.cos(a) for a in angles])
    dir_y = np.array([math.sin(a) for a in angles])
    hit, dist_, tag, nx, ny, col = geom.cast_rays(
        scene, agent_id, uav.x, uav.y, dir_x, dir_y, sensor.max_range)
    return [
        RayHit(hit=bool(hit[k]), distance=float(dist_[k]), tag=int(tag[k]),
               normal=(float(nx[k]), float(ny[k])), collider_id=int(col[k]))
        for k in range(sensor.n_rays)
    ]


def _norm_xy(x, y, world):
    half_w = (world.x_max - world.x_min) / 2
    half_h = (world.y_max - world.y_min) / 2
    cx = (world.x_max + world.x_min) / 2
    cy = (world.y_max + world.y_min) / 2
    return (x - cx) / half_w, (y - cy) / half_h


def observe(world: WorldState, agent_id, sensor: SensorConfig, scene=None):
    """Assemble the flat observation vector for one agent."""
    uav = world.uav(agent_id)
    goal = world.goal_of(agent_id)
    n_tags = len(sensor.tag_set)
    out = np.zeros(sensor.obs_dim(), dtype=np.float64)
    out[0], out[1] = _norm_xy(uav.x, uav.y, world)
    out[2], out[3] = _norm_xy(goal.x, goal.y, world)

    if scene is None:
        scene = scene_from_world(world)
    angles = [math.radians(uav.heading + off) for off in sensor.ray_offsets()]
    dir_x = np.array([math.cos(a) for a in angles])
    dir_y = np.array([math.sin(a) for a in angles])
    hit, dist_, tag, _nx, _ny, _col = geom.cast_rays(
        scene, agent_id, uav.x, uav.y, dir_x, dir_y, sensor.max_range)

    base = 4
    bs = sensor.block_size
    for k in range(sensor.n_rays):
        off = base + k * bs
        if hit[k]:
            out[off + int(tag[k])] = 1.0
        else:
            out[off + n_tags] = 1.0  # miss flag
        out[off + n_tags + 1] = dist_[k] / sensor.max_range
    return out


@dataclass(frozen=True)
class CoordinateSensorConfig:
    """No-ray baseline: fixed slots of (x, y) entity coordinates.

    Slots hold obstacle centers then peer UAV positions, ordered
    nearest-first, zero-padded when entities are absent or despawned.
    """

    n_obstacle_slots: int = 4
    n_peer_slots: int = 0

    def obs_dim(self):
        return 4 + 2 * (self.n_obstacle_slots + self.n_peer_slots)


def observe_coordinates(world: WorldState, agent_id, sensor: CoordinateSensorConfig):
    uav = world.uav(agent_id)
    goal = world.goal_of(agent_id)
    out = np.zeros(sensor.obs_dim(), dtype=np.float64)
    out[0], out[1] = _norm_xy(uav.x, uav.y, world)
    out[2], out[3] = _norm_xy(goal.x, goal.y, world)

    def by_distance(points):
        return sorted(points, key=lambda p: (p[0] - uav.x) ** 2 + (p[1] - uav.y) ** 2)

    idx = 4
    obs_pts = by_distance([(ob.cx, ob.cy) for ob in world.obstacles])
    for k in range(sensor.n_obstacle_slots):
        if k < len(obs_pts):
            out[idx], out[idx + 1] = _norm_xy(obs_pts[k][0], obs_pts[k][1], world)
        idx += 2
    peer_pts = by_distance([(u.x, u.y) for u in world.uavs
                            if u.alive and u.id != agent_id])
    for k in range(sensor.n_peer_slots):
        if k < len(peer_pts):
            out[idx], out[idx + 1] = _norm_xy(peer_pts[k][0], peer_pts[k][1], world)
        idx += 2
    return out
