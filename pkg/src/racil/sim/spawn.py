"""Randomized episode spawning.

Sampling scheme per entity:
  UAV i:      x ~ U(x_min, x_max); fair coin picks the lower band
              U(y_min, y_min + r_min) or the upper band U(y_max - r_max, y_max).
  goal i:     x ~ U(x_min, x_max); y uniform in the band opposite UAV i's band.
  obstacle i: x ~ U(x_min + d*(i-1), x_min + d*i) with d = arena_width / N,
              y ~ U(y_min + r_min, y_max - r_max), rotation ~ U(0, 180) deg.

Entities overlapping anything already placed (UAV-UAV, UAV-obstacle,
goal-obstacle) are re-sampled up to MAX_RESAMPLE times; exhaustion raises
SpawnError naming the entity class.
"""

from __future__ import annotations

import numpy as np

from .geometry import disc_obb_overlap
from .types import EnvConfig, Goal, Obstacle, SpawnError, Uav, WorldState

MAX_RESAMPLE = 100


def _sample_uav(rng, cfg):
    x = rng.uniform(cfg.x_min, cfg.x_max)
    lower = rng.random() < 0.5
    if lower:
        y = rng.uniform(cfg.y_min, cfg.y_min + cfg.r_min)
    else:
        y = rng.uniform(cfg.y_max - cfg.r_max, cfg.y_max)
    heading = rng.uniform(0.0, 360.0)
    return x, y, heading, lower


def _sample_goal(rng, cfg, uav_in_lower_band):
    x = rng.uniform(cfg.x_min, cfg.x_max)
    if uav_in_lower_band:
        y = rng.uniform(cfg.y_max - cfg.r_max, cfg.y_max)
    else:
        y = rng.uniform(cfg.y_min, cfg.y_min + cfg.r_min)
    return x, y


def _sample_obstacle(rng, cfg, index_1based):
    d = (cfg.x_max - cfg.x_min) / cfg.n_obstacles
    x = rng.uniform(cfg.x_min + d * (index_1based - 1), cfg.x_min + d * index_1based)
    y = rng.uniform(cfg.y_min + cfg.r_min, cfg.y_max - cfg.r_max)
    rot = rng.uniform(0.0, 180.0)
    return x, y, rot


def spawn_episode(config: EnvConfig, seed) -> WorldState:
    rng = np.random.Generator(np.random.PCG64(seed))
    cfg = config

    uavs = []
    bands = []
    for i in range(cfg.n_uavs):
        for attempt in range(MAX_RESAMPLE + 1):
            x, y, heading, lower = _sample_uav(rng, cfg)
            clear = all(
                (x - u.x) ** 2 + (y - u.y) ** 2 >= (2 * cfg.uav_radius) ** 2
                for u in uavs
            )
            if clear:
                break
        else:
            raise SpawnError("UAV", MAX_RESAMPLE)
        uavs.append(Uav(id=i, x=x, y=y, heading=heading))
        bands.append(lower)

    goals = [Goal(owner_id=i, x=gx, y=gy)
             for i, (gx, gy) in enumerate(_sample_goal(rng, cfg, bands[i])
                                          for i in range(cfg.n_uavs))]

    obstacles = []
    for i in range(1, cfg.n_obstacles + 1):
        for attempt in range(MAX_RESAMPLE + 1):
            ox, oy, rot = _sample_obstacle(rng, cfg, i)
            ob = Obstacle(cx=ox, cy=oy, rotation_degrees=rot,
                          half_length=cfg.obstacle_length / 2,
                          half_width=cfg.obstacle_width / 2)
            uav_clear = all(
                not disc_obb_overlap(u.x, u.y, cfg.uav_radius, ob) for u in uavs
            )
            goal_clear = all(
                not disc_obb_overlap(g.x, g.y, cfg.goal_radius, ob) for g in goals
            )
            if uav_clear and goal_clear:
                break
        else:
            raise SpawnError("obstacle", MAX_RESAMPLE)
        obstacles.append(ob)

    return WorldState(
        tick=0,
        uavs=tuple(uavs),
        goals=tuple(goals),
        obstacles=tuple(obstacles),
        x_min=cfg.x_min,
        x_max=cfg.x_max,
        y_min=cfg.y_min,
        y_max=cfg.y_max,
        uav_radius=cfg.uav_radius,
        goal_radius=cfg.goal_radius,
    )
