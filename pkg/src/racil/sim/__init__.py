from .types import (ActionId, ConfigError, EnvConfig, Goal, N_ACTIONS,
                    NotFinishedError, Obstacle, SpawnError, StepEvents,
                    StepResult, Uav, WorldState)
from .spawn import spawn_episode
from .dynamics import Environment, compute_reward, step
from .geometry import disc_obb_overlap, point_obb_distance

__all__ = [
    "ActionId", "ConfigError", "EnvConfig", "Environment", "Goal", "N_ACTIONS",
    "NotFinishedError", "Obstacle", "SpawnError", "StepEvents", "StepResult",
    "Uav", "WorldState", "compute_reward", "disc_obb_overlap",
    "point_obb_distance", "spawn_episode", "step",
]
