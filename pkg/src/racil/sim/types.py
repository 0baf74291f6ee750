"""Domain types for the 2D multi-UAV world."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import IntEnum


class ActionId(IntEnum):
    Fwd = 0
    RotLeft = 1
    RotRight = 2


N_ACTIONS = 3


class ConfigError(ValueError):
    pass


class SpawnError(RuntimeError):
    """Rejection sampling exhausted for one entity class."""

    def __init__(self, entity_class, attempts):
        self.entity_class = entity_class
        super().__init__(
            f"could not place {entity_class} without overlap after {attempts} attempts"
        )


class NotFinishedError(RuntimeError):
    """check_success queried for an agent whose episode is still running."""


@dataclass(frozen=True)
class EnvConfig:
    """Arena geometry, kinematics, and reward constants.

    Defaults are the training-table values for the 30x30 arena; geometry the
    table leaves open (UAV/goal radii, obstacle size, step cap) uses the
    documented desk-scale choices.
    """

    x_min: float = -15.0
    x_max: float = 15.0
    y_min: float = -15.0
    y_max: float = 15.0
    r_min: float = 3.5
    r_max: float = 3.5
    n_obstacles: int = 4
    n_uavs: int = 1
    uav_radius: float = 0.3
    obstacle_length: float = 4.0
    obstacle_width: float = 0.5
    goal_radius: float = 0.5
    forward_step: float = 0.04
    turn_step: float = 2.0
    epsilon_proximity: float = 5.0
    r_f: float = 10000.0
    r_p: float = 0.2
    r_tp: float = 1.0
    max_episode_steps: int = 3000
    z_0: float = 0.0  # fixed altitude, inert in 2D dynamics

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ConfigError("x_min must be < x_max")
        if not self.y_min < self.y_max:
            raise ConfigError("y_min must be < y_max")
        if not self.r_min + self.r_max < self.y_max - self.y_min:
            raise ConfigError("spawn bands overlap: r_min + r_max must be < arena height")
        if self.n_obstacles < 0:
            raise ConfigError("n_obstacles must be >= 0")
        if self.n_uavs < 1:
            raise ConfigError("n_uavs must be >= 1")
        for name in ("uav_radius", "obstacle_length", "obstacle_width", "goal_radius",
                     "forward_step", "turn_step", "epsilon_proximity"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be > 0")
        if not (self.r_f > self.r_p >= 0):
            raise ConfigError("reward magnitudes must satisfy r_f > r_p >= 0")
        if self.max_episode_steps < 1:
            raise ConfigError("max_episode_steps must be >= 1")


@dataclass(frozen=True)
class Uav:
    id: int
    x: float
    y: float
    heading: float  # degrees, normalized to [0, 360)
    alive: bool = True


@dataclass(frozen=True)
class Goal:
    owner_id: int
    x: float
    y: float
    active: bool = True


@dataclass(frozen=True)
class Obstacle:
    cx: float
    cy: float
    rotation_degrees: float
    half_length: float
    half_width: float


@dataclass(frozen=True)
class WorldState:
    """Single source of simulation truth.

    Carries the arena bounds and collision radii so sensing and collision
    code need no side channel back to the config.
    """

    tick: int
    uavs: tuple[Uav, ...]
    goals: tuple[Goal, ...]
    obstacles: tuple[Obstacle, ...]
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    uav_radius: float
    goal_radius: float

    def uav(self, agent_id):
        return self.uavs[agent_id]

    def goal_of(self, agent_id):
        for g in self.goals:
            if g.owner_id == agent_id:
                return g
        raise KeyError(f"no goal for agent {agent_id}")

    def replace(self, **kw):
        return replace(self, **kw)


@dataclass(frozen=True)
class StepEvents:
    """Per-agent geometric event flags for one step (post-move).

    The five terminal flags are mutually exclusive after priority resolution
    (own goal > other's goal > UAV collision > obstacle > wall); the two
    proximity flags are independent.
    """

    reached_own_goal: bool = False
    reached_other_goal: bool = False
    hit_uav: bool = False
    hit_obstacle: bool = False
    hit_wall: bool = False
    near_own_goal: bool = False
    near_other_uav: bool = False

    @property
    def terminal(self):
        return (self.reached_own_goal or self.reached_other_goal or self.hit_uav
                or self.hit_obstacle or self.hit_wall)


NO_EVENTS = StepEvents()


@dataclass(frozen=True)
class StepResult:
    state: WorldState
    rewards: dict = field(default_factory=dict)       # agent_id -> float
    dones: dict = field(default_factory=dict)         # agent_id -> bool
    events: dict = field(default_factory=dict)        # agent_id -> StepEvents
    truncated: bool = False
    ignored: tuple = ()  # agent ids whose actions were ignored (dead/finished)
