"""Training configuration and the plain-text config file format.

Files are `key = value` lines (UTF-8, '#' comments, blank lines allowed)
using the training-table names verbatim; unknown keys are errors.  The
Python-keyword clash for `lambda` maps to the gae_lambda attribute.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .nn import MlpSpec
from .sense import CoordinateSensorConfig, SensorConfig
from .sim import ConfigError, EnvConfig

DISC_HIDDEN_UNITS = 128
DISC_NUM_LAYERS = 2
VALUE_CHANNELS = 2  # extrinsic + imitation reward channels


@dataclass(frozen=True)
class TrainConfig:
    # optimization
    batch_size: int = 1024
    buffer_size: int = 2048
    learning_rate: float = 3.0e-4
    beta: float = 0.005            # entropy bonus coefficient
    epsilon: float = 0.2           # PPO clip range
    gae_lambda: float = 0.95       # config key: lambda
    num_epoch: int = 3
    learning_rate_schedule: str = "linear"
    beta_schedule: str = "constant"
    normalize: bool = False        # no running obs normalization layer
    hidden_units: int = 128        # desk scale; 1024 for fidelity runs
    num_layers: int = 2            # desk scale; 8 for fidelity runs
    # reward channels
    extrinsic_gamma: float = 0.99
    extrinsic_strength: float = 1.0
    gail_gamma: float = 0.99
    gail_strength: float = 1.0
    bc_strength: float = 0.5
    steps_bc: int = 100000
    # arena / rewards
    r_f: float = 10000.0
    r_p: float = 0.2
    r_tp: float = 1.0
    x_max: float = 15.0
    y_max: float = 15.0
    x_min: float = -15.0
    y_min: float = -15.0
    r_min: float = 3.5
    r_max: float = 3.5
    n_obstacles: int = 4
    epsilon_proximity: float = 5.0
    uav_radius: float = 0.3
    goal_radius: float = 0.5
    obstacle_length: float = 4.0
    obstacle_width: float = 0.5
    forward_step: float = 0.04
    turn_step: float = 2.0
    max_episode_steps: int = 3000
    z_0: float = 0.0
    # sensor
    n_rays: int = 15
    arc_degrees: float = 180.0
    max_range: float = 20.0
    # run shape (total_steps covers both phases; the first steps_bc of them
    # are the cloning warmup when use_bc is set)
    total_steps: int = 300000
    n_uavs: int = 1
    n_envs: int = 4
    seed: int = 0
    use_raycast: bool = True
    use_bc: bool = True
    # Printed discriminator-gradient orientation in the source material pairs
    # log D with agent pairs; the reward log D(s,a) requires D(expert)->1, so
    # the expert->1 orientation is implemented (presumed typographic flip).
    use_gail: bool = True
    eval_every: int = 50000        # checkpoint cadence (env steps)
    advantage_mode: str = "gae"    # gae | simple
    bc_loss_mode: str = "mse"      # mse | xent
    bc_phase_ppo: bool = False     # literal-reading flag: PPO also during warmup
    # Keep the strength-weighted cloning term in the main-loop composite loss
    # for cloning-enabled runs (off = strict phase separation, where cloning
    # influence ends at steps_bc).  At desk-scale step budgets the main loop
    # cannot re-learn what the warmup clone knows, so the anchor is on by
    # default; the published 10M-step budget does not need it.
    bc_anchor: bool = True

    def __post_init__(self):
        if self.batch_size > self.buffer_size:
            raise ConfigError("batch_size must be <= buffer_size")
        if self.steps_bc > self.total_steps:
            raise ConfigError("steps_bc must be <= total_steps")
        for name in ("extrinsic_strength", "gail_strength", "bc_strength"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        if self.advantage_mode not in ("gae", "simple"):
            raise ConfigError("advantage_mode must be gae or simple")
        if self.bc_loss_mode not in ("mse", "xent"):
            raise ConfigError("bc_loss_mode must be mse or xent")
        if self.learning_rate_schedule not in ("linear", "constant"):
            raise ConfigError("learning_rate_schedule must be linear or constant")
        if self.beta_schedule not in ("linear", "constant"):
            raise ConfigError("beta_schedule must be linear or constant")
        if self.n_envs < 1:
            raise ConfigError("n_envs must be >= 1")
        self.env_config()  # env invariants

    # ---- derived objects ----

    def env_config(self) -> EnvConfig:
        return EnvConfig(
            x_min=self.x_min, x_max=self.x_max, y_min=self.y_min, y_max=self.y_max,
            r_min=self.r_min, r_max=self.r_max, n_obstacles=self.n_obstacles,
            n_uavs=self.n_uavs, uav_radius=self.uav_radius,
            obstacle_length=self.obstacle_length, obstacle_width=self.obstacle_width,
            goal_radius=self.goal_radius, forward_step=self.forward_step,
            turn_step=self.turn_step, epsilon_proximity=self.epsilon_proximity,
            r_f=self.r_f, r_p=self.r_p, r_tp=self.r_tp,
            max_episode_steps=self.max_episode_steps, z_0=self.z_0,
        )

    def sensor_config(self) -> SensorConfig:
        return SensorConfig(n_rays=self.n_rays, arc_degrees=self.arc_degrees,
                            max_range=self.max_range)

    def observation_config(self):
        if self.use_raycast:
            return self.sensor_config()
        return CoordinateSensorConfig(n_obstacle_slots=self.n_obstacles,
                                      n_peer_slots=self.n_uavs - 1)

    def obs_dim(self) -> int:
        return self.observation_config().obs_dim()

    def actor_spec(self) -> MlpSpec:
        return MlpSpec(input_dim=self.obs_dim(), hidden_units=self.hidden_units,
                       num_layers=self.num_layers, output_dim=3,
                       output_head="linear")

    def critic_spec(self) -> MlpSpec:
        return MlpSpec(input_dim=self.obs_dim(), hidden_units=self.hidden_units,
                       num_layers=self.num_layers, output_dim=VALUE_CHANNELS,
                       output_head="linear")

    def disc_spec(self) -> MlpSpec:
        return MlpSpec(input_dim=self.obs_dim() + 3,
                       hidden_units=DISC_HIDDEN_UNITS, num_layers=DISC_NUM_LAYERS,
                       output_dim=1, output_head="sigmoid")


_KEY_TO_ATTR = {"lambda": "gae_lambda"}
_ATTR_TO_KEY = {v: k for k, v in _KEY_TO_ATTR.items()}


def _parse_value(raw, target_type):
    raw = raw.strip()
    if target_type is bool:
        if raw.lower() in ("true", "1", "yes"):
            return True
        if raw.lower() in ("false", "0", "no"):
            return False
        raise ConfigError(f"not a boolean: {raw!r}")
    if target_type is int:
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"not an integer: {raw!r}") from exc
    if target_type is float:
        try:
            return float(raw)
        except ValueError as exc:
            raise ConfigError(f"not a number: {raw!r}") from exc
    return raw


def parse_config_text(text) -> TrainConfig:
    field_types = {f.name: f.type for f in fields(TrainConfig)}
    values = {}
    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        attr = _KEY_TO_ATTR.get(key, key)
        if attr not in field_types:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        t = field_types[attr]
        target = {"int": int, "float": float, "bool": bool, "str": str}[
            t if isinstance(t, str) else t.__name__]
        values[attr] = _parse_value(raw, target)
    return TrainConfig(**values)


def load_config(path) -> TrainConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def dump_config(config: TrainConfig) -> str:
    lines = []
    for f in fields(TrainConfig):
        key = _ATTR_TO_KEY.get(f.name, f.name)
        v = getattr(config, f.name)
        if isinstance(v, bool):
            v = "true" if v else "false"
        elif isinstance(v, float):
            v = format(v, ".9g")
        lines.append(f"{key} = {v}")
    return "\n".join(lines) + "\n"
