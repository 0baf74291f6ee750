"""Expert demonstration lifecycle: scripted oracle, recording, on-disk format.

Demo files are line-delimited UTF-8 text with LF endings:

    header: racildemo <version> <obs_digest> <env_digest> <obs_dim> \
            <n_actions> <source> <n_episodes>
    record: <episode> <step> <obs_0> ... <obs_{D-1}> <action>

Floats are written at 9 significant digits; recorded observations are
quantized through the same formatting, so save -> load is an identity.
Only successful expert episodes are kept (failed avoidance attempts would
teach collisions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .digests import env_digest, observation_digest
from .imitation import ExpertBatch
from .sense import (CoordinateSensorConfig, SensorConfig, cast_all,
                    observe, observe_coordinates)
from .geom import TAG_OBSTACLE, TAG_UAV
from .sim import ActionId, EnvConfig, Environment, N_ACTIONS, WorldState

FORMAT_VERSION = 1
AVOID_THRESHOLD = 3.0
AVOID_CONE_DEGREES = 30.0
GUARD_CONE_DEGREES = 60.0
PROBE_WINDOW = 100
MIN_PROBE_SUCCESS = 0.05


class DemoError(RuntimeError):
    pass


class DemoVersionError(DemoError):
    pass


class DemoDigestError(DemoError):
    pass


class DemoFormatError(DemoError):
    pass


class EnvironmentTooHardError(DemoError):
    """Scripted expert success rate below the probe threshold."""


@dataclass(frozen=True)
class DemoRecord:
    episode: int
    step: int
    observation: np.ndarray
    action: int


@dataclass(frozen=True)
class DemoFile:
    version: int
    obs_digest: str
    env_digest: str
    obs_dim: int
    n_actions: int
    source: str
    n_episodes: int
    records: tuple


def _wrap_angle(deg):
    """Wrap to (-180, 180]."""
    a = deg % 360.0
    if a > 180.0:
        a -= 360.0
    return a


def scripted_expert(world: WorldState, agent_id, sensor: SensorConfig,
                    turn_step=2.0, avoid_threshold=AVOID_THRESHOLD) -> ActionId:
    """Deterministic goal-seeking expert with reactive obstacle avoidance.

    Forward-cone rays (within +-30 deg of heading) reporting an Obstacle or
    UAV hit closer than the avoidance threshold trigger a turn away from the
    side with the nearer hit; otherwise the expert turns down its bearing
    error and moves forward once roughly aligned.
    """
    uav = world.uav(agent_id)
    goal = world.goal_of(agent_id)
    hits = cast_all(world, agent_id, sensor)
    offsets = sensor.ray_offsets()

    near_left = math.inf
    near_right = math.inf
    guard_left = False
    guard_right = False
    guard_threshold = 1.5 * avoid_threshold  # hysteresis: wider than avoid
    for off, hit in zip(offsets, hits):
        if not hit.hit or hit.tag not in (TAG_OBSTACLE, TAG_UAV):
            continue
        if hit.distance < avoid_threshold and abs(off) <= AVOID_CONE_DEGREES:
            if off >= 0.0:
                near_left = min(near_left, hit.distance)
            if off <= 0.0:
                near_right = min(near_right, hit.distance)
        if hit.distance < guard_threshold:
            if 0.0 < off <= GUARD_CONE_DEGREES:
                guard_left = True
            if -GUARD_CONE_DEGREES <= off < 0.0:
                guard_right = True

    if near_left < math.inf or near_right < math.inf:
        return ActionId.RotRight if near_left < near_right else ActionId.RotLeft

    bearing = math.degrees(math.atan2(goal.y - uav.y, goal.x - uav.x))
    err = _wrap_angle(bearing - uav.heading)
    if abs(err) > turn_step:
        # hold course instead of turning back into a hazard sitting just
        # outside the avoidance cone (breaks the turn-away/turn-back livelock)
        if err > 0 and guard_left:
            return ActionId.Fwd
        if err < 0 and guard_right:
            return ActionId.Fwd
        return ActionId.RotLeft if err > 0 else ActionId.RotRight
    return ActionId.Fwd


def _quantize(vec):
    return np.array([float(format(v, ".9g")) for v in vec], dtype=np.float64)


def _make_observer(config, obs_cfg):
    if isinstance(obs_cfg, SensorConfig):
        return lambda world, aid: observe(world, aid, obs_cfg), obs_cfg.obs_dim()
    if isinstance(obs_cfg, CoordinateSensorConfig):
        return (lambda world, aid: observe_coordinates(world, aid, obs_cfg),
                obs_cfg.obs_dim())
    raise TypeError(f"not an observation config: {obs_cfg!r}")


def generate_demos(config: EnvConfig, sensor: SensorConfig, n_episodes, seed,
                   obs_cfg=None, source="scripted") -> DemoFile:
    """Run the scripted expert, keeping successful episodes until n_episodes
    are collected.  obs_cfg selects what gets RECORDED (defaults to the ray
    sensor itself); the expert always perceives through `sensor`.
    """
    if n_episodes < 1:
        raise ValueError("n_episodes must be >= 1")
    obs_cfg = sensor if obs_cfg is None else obs_cfg
    observer, obs_dim = _make_observer(config, obs_cfg)

    env = Environment(config)
    records = []
    kept = 0
    attempts = 0
    attempt_successes = 0
    while kept < n_episodes:
        if attempts >= PROBE_WINDOW and attempts % PROBE_WINDOW == 0:
            if attempt_successes / attempts < MIN_PROBE_SUCCESS:
                raise EnvironmentTooHardError(
                    f"expert success rate {attempt_successes}/{attempts} below "
                    f"{MIN_PROBE_SUCCESS:.0%} probe threshold")
        env.reset(np.random.SeedSequence(entropy=[int(seed), attempts]))
        attempts += 1
        episode = {aid: [] for aid in range(config.n_uavs)}
        step_idx = {aid: 0 for aid in range(config.n_uavs)}
        while not env.episode_done:
            actions = {}
            for uav in env.state.uavs:
                if not uav.alive or env.finished[uav.id]:
                    continue
                obs = _quantize(observer(env.state, uav.id))
                act = scripted_expert(env.state, uav.id, sensor,
                                      turn_step=config.turn_step)
                episode[uav.id].append((step_idx[uav.id], obs, int(act)))
                step_idx[uav.id] += 1
                actions[uav.id] = act
            if not actions:
                break
            env.step(actions)
        any_success = False
        for aid in range(config.n_uavs):
            if env.finished[aid] and env.check_success(aid) and episode[aid]:
                for st, obs, act in episode[aid]:
                    records.append(DemoRecord(episode=kept, step=st,
                                              observation=obs, action=act))
                kept += 1
                any_success = True
                if kept >= n_episodes:
                    break
        if any_success:
            attempt_successes += 1

    return DemoFile(
        version=FORMAT_VERSION,
        obs_digest=observation_digest(obs_cfg),
        env_digest=env_digest(config),
        obs_dim=obs_dim,
        n_actions=N_ACTIONS,
        source=source,
        n_episodes=n_episodes,
        records=tuple(records),
    )


def save_demos(demo: DemoFile, path):
    lines = [f"racildemo {demo.version} {demo.obs_digest} {demo.env_digest} "
             f"{demo.obs_dim} {demo.n_actions} {demo.source} {demo.n_episodes}"]
    for r in demo.records:
        obs = " ".join(format(v, ".9g") for v in r.observation)
        lines.append(f"{r.episode} {r.step} {obs} {r.action}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _parse_header(line):
    parts = line.split()
    if len(parts) != 8 or parts[0] != "racildemo":
        raise DemoFormatError("line 1: malformed header")
    try:
        version = int(parts[1])
        obs_dim = int(parts[4])
        n_actions = int(parts[5])
        n_episodes = int(parts[7])
    except ValueError as exc:
        raise DemoFormatError(f"line 1: {exc}") from exc
    return version, parts[2], parts[3], obs_dim, n_actions, parts[6], n_episodes


def read_demo_file(path) -> DemoFile:
    """Parse and fully validate a demo file (no digest check)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise DemoFormatError("empty file")
    version, obs_dig, env_dig, obs_dim, n_actions, source, n_eps = \
        _parse_header(lines[0])
    if version != FORMAT_VERSION:
        raise DemoVersionError(
            f"format version {version} unsupported (expected {FORMAT_VERSION})")

    records = []
    prev_ep = -1
    prev_step = -1
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) != 3 + obs_dim:
            raise DemoFormatError(
                f"line {i} (record {i - 1}): expected {3 + obs_dim} fields, "
                f"got {len(parts)}")
        try:
            ep = int(parts[0])
            st = int(parts[1])
            obs = np.array([float(v) for v in parts[2:2 + obs_dim]])
            act = int(parts[-1])
        except ValueError as exc:
            raise DemoFormatError(f"line {i} (record {i - 1}): {exc}") from exc
        if not 0 <= act < n_actions:
            raise DemoFormatError(f"line {i}: action {act} out of range")
        if ep == prev_ep:
            if st != prev_step + 1:
                raise DemoFormatError(
                    f"line {i}: step {st} not consecutive within episode {ep}")
        elif ep == prev_ep + 1:
            if st != 0:
                raise DemoFormatError(f"line {i}: episode {ep} must start at step 0")
        else:
            raise DemoFormatError(f"line {i}: episode {ep} not contiguous")
        prev_ep, prev_step = ep, st
        records.append(DemoRecord(episode=ep, step=st, observation=obs, action=act))
    if prev_ep + 1 != n_eps:
        raise DemoFormatError(
            f"header claims {n_eps} episodes, file holds {prev_ep + 1}")
    return DemoFile(version=version, obs_digest=obs_dig, env_digest=env_dig,
                    obs_dim=obs_dim, n_actions=n_actions, source=source,
                    n_episodes=n_eps, records=tuple(records))


class DemoDataset:
    """Loaded, validated demo pairs with shuffled minibatch access."""

    def __init__(self, demo: DemoFile):
        self.source = demo.source
        self.obs_digest = demo.obs_digest
        self.env_digest = demo.env_digest
        self.observations = (np.stack([r.observation for r in demo.records])
                             if demo.records else np.zeros((0, demo.obs_dim)))
        self.actions = np.array([r.action for r in demo.records], dtype=int)
        self.n_actions = demo.n_actions

    def __len__(self):
        return len(self.actions)

    def epoch_batches(self, batch_size, rng):
        """One shuffled pass over every pair."""
        order = rng.permutation(len(self))
        for lo in range(0, len(self), batch_size):
            idx = order[lo:lo + batch_size]
            yield ExpertBatch(self.observations[idx], self.actions[idx],
                              source=self.source)

    def sample(self, batch_size, rng):
        idx = rng.integers(0, len(self), size=batch_size)
        return ExpertBatch(self.observations[idx], self.actions[idx],
                           source=self.source)


def load_demos(path, expected_obs_digest=None, expected_env_digest=None) -> DemoDataset:
    """Load, validate, and digest-check a demo file."""
    demo = read_demo_file(path)
    if expected_obs_digest is not None and demo.obs_digest != expected_obs_digest:
        raise DemoDigestError(
            f"observation digest {demo.obs_digest} != expected {expected_obs_digest} "
            "(file was recorded under a different sensor layout)")
    if expected_env_digest is not None and demo.env_digest != expected_env_digest:
        raise DemoDigestError(
            f"environment digest {demo.env_digest} != expected {expected_env_digest}")
    return DemoDataset(demo)
