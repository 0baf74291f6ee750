"""Evaluation harness: fresh-seeded episodes under deterministic (argmax)
action selection, per-agent and aggregate success rates, collision breakdown,
and an aligned plain-text table.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .checkpoint import CheckpointError, load_checkpoint
from .config import TrainConfig
from .digests import env_digest, observation_digest
from .geom import scene_from_world
from .nn import forward
from .sense import CoordinateSensorConfig, cast_all, observe, observe_coordinates
from .sim import Environment
from .wire import state_frame

TERMINAL_KINDS = ("own_goal", "other_goal", "uav_collision", "obstacle_collision",
                  "wall_collision", "timeout")


@dataclass
class EvalReport:
    n_episodes: int
    n_agents: int
    policy_name: str
    per_agent_success: dict
    success_rate: float          # per-agent mean success fraction
    all_success_rate: float      # episodes where every agent succeeded
    mean_episode_length: float
    breakdown: dict              # terminal kind -> count (agent-episodes)
    rows: list = field(default_factory=list)  # machine-readable csv rows

    def table(self) -> str:
        head = (f"{'Environment':<14}{'Agent Policy':<34}{'Success Rate':<14}"
                f"{'Mean Ep Len':<13}")
        sep = "-" * len(head)
        env_name = f"{self.n_agents} UAV" + ("s" if self.n_agents > 1 else "")
        lines = [head, sep,
                 f"{env_name:<14}{self.policy_name:<34}"
                 f"{self.success_rate * 100:>6.1f}%{'':<7}"
                 f"{self.mean_episode_length:>8.1f}"]
        lines.append(sep)
        for aid in sorted(self.per_agent_success):
            lines.append(f"  agent {aid}: success "
                         f"{self.per_agent_success[aid] * 100:.1f}%")
        lines.append(f"  all-agents episode success: "
                     f"{self.all_success_rate * 100:.1f}%")
        parts = [f"{k}={self.breakdown[k]}" for k in TERMINAL_KINDS]
        lines.append("  terminals: " + " ".join(parts))
        return "\n".join(lines) + "\n"

    def csv(self) -> str:
        header = ("policy,n_uavs,episodes,success_rate,all_success_rate,"
                  "mean_episode_length," + ",".join(TERMINAL_KINDS))
        row = [self.policy_name, str(self.n_agents), str(self.n_episodes),
               format(self.success_rate, ".9g"),
               format(self.all_success_rate, ".9g"),
               format(self.mean_episode_length, ".9g")]
        row += [str(self.breakdown[k]) for k in TERMINAL_KINDS]
        return header + "\n" + ",".join(row) + "\n"


def policy_from_checkpoint(path, cfg: TrainConfig):
    """Load a checkpoint and wrap its actor as an argmax policy callable."""
    ck = load_checkpoint(path)
    e_dig = env_digest(cfg.env_config())
    o_dig = observation_digest(cfg.observation_config())
    if ck["env_digest"] != e_dig or ck["obs_digest"] != o_dig:
        raise CheckpointError(
            f"checkpoint digests (env={ck['env_digest']}, obs={ck['obs_digest']}) "
            f"do not match config (env={e_dig}, obs={o_dig})")
    actor = ck["actor"]
    obs_cfg = cfg.observation_config()

    def policy(world, agent_id, scene=None):
        if isinstance(obs_cfg, CoordinateSensorConfig):
            obs = observe_coordinates(world, agent_id, obs_cfg)
        else:
            obs = observe(world, agent_id, obs_cfg, scene=scene)
        logits = forward(actor.spec, actor.params, obs)
        return int(np.argmax(logits))

    return policy


def _classify(events):
    if events is None:
        return "timeout"
    if events.reached_own_goal:
        return "own_goal"
    if events.reached_other_goal:
        return "other_goal"
    if events.hit_uav:
        return "uav_collision"
    if events.hit_obstacle:
        return "obstacle_collision"
    return "wall_collision"


def evaluate(policy, cfg: TrainConfig, n_episodes, seed, policy_name="policy",
             trajectory_path=None, rays_in_trajectory=True) -> EvalReport:
    """Run n_episodes and tally outcomes.

    policy: callable (world, agent_id, scene=None) -> action id.
    trajectory_path: when set, episode 0 is dumped as JSON-lines state frames.
    """
    env_cfg = cfg.env_config()
    env = Environment(env_cfg)
    sensor = cfg.sensor_config()
    succ = {aid: 0 for aid in range(env_cfg.n_uavs)}
    breakdown = {k: 0 for k in TERMINAL_KINDS}
    lengths = []
    all_success = 0
    traj_fh = open(trajectory_path, "w", encoding="utf-8", newline="\n") \
        if trajectory_path else None

    for ep in range(n_episodes):
        env.reset(np.random.SeedSequence(entropy=[int(seed), 2000 + ep]))
        record = traj_fh is not None and ep == 0
        if record:
            traj_fh.write(_frame_line(env, sensor, {}, rays_in_trajectory))
        while not env.episode_done:
            scene = scene_from_world(env.state)
            actions = {}
            for u in env.state.uavs:
                if u.alive and not env.finished[u.id]:
                    actions[u.id] = policy(env.state, u.id, scene=scene)
            if not actions:
                break
            res = env.step(actions)
            if record:
                traj_fh.write(_frame_line(env, sensor, res.rewards,
                                          rays_in_trajectory))
        ep_all = True
        for aid in range(env_cfg.n_uavs):
            ok = env.check_success(aid)
            succ[aid] += ok
            ep_all = ep_all and ok
            breakdown[_classify(env.terminal_events[aid])] += 1
            lengths.append(env.state.tick)
        all_success += ep_all
    if traj_fh:
        traj_fh.close()

    per_agent = {aid: succ[aid] / n_episodes for aid in succ}
    return EvalReport(
        n_episodes=n_episodes,
        n_agents=env_cfg.n_uavs,
        policy_name=policy_name,
        per_agent_success=per_agent,
        success_rate=float(np.mean(list(per_agent.values()))),
        all_success_rate=all_success / n_episodes,
        mean_episode_length=float(np.mean(lengths)) if lengths else 0.0,
        breakdown=breakdown,
    )


def _frame_line(env, sensor, rewards, with_rays):
    rays = None
    if with_rays:
        rays = {u.id: cast_all(env.state, u.id, sensor)
                for u in env.state.uavs if u.alive}
    frame = state_frame(env.state, rays=rays, last_reward=rewards,
                        done=env.episode_done)
    return json.dumps(frame, separators=(",", ":")) + "\n"


def expert_policy(cfg: TrainConfig):
    """The scripted oracle wrapped in the policy interface."""
    from .demos import scripted_expert

    sensor = cfg.sensor_config()
    turn = cfg.turn_step

    def policy(world, agent_id, scene=None):
        return int(scripted_expert(world, agent_id, sensor, turn_step=turn))

    return policy


def random_policy(cfg: TrainConfig, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))

    def policy(world, agent_id, scene=None):
        return int(rng.integers(0, 3))

    return policy
