"""Discrete-action kinematics, collision resolution, rewards, termination.

All agents move simultaneously, then events are derived from the post-move
geometry.  Terminal priority when several fire in one step:
own goal > other's goal > UAV collision > obstacle collision > wall.
Successful agents are despawned together with their goal; collided agents are
despawned with their goal left active.
"""

from __future__ import annotations

import math

from .geometry import disc_obb_overlap, dist
from .types import (NO_EVENTS, ActionId, EnvConfig, NotFinishedError,
                    StepEvents, StepResult, WorldState)
from .spawn import spawn_episode


def compute_reward(events: StepEvents, config: EnvConfig) -> float:
    """Extrinsic reward: collision + proximity + time penalty.

    Each flag contributes additively; terminal flags are exclusive upstream.
    The time penalty applies on every step, terminal ones included.
    """
    r_collision = 0.0
    if events.reached_own_goal:
        r_collision += config.r_f
    if events.reached_other_goal:
        r_collision -= config.r_f
    if events.hit_uav:
        r_collision -= config.r_f
    if events.hit_obstacle:
        r_collision -= config.r_f / 2
    if events.hit_wall:
        r_collision -= config.r_f / 2

    r_proximity = 0.0
    if events.near_own_goal:
        r_proximity += config.r_p
    if events.near_other_uav:
        r_proximity -= config.r_p

    r_time = -config.r_tp
    return r_collision + r_proximity + r_time


def _move(uav, action, config):
    if action == ActionId.Fwd:
        rad = math.radians(uav.heading)
        return uav.x + config.forward_step * math.cos(rad), \
            uav.y + config.forward_step * math.sin(rad), uav.heading
    if action == ActionId.RotLeft:
        return uav.x, uav.y, (uav.heading + config.turn_step) % 360.0
    if action == ActionId.RotRight:
        return uav.x, uav.y, (uav.heading - config.turn_step) % 360.0
    raise ValueError(f"unknown action {action!r}")


def _raw_events(uav, peers, goals, obstacles, state, config):
    own_goal = None
    reached_other = False
    for g in goals:
        if not g.active:
            continue
        d = dist(uav.x, uav.y, g.x, g.y)
        if g.owner_id == uav.id:
            own_goal = g
        elif d <= config.goal_radius:
            reached_other = True
    reached_own = (own_goal is not None
                   and dist(uav.x, uav.y, own_goal.x, own_goal.y) <= config.goal_radius)
    near_own = (own_goal is not None
                and dist(uav.x, uav.y, own_goal.x, own_goal.y) <= config.epsilon_proximity)

    hit_uav = False
    near_uav = False
    for p in peers:
        d = dist(uav.x, uav.y, p.x, p.y)
        if d < 2 * config.uav_radius:
            hit_uav = True
        if d <= config.epsilon_proximity:
            near_uav = True

    hit_obstacle = any(
        disc_obb_overlap(uav.x, uav.y, config.uav_radius, ob) for ob in obstacles
    )
    hit_wall = (uav.x < state.x_min or uav.x > state.x_max
                or uav.y < state.y_min or uav.y > state.y_max)

    return StepEvents(
        reached_own_goal=reached_own,
        reached_other_goal=reached_other,
        hit_uav=hit_uav,
        hit_obstacle=hit_obstacle,
        hit_wall=hit_wall,
        near_own_goal=near_own,
        near_other_uav=near_uav,
    )


def _resolve_priority(ev: StepEvents) -> StepEvents:
    if ev.reached_own_goal:
        keep = "reached_own_goal"
    elif ev.reached_other_goal:
        keep = "reached_other_goal"
    elif ev.hit_uav:
        keep = "hit_uav"
    elif ev.hit_obstacle:
        keep = "hit_obstacle"
    elif ev.hit_wall:
        keep = "hit_wall"
    else:
        return ev
    return StepEvents(
        near_own_goal=ev.near_own_goal,
        near_other_uav=ev.near_other_uav,
        **{keep: True},
    )


def step(state: WorldState, actions, config: EnvConfig) -> StepResult:
    """Advance one tick.

    actions maps agent_id -> ActionId for alive agents; entries for dead or
    finished agents are ignored (reported via StepResult.ignored, not an
    error).  Missing entries for alive agents raise.
    """
    alive_ids = [u.id for u in state.uavs if u.alive]
    ignored = tuple(a for a in actions if a not in alive_ids)
    for a in alive_ids:
        if a not in actions:
            raise ValueError(f"no action supplied for alive agent {a}")

    moved = []
    for u in state.uavs:
        if u.alive:
            x, y, h = _move(u, ActionId(actions[u.id]), config)
            moved.append(u.__class__(id=u.id, x=x, y=y, heading=h, alive=True))
        else:
            moved.append(u)

    tick = state.tick + 1
    truncated = tick >= config.max_episode_steps

    events = {}
    rewards = {}
    dones = {}
    for u in moved:
        if not u.alive:
            events[u.id] = NO_EVENTS
            rewards[u.id] = 0.0
            dones[u.id] = True
            continue
        peers = [p for p in moved if p.alive and p.id != u.id]
        ev = _resolve_priority(
            _raw_events(u, peers, state.goals, state.obstacles, state, config)
        )
        events[u.id] = ev
        rewards[u.id] = compute_reward(ev, config)
        dones[u.id] = ev.terminal or truncated

    # despawn: terminal agents leave the arena; success also retires the goal
    new_uavs = []
    retired_goals = set()
    for u in moved:
        ev = events[u.id]
        if u.alive and ev.terminal:
            new_uavs.append(u.__class__(id=u.id, x=u.x, y=u.y, heading=u.heading,
                                        alive=False))
            if ev.reached_own_goal:
                retired_goals.add(u.id)
        else:
            new_uavs.append(u)
    new_goals = tuple(
        g.__class__(owner_id=g.owner_id, x=g.x, y=g.y, active=False)
        if g.owner_id in retired_goals else g
        for g in state.goals
    )

    new_state = state.replace(tick=tick, uavs=tuple(new_uavs), goals=new_goals)
    return StepResult(state=new_state, rewards=rewards, dones=dones,
                      events=events, truncated=truncated, ignored=ignored)


class Environment:
    """Stateful episode wrapper over the pure spawn/step functions.

    Tracks per-agent terminal events so success can be queried after the
    fact.  One instance is strictly single-threaded; run several instances
    for parallel rollouts (each owns its RNG stream via the reset seed).
    """

    def __init__(self, config: EnvConfig):
        self.config = config
        self.state = None
        self.terminal_events = {}
        self.finished = {}
        self.episode_reward = {}

    def reset(self, seed) -> WorldState:
        self.state = spawn_episode(self.config, seed)
        self.terminal_events = {u.id: None for u in self.state.uavs}
        self.finished = {u.id: False for u in self.state.uavs}
        self.episode_reward = {u.id: 0.0 for u in self.state.uavs}
        return self.state

    def step(self, actions) -> StepResult:
        if self.state is None:
            raise RuntimeError("reset() before step()")
        res = step(self.state, actions, self.config)
        self.state = res.state
        for aid, ev in res.events.items():
            if self.finished[aid]:
                continue
            self.episode_reward[aid] += res.rewards[aid]
            if ev.terminal:
                self.terminal_events[aid] = ev
                self.finished[aid] = True
            elif res.truncated:
                self.finished[aid] = True
        return res

    @property
    def episode_done(self) -> bool:
        return all(self.finished.values())

    def check_success(self, agent_id) -> bool:
        """True iff the agent's terminal event was reaching its own goal."""
        if not self.finished.get(agent_id, False):
            raise NotFinishedError(f"agent {agent_id} episode not finished")
        ev = self.terminal_events[agent_id]
        return ev is not None and ev.reached_own_goal
