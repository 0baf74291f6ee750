"""Reward function: spot values and full decomposition over event flags."""

import itertools

import pytest

from racil.sim import EnvConfig, StepEvents, compute_reward

CFG = EnvConfig()  # r_f=10000, r_p=0.2, r_tp=1

FLAGS = ("reached_own_goal", "reached_other_goal", "hit_uav", "hit_obstacle",
         "hit_wall", "near_own_goal", "near_other_uav")
TERMINAL_FLAGS = FLAGS[:5]


def events(**kw):
    return StepEvents(**kw)


class TestSpotValues:
    def test_idle_step(self):
        assert compute_reward(events(), CFG) == -1.0

    def test_proximity_to_own_goal(self):
        r = compute_reward(events(near_own_goal=True), CFG)
        assert r == pytest.approx(0.2 - 1.0)  # -0.8

    def test_obstacle_collision(self):
        r = compute_reward(events(hit_obstacle=True), CFG)
        assert r == pytest.approx(-10000 / 2 - 1)  # -5001

    def test_own_goal(self):
        assert compute_reward(events(reached_own_goal=True), CFG) == \
            pytest.approx(10000 - 1)

    def test_other_goal(self):
        assert compute_reward(events(reached_other_goal=True), CFG) == \
            pytest.approx(-10000 - 1)

    def test_uav_collision(self):
        assert compute_reward(events(hit_uav=True), CFG) == \
            pytest.approx(-10000 - 1)

    def test_near_other_uav(self):
        assert compute_reward(events(near_other_uav=True), CFG) == \
            pytest.approx(-0.2 - 1.0)


def reference_decomposition(ev: StepEvents, cfg: EnvConfig):
    """Independent case-by-case tally of the three reward components."""
    r_collision = 0.0
    if ev.reached_own_goal:
        r_collision += cfg.r_f
    if ev.reached_other_goal:
        r_collision += -cfg.r_f
    if ev.hit_uav:
        r_collision += -cfg.r_f
    if ev.hit_obstacle or ev.hit_wall:
        r_collision += -cfg.r_f / 2
    r_proximity = (cfg.r_p if ev.near_own_goal else 0.0) \
        + (-cfg.r_p if ev.near_other_uav else 0.0)
    r_time = -cfg.r_tp
    return r_collision + r_proximity + r_time


class TestDecomposition:
    def test_all_valid_flag_combinations(self):
        """Every combination with at most one terminal flag (the priority
        resolution excludes multi-terminal combinations)."""
        checked = 0
        for bits in itertools.product([False, True], repeat=len(FLAGS)):
            ev = StepEvents(**dict(zip(FLAGS, bits)))
            n_terminal = sum(getattr(ev, f) for f in TERMINAL_FLAGS)
            if n_terminal > 1:
                continue  # impossible after resolution
            assert compute_reward(ev, CFG) == pytest.approx(
                reference_decomposition(ev, CFG), abs=1e-12)
            checked += 1
        assert checked == 6 * 4  # 6 terminal states x 4 proximity states

    def test_terminal_exclusivity_reward_magnitudes(self):
        """At most one of {+r_f, -r_f, -r_f/2} appears in any valid event."""
        for flag in TERMINAL_FLAGS:
            ev = StepEvents(**{flag: True})
            big = compute_reward(ev, CFG) + CFG.r_tp
            assert abs(big) in (CFG.r_f, CFG.r_f / 2)
