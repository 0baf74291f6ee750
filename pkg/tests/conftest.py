import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from racil.config import TrainConfig
from racil.sim import EnvConfig
from racil.sense import SensorConfig


@pytest.fixture
def env_config():
    return EnvConfig()


@pytest.fixture
def sensor():
    return SensorConfig()


@pytest.fixture
def small_cfg():
    """Tiny nets / tiny buffer for fast trainer tests."""
    return TrainConfig(total_steps=6144, steps_bc=2048, buffer_size=512,
                       batch_size=256, hidden_units=16, num_layers=2,
                       eval_every=4096, n_envs=2, seed=11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def make_demo_file(tmp_path, cfg: TrainConfig, n_episodes=5, seed=3):
    from racil.demos import generate_demos, save_demos

    demo = generate_demos(cfg.env_config(), cfg.sensor_config(), n_episodes,
                          seed=seed, obs_cfg=cfg.observation_config())
    path = os.path.join(tmp_path, "expert.racildemo")
    save_demos(demo, path)
    return path
