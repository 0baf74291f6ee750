"""Config file parsing, dumping, invariants, derived objects."""

import pytest

from racil.config import TrainConfig, dump_config, load_config, parse_config_text
from racil.sim import ConfigError


GOOD = """
# training table
batch_size = 1024
buffer_size = 2048
learning_rate = 3.0e-4
beta = 0.005
epsilon = 0.2
lambda = 0.95
num_epoch = 3
learning_rate_schedule = linear
beta_schedule = constant
normalize = false
hidden_units = 1024
num_layers = 8
extrinsic_gamma = 0.99
extrinsic_strength = 1.0
gail_gamma = 0.99
gail_strength = 1.0
bc_strength = 0.5
steps_bc = 100000
r_f = 10000
r_p = 0.2
r_tp = 1
x_max = 15
y_max = 15
x_min = -15
y_min = -15
r_min = 3.5
r_max = 3.5
n_obstacles = 4
epsilon_proximity = 5
total_steps = 10000000
n_uavs = 1
seed = 0
use_raycast = true
use_bc = true
use_gail = true
"""


class TestParsing:
    def test_full_table_parses(self):
        cfg = parse_config_text(GOOD)
        assert cfg.batch_size == 1024
        assert cfg.gae_lambda == 0.95
        assert cfg.hidden_units == 1024
        assert cfg.num_layers == 8
        assert cfg.steps_bc == 100000
        assert cfg.normalize is False
        assert cfg.r_f == 10000.0

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config_text("nonsense_key = 5\n")
        assert "nonsense_key" in str(err.value)

    def test_bad_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("batch_size = soon\n")

    def test_missing_equals_rejected(self):
        with pytest.raises(ConfigError):
            parse_config_text("batch_size 5\n")

    def test_comments_and_blanks_ok(self):
        cfg = parse_config_text("# hi\n\nseed = 4\n")
        assert cfg.seed == 4

    def test_dump_round_trip(self, tmp_path):
        cfg = TrainConfig(seed=123, hidden_units=64, use_gail=False,
                          gae_lambda=0.9)
        path = tmp_path / "c.cfg"
        path.write_text(dump_config(cfg), encoding="utf-8")
        assert load_config(path) == cfg

    def test_dump_uses_verbatim_lambda_key(self):
        assert "\nlambda = " in dump_config(TrainConfig())
        assert "gae_lambda" not in dump_config(TrainConfig())


class TestInvariants:
    def test_batch_le_buffer(self):
        with pytest.raises(ConfigError):
            TrainConfig(batch_size=4096, buffer_size=2048)

    def test_steps_bc_le_total(self):
        with pytest.raises(ConfigError):
            TrainConfig(steps_bc=500, total_steps=100)

    def test_negative_strength_rejected(self):
        with pytest.raises(ConfigError):
            TrainConfig(gail_strength=-0.1)

    def test_env_invariants_surface(self):
        with pytest.raises(ConfigError):
            TrainConfig(r_min=20.0, r_max=20.0)


class TestDerived:
    def test_raycast_obs_dim(self):
        cfg = TrainConfig()
        assert cfg.obs_dim() == 4 + 15 * 7

    def test_coordinate_obs_dim(self):
        cfg = TrainConfig(use_raycast=False, n_obstacles=4, n_uavs=2)
        assert cfg.obs_dim() == 4 + 2 * (4 + 1)

    def test_actor_critic_disc_specs(self):
        cfg = TrainConfig(hidden_units=32, num_layers=3)
        assert cfg.actor_spec().output_dim == 3
        assert cfg.critic_spec().output_dim == 2
        assert cfg.actor_spec().num_layers == 3
        assert cfg.disc_spec().input_dim == cfg.obs_dim() + 3
        assert cfg.disc_spec().output_head == "sigmoid"

    def test_toggle_variants_expressible(self):
        """The three studied policy variants are pure config toggles."""
        ppo_bc = TrainConfig(use_raycast=False, use_bc=True, use_gail=False)
        ppo_bc_ray = TrainConfig(use_raycast=True, use_bc=True, use_gail=False)
        full = TrainConfig(use_raycast=True, use_bc=True, use_gail=True)
        assert ppo_bc.obs_dim() != ppo_bc_ray.obs_dim()
        assert full.use_gail and not ppo_bc_ray.use_gail
