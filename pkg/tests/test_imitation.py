"""Cloning loss and discriminator: values, bounds, gradients, symmetry."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from racil.imitation import (DISC_CLAMP_DELTA, BatchError, DiscriminatorOutput,
                             ExpertBatch, bc_loss, disc_input,
                             discriminator_loss, discriminator_update,
                             gail_reward, gail_rewards)
from racil.nn import (MlpSpec, ParamVector, bind, collect_grads, forward,
                      forward_bound, init_optimizer, init_params, zero_params)

from oracles import central_difference, relative_error


def onehot(idx, n=3):
    out = np.zeros((len(idx), n))
    out[np.arange(len(idx)), idx] = 1.0
    return out


class TestBcLoss:
    def test_perfect_match_zero(self):
        probs = np.array([[0.0, 1.0, 0.0]])
        assert float(bc_loss(probs, probs).data) == 0.0

    def test_uniform_policy_hand_value(self):
        """(1/3,1/3,1/3) vs one-hot: 0.5*((2/3)^2+(1/3)^2+(1/3)^2) = 1/3."""
        probs = np.full((1, 3), 1 / 3)
        expert = np.array([[1.0, 0.0, 0.0]])
        assert float(bc_loss(probs, expert).data) == pytest.approx(1 / 3)

    def test_batch_mean(self):
        probs = np.array([[1.0, 0.0, 0.0], [1 / 3, 1 / 3, 1 / 3]])
        expert = np.array([[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]])
        assert float(bc_loss(probs, expert).data) == pytest.approx(1 / 6)

    def test_dimension_mismatch(self):
        with pytest.raises(BatchError):
            bc_loss(np.zeros((2, 3)), np.zeros((3, 3)))

    @settings(max_examples=80, deadline=None, derandomize=True)
    @given(st.lists(st.floats(-5, 5), min_size=3, max_size=3),
           st.integers(0, 2))
    def test_zero_iff_exact_match(self, logits, expert_idx):
        z = np.array(logits) - max(logits)
        p = np.exp(z) / np.exp(z).sum()
        expert = onehot([expert_idx])
        loss = float(bc_loss(p[None, :], expert).data)
        if np.allclose(p, expert[0], atol=1e-12):
            assert loss == pytest.approx(0.0, abs=1e-12)
        else:
            assert loss > 0.0

    def test_gradient_matches_finite_differences(self):
        spec = MlpSpec(input_dim=4, hidden_units=16, num_layers=2, output_dim=3)
        p = init_params(spec, 21)
        X = np.random.default_rng(0).normal(size=(8, 4))
        expert = onehot(np.random.default_rng(1).integers(0, 3, size=8))

        def loss_t(vec):
            layers = bind(spec, ParamVector(vec, spec))
            probs = forward_bound(spec, layers, X, head="softmax")
            return bc_loss(probs, expert), layers

        loss, layers = loss_t(p.data)
        loss.backward()
        g = collect_grads(spec, layers)
        fd = central_difference(lambda v: float(loss_t(v)[0].data), p.data)
        assert relative_error(g, fd, floor=1e-6).max() < 1e-4


class TestGailReward:
    def test_clamp_bounds(self):
        assert DiscriminatorOutput(1.0).clamped() == 1.0 - DISC_CLAMP_DELTA
        assert DiscriminatorOutput(0.0).clamped() == DISC_CLAMP_DELTA
        assert DiscriminatorOutput(0.25).clamped() == 0.25

    def test_spot_values(self):
        assert math.log(DiscriminatorOutput(0.5).clamped()) == \
            pytest.approx(-0.6931, abs=1e-4)
        assert math.log(DiscriminatorOutput(0.0).clamped()) == \
            pytest.approx(math.log(1e-7), abs=1e-9)
        assert math.log(DiscriminatorOutput(1.0).clamped()) == \
            pytest.approx(-1e-7, rel=1e-3)

    def test_reward_via_network_nonpositive_and_bounded(self):
        spec = MlpSpec(input_dim=5, hidden_units=8, num_layers=1, output_dim=1,
                       output_head="sigmoid")
        p = init_params(spec, 5)
        rng = np.random.default_rng(2)
        for _ in range(50):
            obs = rng.normal(size=2)
            r = gail_reward(spec, p, obs, int(rng.integers(0, 3)))
            assert math.log(DISC_CLAMP_DELTA) <= r <= math.log(1 - DISC_CLAMP_DELTA)

    def test_monotone_in_d(self):
        ds = np.linspace(0.01, 0.99, 20)
        rewards = [math.log(DiscriminatorOutput(d).clamped()) for d in ds]
        assert all(a < b for a, b in zip(rewards, rewards[1:]))

    def test_batched_matches_single(self):
        spec = MlpSpec(input_dim=5, hidden_units=8, num_layers=1, output_dim=1,
                       output_head="sigmoid")
        p = init_params(spec, 50)
        obs = np.random.default_rng(3).normal(size=(6, 2))
        acts = np.array([0, 1, 2, 0, 1, 2])
        batch = gail_rewards(spec, p, obs, acts)
        single = [gail_reward(spec, p, obs[i], acts[i]) for i in range(6)]
        assert batch == pytest.approx(single)


class TestDiscriminator:
    def _tiny(self, obs_dim=4):
        spec = MlpSpec(input_dim=obs_dim + 3, hidden_units=16, num_layers=2,
                       output_dim=1, output_head="sigmoid")
        return spec, init_params(spec, 33)

    def test_identical_batches_optimum_loss(self):
        """Indistinguishable classes: D == 0.5 gives loss 2 ln 2."""
        spec, _ = self._tiny()
        p = zero_params(spec)  # all-zero net -> sigmoid(0) = 0.5 everywhere
        rng = np.random.default_rng(1)
        obs = rng.normal(size=(16, 4))
        acts = rng.integers(0, 3, size=16)
        x = disc_input(obs, onehot(acts))
        assert discriminator_loss(spec, p, x, x) == \
            pytest.approx(2 * math.log(2), abs=1e-12)

    def test_swap_symmetry_at_half(self):
        spec, _ = self._tiny()
        p = zero_params(spec)
        rng = np.random.default_rng(2)
        xa = disc_input(rng.normal(size=(8, 4)), onehot(rng.integers(0, 3, 8)))
        xe = disc_input(rng.normal(size=(8, 4)), onehot(rng.integers(0, 3, 8)))
        assert abs(discriminator_loss(spec, p, xa, xe)
                   - discriminator_loss(spec, p, xe, xa)) < 1e-9

    def test_gradient_matches_finite_differences(self):
        spec, p = self._tiny()
        rng = np.random.default_rng(7)
        agent_x = disc_input(rng.normal(size=(8, 4)),
                             onehot(rng.integers(0, 3, 8)))
        expert_x = disc_input(rng.normal(size=(8, 4)),
                              onehot(rng.integers(0, 3, 8)))

        from racil.imitation import _bce_loss_tensor

        def loss_t(vec):
            layers = bind(spec, ParamVector(vec, spec))
            return _bce_loss_tensor(spec, layers, agent_x, expert_x), layers

        loss, layers = loss_t(p.data)
        loss.backward()
        g = collect_grads(spec, layers)
        fd = central_difference(lambda v: float(loss_t(v)[0].data), p.data)
        assert relative_error(g, fd, floor=1e-6).max() < 1e-4

    def test_update_step_returns_post_loss(self):
        spec, p = self._tiny()
        rng = np.random.default_rng(9)
        agent = ExpertBatch(rng.normal(size=(8, 4)) + 2.0,
                            rng.integers(0, 3, size=8), source="agent")
        expert = ExpertBatch(rng.normal(size=(8, 4)) - 2.0,
                             rng.integers(0, 3, size=8))
        opt = init_optimizer(p)
        before = discriminator_loss(
            spec, p, disc_input(agent.observations, agent.actions_onehot(3)),
            disc_input(expert.observations, expert.actions_onehot(3)))
        p2, opt2, after = discriminator_update(spec, p, opt, agent, expert,
                                               lr=1e-3)
        assert opt2.step == 1
        assert after < before  # one Adam step on separable data helps

    def test_empty_batch_rejected(self):
        spec, p = self._tiny()
        empty = ExpertBatch(np.zeros((0, 4)), np.zeros(0, dtype=int))
        full = ExpertBatch(np.zeros((2, 4)), np.zeros(2, dtype=int))
        with pytest.raises(BatchError):
            discriminator_update(spec, p, init_optimizer(p), empty, full, 1e-3)

    def test_separable_data_trains(self):
        """Shrunk twin of the acceptance run: 200 updates on well-separated
        clusters pushes D(expert) and D(agent) apart."""
        spec, p = self._tiny()
        rng = np.random.default_rng(10)
        opt = init_optimizer(p)
        expert_obs = rng.normal(size=(64, 4)) + 3.0
        agent_obs = rng.normal(size=(64, 4)) - 3.0
        expert = ExpertBatch(expert_obs, rng.integers(0, 3, size=64))
        agent = ExpertBatch(agent_obs, rng.integers(0, 3, size=64),
                            source="agent")
        for _ in range(200):
            p, opt, _loss = discriminator_update(spec, p, opt, agent, expert,
                                                 lr=3e-3)
        d_expert = forward(spec, p, disc_input(expert_obs,
                                               expert.actions_onehot(3)))
        d_agent = forward(spec, p, disc_input(agent_obs,
                                              agent.actions_onehot(3)))
        assert d_expert.mean() > 0.8
        assert d_agent.mean() < 0.2
