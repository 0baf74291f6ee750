"""Imitation channels: supervised cloning loss and the adversarial
discriminator with its log-score reward.

The discriminator is trained toward D(expert pair) -> 1 and
D(agent pair) -> 0; the agent's imitation reward is log D(s, a), so
expert-like behavior earns rewards near 0 and off-manifold behavior
approaches log(delta).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import autodiff as ad
from .nn.autodiff import Tensor
from .nn.mlp import MlpSpec, ParamVector, bind, collect_grads, forward, forward_bound
from .nn.optim import OptimizerState, adam_step

DISC_CLAMP_DELTA = 1e-7


class BatchError(ValueError):
    pass


@dataclass(frozen=True)
class ExpertBatch:
    observations: np.ndarray  # (N, obs_dim)
    actions: np.ndarray       # (N,) int action ids
    source: str = "scripted"  # scripted | human

    def __post_init__(self):
        if self.observations.shape[0] != self.actions.shape[0]:
            raise BatchError("observation/action row counts differ")

    def __len__(self):
        return self.observations.shape[0]

    def actions_onehot(self, n_actions):
        out = np.zeros((len(self), n_actions))
        out[np.arange(len(self)), self.actions] = 1.0
        return out


@dataclass(frozen=True)
class DiscriminatorOutput:
    """Raw score in (0,1); clamp() must precede any logarithm."""

    d: float

    def clamped(self):
        return min(max(self.d, DISC_CLAMP_DELTA), 1.0 - DISC_CLAMP_DELTA)


def bc_loss(policy_probs, expert_actions_onehot) -> Tensor:
    """Half mean squared distance between the action-probability vector and
    the expert one-hot (mean over the batch keeps the loss size-invariant)."""
    probs = policy_probs if isinstance(policy_probs, Tensor) else ad.as_tensor(policy_probs)
    onehot = np.asarray(expert_actions_onehot, dtype=np.float64)
    if probs.data.shape != onehot.shape:
        raise BatchError(
            f"probability shape {probs.data.shape} != expert shape {onehot.shape}")
    return 0.5 * (probs - onehot).square().sum(axis=1).mean()


def disc_input(observations, actions_onehot):
    return np.concatenate([np.asarray(observations, dtype=np.float64),
                           np.asarray(actions_onehot, dtype=np.float64)], axis=1)


def _bce_loss_tensor(spec, layers, agent_x, expert_x):
    d_expert = forward_bound(spec, layers, expert_x)
    d_agent = forward_bound(spec, layers, agent_x)
    lo, hi = DISC_CLAMP_DELTA, 1.0 - DISC_CLAMP_DELTA
    loss_e = -ad.log(ad.clip(d_expert, lo, hi)).mean()
    loss_a = -ad.log(1.0 - ad.clip(d_agent, lo, hi)).mean()
    return loss_e + loss_a


def discriminator_loss(spec: MlpSpec, params: ParamVector, agent_x, expert_x) -> float:
    """Plain (no-tape) binary cross-entropy of the current discriminator."""
    lo, hi = DISC_CLAMP_DELTA, 1.0 - DISC_CLAMP_DELTA
    d_e = np.clip(forward(spec, params, expert_x), lo, hi)
    d_a = np.clip(forward(spec, params, agent_x), lo, hi)
    return float(-np.log(d_e).mean() - np.log(1.0 - d_a).mean())


def discriminator_update(spec: MlpSpec, params: ParamVector,
                         opt_state: OptimizerState, agent_batch: ExpertBatch,
                         expert_batch: ExpertBatch, lr, n_actions=3):
    """One Adam step on the binary cross-entropy objective.

    Returns (new_params, new_opt_state, post-update loss).
    """
    if len(agent_batch) == 0 or len(expert_batch) == 0:
        raise BatchError("empty discriminator batch")
    agent_x = disc_input(agent_batch.observations,
                         agent_batch.actions_onehot(n_actions))
    expert_x = disc_input(expert_batch.observations,
                          expert_batch.actions_onehot(n_actions))
    layers = bind(spec, params)
    loss = _bce_loss_tensor(spec, layers, agent_x, expert_x)
    loss.backward()
    grads = collect_grads(spec, layers)
    new_params, new_opt = adam_step(params, grads, opt_state, lr)
    return new_params, new_opt, discriminator_loss(spec, new_params, agent_x, expert_x)


def gail_reward(spec: MlpSpec, params: ParamVector, observation, action,
                n_actions=3) -> float:
    """log of the clamped discriminator score for one (s, a) pair; <= 0."""
    onehot = np.zeros(n_actions)
    onehot[int(action)] = 1.0
    x = np.concatenate([np.asarray(observation, dtype=np.float64), onehot])
    d = DiscriminatorOutput(float(forward(spec, params, x)[0]))
    return float(np.log(d.clamped()))


def gail_rewards(spec: MlpSpec, params: ParamVector, observations, actions,
                 n_actions=3) -> np.ndarray:
    """Batched gail_reward."""
    obs = np.atleast_2d(np.asarray(observations, dtype=np.float64))
    onehot = np.zeros((obs.shape[0], n_actions))
    onehot[np.arange(obs.shape[0]), np.asarray(actions, dtype=int)] = 1.0
    d = forward(spec, params, np.concatenate([obs, onehot], axis=1))
    d = np.clip(d.reshape(-1), DISC_CLAMP_DELTA, 1.0 - DISC_CLAMP_DELTA)
    return np.log(d)
