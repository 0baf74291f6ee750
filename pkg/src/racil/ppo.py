"""PPO machinery: rollout storage, GAE advantages, clipped surrogate loss.

Rewards flow through two channels (extrinsic, adversarial-imitation) that are
advantage-estimated separately, combined with their strength weights, and
normalized per update batch.  All agents share one policy; each agent's
transitions form an independent stream in the buffer.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nn import autodiff as ad
from .nn.autodiff import Tensor

VALUE_LOSS_COEF = 0.5


@dataclass(frozen=True)
class Transition:
    observation: np.ndarray
    action: int
    log_prob_old: float
    value_old: float
    reward_extrinsic: float
    reward_gail: float
    done: bool  # true terminal only; a stream ending done=False is truncated
    agent_id: int

    def __post_init__(self):
        if self.log_prob_old > 1e-12:
            raise ValueError("log_prob_old must be <= 0")
        if not (np.isfinite(self.reward_extrinsic) and np.isfinite(self.reward_gail)):
            raise ValueError("non-finite reward")


class RolloutBuffer:
    """Ordered transitions grouped into per-agent episode streams."""

    def __init__(self, buffer_size):
        self.buffer_size = buffer_size
        self._streams = {}  # key -> list[Transition]; insertion-ordered
        self._count = 0

    def add(self, stream_key, transition: Transition):
        self._streams.setdefault(stream_key, []).append(transition)
        self._count += 1

    def __len__(self):
        return self._count

    @property
    def full(self):
        return self._count >= self.buffer_size

    def streams(self):
        return self._streams.items()

    def flat_transitions(self):
        out = []
        for _key, stream in self._streams.items():
            out.extend(stream)
        return out

    def clear(self):
        self._streams = {}
        self._count = 0


@dataclass(frozen=True)
class AdvantageSet:
    transitions: list
    adv_extrinsic: np.ndarray
    adv_gail: np.ndarray
    ret_extrinsic: np.ndarray
    ret_gail: np.ndarray
    combined: np.ndarray  # strength-weighted and batch-normalized


def _gae_stream(rewards, values, dones, bootstrap, gamma, lam):
    """GAE(gamma, lambda) over one stream; bootstrap is V(s_{T+1}) used when
    the stream was truncated (last done False)."""
    T = len(rewards)
    adv = np.zeros(T)
    last = 0.0
    for t in range(T - 1, -1, -1):
        cont = 0.0 if dones[t] else 1.0
        v_next = bootstrap if t == T - 1 else values[t + 1]
        delta = rewards[t] + gamma * cont * v_next - values[t]
        last = delta + gamma * lam * cont * last
        adv[t] = last
    return adv


def compute_advantages(buffer: RolloutBuffer, gamma_ext, gamma_gail, lam,
                       critic_values, bootstrap_values=None,
                       extrinsic_strength=1.0, gail_strength=1.0,
                       normalize=True, mode="gae") -> AdvantageSet:
    """GAE advantages per channel, returns = advantages + values.

    critic_values: stream_key -> (T, 2) value estimates (ext, gail channels).
    bootstrap_values: stream_key -> (2,) values for truncated stream tails.
    mode "simple" uses lambda = 1 (discounted return minus value).
    """
    if mode not in ("gae", "simple"):
        raise ValueError(f"unknown advantage mode {mode!r}")
    lam_eff = 1.0 if mode == "simple" else lam
    bootstrap_values = bootstrap_values or {}

    flat, a_ext, a_gail, r_ext, r_gail = [], [], [], [], []
    for key, stream in buffer.streams():
        vals = np.asarray(critic_values[key], dtype=np.float64).reshape(len(stream), 2)
        boot = np.asarray(bootstrap_values.get(key, (0.0, 0.0)), dtype=np.float64)
        rewards_e = np.array([tr.reward_extrinsic for tr in stream])
        rewards_g = np.array([tr.reward_gail for tr in stream])
        dones = np.array([tr.done for tr in stream])
        adv_e = _gae_stream(rewards_e, vals[:, 0], dones, boot[0], gamma_ext, lam_eff)
        adv_g = _gae_stream(rewards_g, vals[:, 1], dones, boot[1], gamma_gail, lam_eff)
        flat.extend(stream)
        a_ext.append(adv_e)
        a_gail.append(adv_g)
        r_ext.append(adv_e + vals[:, 0])
        r_gail.append(adv_g + vals[:, 1])

    adv_ext = np.concatenate(a_ext) if a_ext else np.zeros(0)
    adv_gail = np.concatenate(a_gail) if a_gail else np.zeros(0)
    combined = extrinsic_strength * adv_ext + gail_strength * adv_gail
    if normalize and combined.size > 1:
        mean = combined.mean()
        std = combined.std()
        if std > 0.0:
            combined = (combined - mean) / std
        else:
            combined = combined - mean
    return AdvantageSet(
        transitions=flat,
        adv_extrinsic=adv_ext,
        adv_gail=adv_gail,
        ret_extrinsic=np.concatenate(r_ext) if r_ext else np.zeros(0),
        ret_gail=np.concatenate(r_gail) if r_gail else np.zeros(0),
        combined=combined,
    )


def ppo_loss(policy_logits: Tensor, old_log_probs, actions, advantages,
             returns, values: Tensor, epsilon, beta, value_coef=VALUE_LOSS_COEF):
    """Clipped-surrogate objective with value loss and entropy bonus.

    loss = -mean(min(r*A, clip(r, 1-eps, 1+eps)*A))
           + value_coef * mean((V - returns)^2) - beta * entropy
    Returns (scalar loss Tensor, float components for logging).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be > 0")
    old_log_probs = np.asarray(old_log_probs, dtype=np.float64)
    advantages = np.asarray(advantages, dtype=np.float64)
    returns = np.asarray(returns, dtype=np.float64)
    if not (np.all(np.isfinite(old_log_probs)) and np.all(np.isfinite(advantages))
            and np.all(np.isfinite(returns))):
        raise ValueError("non-finite loss inputs")

    n, n_actions = policy_logits.data.shape
    onehot = np.zeros((n, n_actions))
    onehot[np.arange(n), np.asarray(actions, dtype=int)] = 1.0

    lsm = ad.log_softmax(policy_logits)
    logp = (lsm * onehot).sum(axis=1)
    ratio = ad.exp(logp - old_log_probs)
    surr = ad.minimum(ratio * advantages,
                      ad.clip(ratio, 1.0 - epsilon, 1.0 + epsilon) * advantages)
    policy_term = -surr.mean()

    value_loss = (values - returns.reshape(values.data.shape)).square().mean()
    entropy = -(ad.exp(lsm) * lsm).sum(axis=1).mean()

    loss = policy_term + value_coef * value_loss + (-beta) * entropy
    components = {
        "policy_loss": float(policy_term.data),
        "value_loss": float(value_loss.data),
        "entropy": float(entropy.data),
    }
    return loss, components


def _stable_log_probs(logits):
    z = logits - logits.max(axis=-1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=-1, keepdims=True))


def sample_action(policy_logits, rng, argmax=False):
    """Categorical draw from one logit row; returns (action, log_prob)."""
    logits = np.asarray(policy_logits, dtype=np.float64).reshape(-1)
    logp = _stable_log_probs(logits)
    if argmax:
        a = int(np.argmax(logits))
    else:
        p = np.exp(logp)
        a = int(np.searchsorted(np.cumsum(p), rng.random()))
        a = min(a, len(logits) - 1)
    return a, float(logp[a])


def sample_actions(policy_logits, rng, argmax=False):
    """Vectorized categorical draws for a batch of logit rows."""
    logits = np.atleast_2d(np.asarray(policy_logits, dtype=np.float64))
    logp = _stable_log_probs(logits)
    if argmax:
        acts = np.argmax(logits, axis=1)
    else:
        p = np.exp(logp)
        cdf = np.cumsum(p, axis=1)
        u = rng.random(logits.shape[0])
        acts = (cdf < u[:, None]).sum(axis=1)
        acts = np.minimum(acts, logits.shape[1] - 1)
    return acts.astype(int), logp[np.arange(len(acts)), acts]
