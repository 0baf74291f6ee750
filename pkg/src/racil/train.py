"""Composite training loop: cloning warmup, then PPO with the adversarial
imitation reward channel.

Phase 1 (first steps_bc env steps, when cloning is enabled): rollouts are
collected for metrics while the actor takes supervised cloning updates only.
Phase 2: every full buffer triggers num_epoch epochs of clipped-surrogate
minibatch updates on strength-combined advantages, plus one discriminator
step per epoch (freshest rollout vs. a uniform random expert batch).

Everything is driven by named PCG64 substreams of the run seed, so a
(config, seed, demo file) triple fully determines the metrics log.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass

import numpy as np

from .checkpoint import ModelBundle, fresh_bundle, save_checkpoint
from .config import TrainConfig, dump_config
from .demos import DemoDataset, load_demos
from .digests import env_digest, observation_digest
from .geom import scene_from_world
from .imitation import (ExpertBatch, bc_loss, discriminator_update,
                        gail_rewards)
from .metrics import MetricsRow, MetricsWriter
from .nn import (NeuralError, adam_step, bind, collect_grads, forward,
                 forward_bound, init_params, lr_at)
from .nn import autodiff as ad
from .ppo import RolloutBuffer, Transition, compute_advantages, ppo_loss, \
    sample_actions
from .sense import CoordinateSensorConfig, observe, observe_coordinates
from .sim import Environment


class TrainError(RuntimeError):
    pass


# Supervised minibatches per buffer fill during the cloning warmup, as a
# multiple of the PPO minibatch count.  Cloning steps are ~100x cheaper than
# the env steps they alternate with, and the warmup budget (steps_bc) counts
# env steps, so several supervised passes per fill are needed for the clone
# to sharpen before the PPO phase starts.
BC_EPOCH_MULTIPLIER = 8


@dataclass
class Models:
    actor: ModelBundle
    critic: ModelBundle
    disc: ModelBundle


def _rng(seed, *tags):
    return np.random.Generator(np.random.PCG64(
        np.random.SeedSequence(entropy=[int(seed), *tags])))


class RolloutWorker:
    """One environment instance plus per-agent stream bookkeeping."""

    def __init__(self, cfg: TrainConfig, env_idx):
        self.cfg = cfg
        self.env_idx = env_idx
        self.env = Environment(cfg.env_config())
        self.obs_cfg = cfg.observation_config()
        self.episode_idx = -1
        self.segment = 0
        self.cur_obs = {}
        self.ep_return = {}
        self.ep_len = {}
        self._next_episode()

    def _observe(self, aid, scene=None):
        if isinstance(self.obs_cfg, CoordinateSensorConfig):
            return observe_coordinates(self.env.state, aid, self.obs_cfg)
        return observe(self.env.state, aid, self.obs_cfg, scene=scene)

    def _next_episode(self):
        self.episode_idx += 1
        self.segment = 0
        self.env.reset(np.random.SeedSequence(
            entropy=[int(self.cfg.seed), 1000 + self.env_idx, self.episode_idx]))
        scene = scene_from_world(self.env.state)
        self.cur_obs = {u.id: self._observe(u.id, scene) for u in self.env.state.uavs}
        self.ep_return = {u.id: 0.0 for u in self.env.state.uavs}
        self.ep_len = {u.id: 0 for u in self.env.state.uavs}

    def active_agents(self):
        return [u.id for u in self.env.state.uavs
                if u.alive and not self.env.finished[u.id]]

    def stream_key(self, aid):
        return (self.env_idx, self.episode_idx, self.segment, aid)

    def cut_streams(self):
        """Start a new stream segment (buffer boundary mid-episode)."""
        self.segment += 1


class EpisodeStats:
    def __init__(self, window=100):
        self.returns = deque(maxlen=window)
        self.lengths = deque(maxlen=window)
        self.successes = deque(maxlen=window)

    def add(self, ep_return, length, success):
        self.returns.append(ep_return)
        self.lengths.append(length)
        self.successes.append(1.0 if success else 0.0)

    def summary(self):
        if not self.returns:
            return 0.0, 0.0, 0.0
        return (float(np.mean(self.returns)), float(np.mean(self.lengths)),
                float(np.mean(self.successes)))


def _actor_critic_update(cfg, models, adv_set, lr, beta, rng_update,
                         demo=None, rng_demo=None):
    """num_epoch epochs of clipped-surrogate minibatch updates.

    When a demo dataset is supplied the composite objective adds the
    strength-weighted cloning term to every minibatch (bc_anchor).
    Returns (models, mean components over minibatches).
    """
    obs = np.stack([tr.observation for tr in adv_set.transitions])
    acts = np.array([tr.action for tr in adv_set.transitions], dtype=int)
    old_logp = np.array([tr.log_prob_old for tr in adv_set.transitions])
    returns = np.stack([adv_set.ret_extrinsic, adv_set.ret_gail], axis=1)
    n = len(acts)
    comps_acc = {"policy_loss": [], "value_loss": [], "entropy": [],
                 "bc_loss": []}

    actor, critic = models.actor, models.critic
    for _epoch in range(cfg.num_epoch):
        perm = rng_update.permutation(n)
        for lo in range(0, n, cfg.batch_size):
            idx = perm[lo:lo + cfg.batch_size]
            a_layers = bind(actor.spec, actor.params)
            c_layers = bind(critic.spec, critic.params)
            logits = forward_bound(actor.spec, a_layers, obs[idx], head="none")
            values = forward_bound(critic.spec, c_layers, obs[idx], head="none")
            loss, comps = ppo_loss(logits, old_logp[idx], acts[idx],
                                   adv_set.combined[idx], returns[idx],
                                   values, cfg.epsilon, beta)
            if demo is not None:
                batch = demo.sample(cfg.batch_size, rng_demo)
                bc_raw = _bc_term(cfg, actor.spec, a_layers, batch)
                loss = loss + cfg.bc_strength * bc_raw
                comps_acc["bc_loss"].append(float(bc_raw.data))
            if not np.isfinite(loss.data):
                raise NeuralError("non-finite PPO loss")
            loss.backward()
            new_ap, new_ao = adam_step(actor.params,
                                       collect_grads(actor.spec, a_layers),
                                       actor.opt, lr)
            new_cp, new_co = adam_step(critic.params,
                                       collect_grads(critic.spec, c_layers),
                                       critic.opt, lr)
            actor = ModelBundle(actor.spec, new_ap, new_ao)
            critic = ModelBundle(critic.spec, new_cp, new_co)
            for k in ("policy_loss", "value_loss", "entropy"):
                comps_acc[k].append(comps[k])
    models = Models(actor=actor, critic=critic, disc=models.disc)
    return models, {k: (float(np.mean(v)) if v else 0.0)
                    for k, v in comps_acc.items()}


def _bc_term(cfg, spec, layers, batch):
    """Raw (unweighted) cloning loss per bc_loss_mode."""
    onehot = batch.actions_onehot(3)
    if cfg.bc_loss_mode == "mse":
        probs = forward_bound(spec, layers, batch.observations, head="softmax")
        return bc_loss(probs, onehot)
    lsm = ad.log_softmax(
        forward_bound(spec, layers, batch.observations, head="none"))
    return -(lsm * onehot).sum(axis=1).mean()


def _bc_update(cfg, models, demo: DemoDataset, lr, rng_demo, n_minibatches):
    """Supervised cloning updates; gradient scaled by bc_strength."""
    actor = models.actor
    last_loss = 0.0
    for _ in range(n_minibatches):
        batch = demo.sample(cfg.batch_size, rng_demo)
        layers = bind(actor.spec, actor.params)
        raw = _bc_term(cfg, actor.spec, layers, batch)
        loss = cfg.bc_strength * raw
        if not np.isfinite(loss.data):
            raise NeuralError("non-finite BC loss")
        loss.backward()
        new_p, new_o = adam_step(actor.params, collect_grads(actor.spec, layers),
                                 actor.opt, lr)
        actor = ModelBundle(actor.spec, new_p, new_o)
        last_loss = float(raw.data)
    return Models(actor=actor, critic=models.critic, disc=models.disc), last_loss


def _disc_update(cfg, models, adv_set, demo: DemoDataset, lr, rng_demo):
    obs = np.stack([tr.observation for tr in adv_set.transitions])
    acts = np.array([tr.action for tr in adv_set.transitions], dtype=int)
    agent_batch = ExpertBatch(obs, acts, source="agent")
    expert_batch = demo.sample(len(acts), rng_demo)
    new_p, new_o, loss = discriminator_update(
        models.disc.spec, models.disc.params, models.disc.opt,
        agent_batch, expert_batch, lr)
    return Models(actor=models.actor, critic=models.critic,
                  disc=ModelBundle(models.disc.spec, new_p, new_o)), loss


def train_update(cfg: TrainConfig, models: Models, buffer: RolloutBuffer,
                 bootstrap_obs, demo, phase, lr, beta, rngs):
    """One composite update on a full buffer.

    phase "bc": supervised cloning only (plus optional literal-reading PPO).
    phase "ppo": clipped-surrogate epochs + discriminator steps.
    Returns (models, dict of loss fields for the metrics row).
    """
    out = {"ppo_policy_loss": 0.0, "value_loss": 0.0, "entropy": 0.0,
           "bc_loss": 0.0, "gail_disc_loss": 0.0, "gail_reward_mean": 0.0}

    run_ppo = phase == "ppo" or (phase == "bc" and cfg.bc_phase_ppo)
    if run_ppo:
        critic_values = {}
        bootstrap_values = {}
        for key, stream in buffer.streams():
            stream_obs = np.stack([tr.observation for tr in stream])
            critic_values[key] = forward(models.critic.spec, models.critic.params,
                                         stream_obs)
            if not stream[-1].done:
                b_obs = bootstrap_obs.get(key)
                if b_obs is not None:
                    bootstrap_values[key] = forward(models.critic.spec,
                                                    models.critic.params, b_obs)
        adv_set = compute_advantages(
            buffer, cfg.extrinsic_gamma, cfg.gail_gamma, cfg.gae_lambda,
            critic_values, bootstrap_values,
            extrinsic_strength=cfg.extrinsic_strength,
            gail_strength=cfg.gail_strength if cfg.use_gail else 0.0,
            mode=cfg.advantage_mode)
        # cloning-enabled runs keep the strength-weighted cloning term in the
        # main-loop composite loss (see TrainConfig.bc_anchor)
        anchor = (demo if (phase == "ppo" and cfg.use_bc and cfg.bc_anchor)
                  else None)
        models, comps = _actor_critic_update(cfg, models, adv_set, lr, beta,
                                             rngs["update"], demo=anchor,
                                             rng_demo=rngs["demo"])
        out["ppo_policy_loss"] = comps["policy_loss"]
        out["value_loss"] = comps["value_loss"]
        out["entropy"] = comps["entropy"]
        out["bc_loss"] = comps["bc_loss"]
        gail_r = [tr.reward_gail for tr in adv_set.transitions]
        out["gail_reward_mean"] = float(np.mean(gail_r)) if gail_r else 0.0

        if phase == "ppo" and cfg.use_gail and demo is not None:
            for _epoch in range(cfg.num_epoch):
                models, disc_loss = _disc_update(cfg, models, adv_set, demo,
                                                 lr, rngs["demo"])
                out["gail_disc_loss"] = disc_loss

    if phase == "bc" and cfg.use_bc and demo is not None:
        n_mb = (cfg.num_epoch * max(1, cfg.buffer_size // cfg.batch_size)
                * BC_EPOCH_MULTIPLIER)
        models, bcl = _bc_update(cfg, models, demo, lr, rngs["demo"], n_mb)
        out["bc_loss"] = bcl

    return models, out


def init_models(cfg: TrainConfig) -> Models:
    return Models(
        actor=fresh_bundle(cfg.actor_spec(),
                           init_params(cfg.actor_spec(),
                                       np.random.SeedSequence([cfg.seed, 1]))),
        critic=fresh_bundle(cfg.critic_spec(),
                            init_params(cfg.critic_spec(),
                                        np.random.SeedSequence([cfg.seed, 2]))),
        disc=fresh_bundle(cfg.disc_spec(),
                          init_params(cfg.disc_spec(),
                                      np.random.SeedSequence([cfg.seed, 3]))),
    )


def _load_demo_checked(cfg: TrainConfig, demo_path):
    if demo_path is None:
        if cfg.use_bc or cfg.use_gail:
            raise TrainError("a demo file is required when use_bc or use_gail is set")
        return None
    return load_demos(demo_path,
                      expected_obs_digest=observation_digest(cfg.observation_config()),
                      expected_env_digest=env_digest(cfg.env_config()))


def train(cfg: TrainConfig, demo_path=None, out_dir="run", quiet=False):
    """Run the full composite loop; writes metrics.csv and checkpoints under
    out_dir and returns the final checkpoint path."""
    os.makedirs(out_dir, exist_ok=True)
    demo = _load_demo_checked(cfg, demo_path)
    models = init_models(cfg)

    with open(os.path.join(out_dir, "config.cfg"), "w", encoding="utf-8") as fh:
        fh.write(dump_config(cfg))

    workers = [RolloutWorker(cfg, i) for i in range(cfg.n_envs)]
    stats = EpisodeStats()
    buffer = RolloutBuffer(cfg.buffer_size)
    bootstrap_obs = {}
    rngs = {
        "actions": _rng(cfg.seed, 10),
        "update": _rng(cfg.seed, 11),
        "demo": _rng(cfg.seed, 12),
    }
    metrics = MetricsWriter(os.path.join(out_dir, "metrics.csv"))
    e_digest = env_digest(cfg.env_config())
    o_digest = observation_digest(cfg.observation_config())

    def write_checkpoint(name, step):
        path = os.path.join(out_dir, name)
        save_checkpoint(path, step=step, env_digest=e_digest, obs_digest=o_digest,
                        actor=models.actor, critic=models.critic,
                        disc=models.disc,
                        extra={"seed": cfg.seed, "config": dump_config(cfg)})
        return path

    steps_done = 0
    next_checkpoint = cfg.eval_every
    last_good = write_checkpoint("checkpoint_0.json", 0)

    try:
        while steps_done < cfg.total_steps:
            # ---- lockstep rollout across workers until the buffer fills ----
            rows = []
            for w in workers:
                for aid in w.active_agents():
                    rows.append((w, aid))
            if not rows:
                raise TrainError("no active agents to collect from")
            obs_mat = np.stack([w.cur_obs[aid] for w, aid in rows])
            logits = forward(models.actor.spec, models.actor.params, obs_mat)
            acts, logps = sample_actions(logits, rngs["actions"])
            values = forward(models.critic.spec, models.critic.params, obs_mat)
            if cfg.use_gail:
                r_gail = gail_rewards(models.disc.spec, models.disc.params,
                                      obs_mat, acts)
            else:
                r_gail = np.zeros(len(rows))

            by_worker = {}
            for k, (w, aid) in enumerate(rows):
                by_worker.setdefault(id(w), (w, {}))[1][aid] = k
            for _wid, (w, agent_rows) in by_worker.items():
                actions = {aid: int(acts[k]) for aid, k in agent_rows.items()}
                res = w.env.step(actions)
                scene = scene_from_world(w.env.state)
                for aid, k in agent_rows.items():
                    ev = res.events[aid]
                    tr = Transition(
                        observation=obs_mat[k],
                        action=int(acts[k]),
                        log_prob_old=min(float(logps[k]), 0.0),
                        value_old=float(cfg.extrinsic_strength * values[k, 0]
                                        + cfg.gail_strength * values[k, 1]),
                        reward_extrinsic=float(res.rewards[aid]),
                        reward_gail=float(r_gail[k]),
                        done=bool(ev.terminal),
                        agent_id=aid,
                    )
                    buffer.add(w.stream_key(aid), tr)
                    w.ep_return[aid] += res.rewards[aid]
                    w.ep_len[aid] += 1
                    if res.dones[aid]:
                        stats.add(w.ep_return[aid], w.ep_len[aid],
                                  ev.reached_own_goal)
                        if not ev.terminal:  # time-limit truncation bootstrap
                            bootstrap_obs[w.stream_key(aid)] = \
                                w._observe(aid, scene)
                    else:
                        w.cur_obs[aid] = w._observe(aid, scene)
                if w.env.episode_done:
                    w._next_episode()
            steps_done += len(rows)

            # ---- update on a full buffer ----
            if buffer.full:
                for w in workers:
                    for aid in w.active_agents():
                        bootstrap_obs[w.stream_key(aid)] = w.cur_obs[aid]
                    w.cut_streams()
                phase = ("bc" if (cfg.use_bc and steps_done <= cfg.steps_bc)
                         else "ppo")
                lr = lr_at(steps_done, cfg.total_steps, cfg.learning_rate,
                           cfg.learning_rate_schedule)
                beta = lr_at(steps_done, cfg.total_steps, cfg.beta,
                             cfg.beta_schedule)
                models, losses = train_update(cfg, models, buffer,
                                              bootstrap_obs, demo, phase, lr,
                                              beta, rngs)
                mean_r, mean_len, succ = stats.summary()
                metrics.write(MetricsRow(
                    step=steps_done, mean_reward=mean_r,
                    mean_episode_length=mean_len, success_rate=succ,
                    lr=lr, **losses))
                buffer.clear()
                bootstrap_obs = {}
                if not quiet:
                    print(f"step {steps_done}/{cfg.total_steps} phase={phase} "
                          f"reward={mean_r:.1f} success={succ:.2f}", flush=True)

            if steps_done >= next_checkpoint:
                last_good = write_checkpoint(f"checkpoint_{steps_done}.json",
                                             steps_done)
                next_checkpoint += cfg.eval_every
    except NeuralError as exc:
        metrics.close()
        raise TrainError(
            f"aborted on non-finite loss at step {steps_done}; "
            f"last good checkpoint: {last_good}") from exc

    final = write_checkpoint("checkpoint.json", steps_done)
    metrics.close()
    return final
