"""Versioned checkpoint container: JSON with base64-packed float64 arrays.

Holds spec + parameters + optimizer moments for actor, critic, and
discriminator, the training step, and the config digests the models were
trained under.  Arrays round-trip bit-exact (little-endian float64 bytes).
"""

from __future__ import annotations

import base64
import json
from dataclasses import asdict, dataclass

import numpy as np

from .nn import MlpSpec, OptimizerState, ParamVector, init_optimizer

CHECKPOINT_VERSION = 1


class CheckpointError(RuntimeError):
    pass


@dataclass
class ModelBundle:
    spec: MlpSpec
    params: ParamVector
    opt: OptimizerState


def _pack(arr):
    return base64.b64encode(np.asarray(arr, dtype="<f8").tobytes()).decode("ascii")


def _unpack(text):
    return np.frombuffer(base64.b64decode(text), dtype="<f8").copy()


def _bundle_dict(b: ModelBundle):
    return {
        "spec": asdict(b.spec),
        "params": _pack(b.params.data),
        "opt": {
            "m": _pack(b.opt.m), "v": _pack(b.opt.v), "step": b.opt.step,
            "beta1": b.opt.beta1, "beta2": b.opt.beta2, "eps": b.opt.eps,
        },
    }


def _bundle_from(d) -> ModelBundle:
    spec = MlpSpec(**d["spec"])
    params = ParamVector(_unpack(d["params"]), spec)
    o = d["opt"]
    opt = OptimizerState(m=_unpack(o["m"]), v=_unpack(o["v"]), step=o["step"],
                         beta1=o["beta1"], beta2=o["beta2"], eps=o["eps"])
    if len(opt.m) != len(params) or len(opt.v) != len(params):
        raise CheckpointError("optimizer moment length mismatch")
    return ModelBundle(spec=spec, params=params, opt=opt)


def fresh_bundle(spec: MlpSpec, params: ParamVector) -> ModelBundle:
    return ModelBundle(spec=spec, params=params, opt=init_optimizer(params))


def save_checkpoint(path, *, step, env_digest, obs_digest, actor, critic,
                    disc, extra=None):
    doc = {
        "format": "racil-checkpoint",
        "version": CHECKPOINT_VERSION,
        "step": step,
        "env_digest": env_digest,
        "obs_digest": obs_digest,
        "actor": _bundle_dict(actor),
        "critic": _bundle_dict(critic),
        "disc": _bundle_dict(disc),
        "extra": extra or {},
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_checkpoint(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != "racil-checkpoint":
        raise CheckpointError(f"{path}: not a checkpoint file")
    if doc.get("version") != CHECKPOINT_VERSION:
        raise CheckpointError(
            f"{path}: version {doc.get('version')} unsupported")
    return {
        "step": doc["step"],
        "env_digest": doc["env_digest"],
        "obs_digest": doc["obs_digest"],
        "actor": _bundle_from(doc["actor"]),
        "critic": _bundle_from(doc["critic"]),
        "disc": _bundle_from(doc["disc"]),
        "extra": doc.get("extra", {}),
    }
