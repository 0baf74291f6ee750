"""Stable short digests of configuration objects.

Used to stamp demo files and checkpoints so they refuse to load under a
different environment or observation layout.
"""

from __future__ import annotations

import hashlib
from dataclasses import fields

from .sense import CoordinateSensorConfig, SensorConfig
from .sim import EnvConfig

DIGEST_LEN = 12


def _hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:DIGEST_LEN]


def _canon(value):
    if isinstance(value, float):
        return format(value, ".9g")
    if isinstance(value, (tuple, list)):
        return ",".join(_canon(v) for v in value)
    return str(value)


def env_digest(config: EnvConfig) -> str:
    parts = [f"{f.name}={_canon(getattr(config, f.name))}"
             for f in fields(EnvConfig)]
    return _hash("env|" + "|".join(parts))


def observation_digest(obs_cfg) -> str:
    if isinstance(obs_cfg, SensorConfig):
        parts = [f"{f.name}={_canon(getattr(obs_cfg, f.name))}"
                 for f in fields(SensorConfig)]
        return _hash("raycast|" + "|".join(parts))
    if isinstance(obs_cfg, CoordinateSensorConfig):
        parts = [f"{f.name}={_canon(getattr(obs_cfg, f.name))}"
                 for f in fields(CoordinateSensorConfig)]
        return _hash("coordinates|" + "|".join(parts))
    raise TypeError(f"not an observation config: {obs_cfg!r}")
