"""Adam optimizer and learning-rate schedules."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mlp import NeuralError, ParamVector

LR_FLOOR = 1e-10


@dataclass(frozen=True)
class OptimizerState:
    m: np.ndarray
    v: np.ndarray
    step: int = 0
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8


def init_optimizer(params: ParamVector, beta1=0.9, beta2=0.999, eps=1e-8):
    n = len(params)
    return OptimizerState(m=np.zeros(n), v=np.zeros(n), step=0,
                          beta1=beta1, beta2=beta2, eps=eps)


def adam_step(params: ParamVector, grads, opt_state: OptimizerState, lr):
    """One bias-corrected Adam update; returns (new_params, new_state)."""
    grads = np.asarray(grads, dtype=np.float64)
    if grads.shape != params.data.shape:
        raise NeuralError("gradient length does not match parameters")
    if not np.all(np.isfinite(grads)):
        raise NeuralError("non-finite gradients rejected")
    t = opt_state.step + 1
    m = opt_state.beta1 * opt_state.m + (1.0 - opt_state.beta1) * grads
    v = opt_state.beta2 * opt_state.v + (1.0 - opt_state.beta2) * grads * grads
    m_hat = m / (1.0 - opt_state.beta1 ** t)
    v_hat = v / (1.0 - opt_state.beta2 ** t)
    new_data = params.data - lr * m_hat / (np.sqrt(v_hat) + opt_state.eps)
    new_params = ParamVector(new_data, params.spec)
    new_state = OptimizerState(m=m, v=v, step=t, beta1=opt_state.beta1,
                               beta2=opt_state.beta2, eps=opt_state.eps)
    return new_params, new_state


def lr_at(step, total_steps, base_lr, mode="linear"):
    """linear: decay to zero over total_steps, floored; constant: base_lr."""
    if mode == "constant":
        return base_lr
    if mode == "linear":
        if total_steps <= 0:
            return base_lr
        frac = min(max(step / total_steps, 0.0), 1.0)
        return max(base_lr * (1.0 - frac), LR_FLOOR)
    raise ValueError(f"unknown schedule {mode!r}")
