from . import autodiff
from .autodiff import Tensor
from .mlp import (MlpSpec, NeuralError, ParamVector, bind, collect_grads,
                  forward, forward_bound, gradient, init_params, zero_params)
from .optim import LR_FLOOR, OptimizerState, adam_step, init_optimizer, lr_at

__all__ = [
    "LR_FLOOR", "MlpSpec", "NeuralError", "OptimizerState", "ParamVector",
    "Tensor", "adam_step", "autodiff", "bind", "collect_grads", "forward",
    "forward_bound", "gradient", "init_optimizer", "init_params", "lr_at",
    "zero_params",
]
