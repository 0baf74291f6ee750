"""Dense network: spec, flat parameter vector, forward pass, exact gradients.

Parameters live in one flat float64 vector with a layout descriptor mapping
segments to layers (W then b per layer).  Initialization uses a fixed-seed
PCG64 stream with scaled-uniform fan-in bounds, so the same seed yields the
same vector on every platform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .autodiff import Tensor

ACTIVATIONS = {"swish": ad.swish, "relu": ad.relu, "tanh": ad.tanh}
HEADS = ("linear", "softmax", "sigmoid")

_ACT_PLAIN = {
    "swish": lambda z: z / (1.0 + np.exp(-z)),
    "relu": lambda z: np.maximum(z, 0.0),
    "tanh": np.tanh,
}


class NeuralError(ValueError):
    pass


@dataclass(frozen=True)
class MlpSpec:
    input_dim: int
    hidden_units: int
    num_layers: int  # hidden layer count
    output_dim: int
    hidden_activation: str = "swish"
    output_head: str = "linear"

    def __post_init__(self):
        for name in ("input_dim", "hidden_units", "num_layers", "output_dim"):
            if getattr(self, name) < 1:
                raise NeuralError(f"{name} must be >= 1")
        if self.hidden_activation not in ACTIVATIONS:
            raise NeuralError(f"unknown activation {self.hidden_activation!r}")
        if self.output_head not in HEADS:
            raise NeuralError(f"unknown output head {self.output_head!r}")

    def layer_dims(self):
        """[(fan_in, fan_out)] for every affine layer including the output."""
        dims = []
        prev = self.input_dim
        for _ in range(self.num_layers):
            dims.append((prev, self.hidden_units))
            prev = self.hidden_units
        dims.append((prev, self.output_dim))
        return dims

    def layout(self):
        """Segment descriptors: (name, shape, offset) over the flat vector."""
        segs = []
        off = 0
        for i, (fi, fo) in enumerate(self.layer_dims()):
            segs.append((f"W{i}", (fi, fo), off))
            off += fi * fo
            segs.append((f"b{i}", (fo,), off))
            off += fo
        return tuple(segs), off

    def n_params(self):
        return self.layout()[1]


class ParamVector:
    """Flat parameter vector; rejects non-finite values on write."""

    __slots__ = ("data", "spec")

    def __init__(self, data, spec: MlpSpec):
        data = np.asarray(data, dtype=np.float64)
        if data.shape != (spec.n_params(),):
            raise NeuralError(
                f"parameter vector length {data.shape} does not match layout "
                f"({spec.n_params()},)")
        if not np.all(np.isfinite(data)):
            raise NeuralError("non-finite parameter values rejected")
        self.data = data
        self.spec = spec

    def __len__(self):
        return self.data.shape[0]

    def copy(self):
        return ParamVector(self.data.copy(), self.spec)

    def segments(self):
        segs, _total = self.spec.layout()
        out = {}
        for name, shape, off in segs:
            size = int(np.prod(shape))
            out[name] = self.data[off:off + size].reshape(shape)
        return out


def init_params(spec: MlpSpec, seed) -> ParamVector:
    """Scaled-uniform fan-in init: W, b ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in))."""
    rng = np.random.Generator(np.random.PCG64(seed))
    chunks = []
    for fi, fo in spec.layer_dims():
        bound = 1.0 / np.sqrt(fi)
        chunks.append(rng.uniform(-bound, bound, size=fi * fo))
        chunks.append(rng.uniform(-bound, bound, size=fo))
    return ParamVector(np.concatenate(chunks), spec)


def zero_params(spec: MlpSpec) -> ParamVector:
    return ParamVector(np.zeros(spec.n_params()), spec)


def _apply_head_plain(z, head):
    if head == "linear":
        return z
    if head == "softmax":
        z = z - z.max(axis=-1, keepdims=True)
        e = np.exp(z)
        return e / e.sum(axis=-1, keepdims=True)
    if head == "sigmoid":
        return 1.0 / (1.0 + np.exp(-z))
    raise NeuralError(head)


def forward(spec: MlpSpec, params: ParamVector, x):
    """Plain (tape-free) forward pass; accepts one input vector or a batch."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    if x.shape[-1] != spec.input_dim:
        raise NeuralError(f"input dim {x.shape[-1]} != {spec.input_dim}")
    h = x[None, :] if single else x
    segs = params.segments()
    act = _ACT_PLAIN[spec.hidden_activation]
    n_affine = spec.num_layers + 1
    for i in range(n_affine):
        h = h @ segs[f"W{i}"] + segs[f"b{i}"]
        if i < n_affine - 1:
            h = act(h)
    out = _apply_head_plain(h, spec.output_head)
    return out[0] if single else out


def bind(spec: MlpSpec, params: ParamVector):
    """Wrap each layer's weights in tape Tensors for gradient computation."""
    segs = params.segments()
    layers = []
    for i in range(spec.num_layers + 1):
        layers.append((Tensor(segs[f"W{i}"].copy()), Tensor(segs[f"b{i}"].copy())))
    return layers


def forward_bound(spec: MlpSpec, layers, x, head=None) -> Tensor:
    """Tape forward through bound layers.  head overrides spec.output_head
    ("none" returns raw logits)."""
    h = ad.as_tensor(np.atleast_2d(np.asarray(x, dtype=np.float64)))
    act = ACTIVATIONS[spec.hidden_activation]
    n_affine = spec.num_layers + 1
    for i, (W, b) in enumerate(layers):
        h = h @ W + b
        if i < n_affine - 1:
            h = act(h)
    head = spec.output_head if head is None else head
    if head == "none" or head == "linear":
        return h
    if head == "softmax":
        return ad.softmax(h)
    if head == "sigmoid":
        return ad.sigmoid(h)
    raise NeuralError(head)


def collect_grads(spec: MlpSpec, layers) -> np.ndarray:
    """Flatten bound-layer gradients back into layout order."""
    chunks = []
    for W, b in layers:
        gw = W.grad if W.grad is not None else np.zeros_like(W.data)
        gb = b.grad if b.grad is not None else np.zeros_like(b.data)
        chunks.append(gw.ravel())
        chunks.append(gb.ravel())
    return np.concatenate(chunks)


def gradient(spec: MlpSpec, params: ParamVector, loss_closure) -> np.ndarray:
    """Exact reverse-mode gradient of a scalar loss closure.

    loss_closure receives a forward function (ndarray input -> output Tensor
    with the spec's head applied) and must return a scalar Tensor.
    """
    layers = bind(spec, params)

    def net(x, head=None):
        return forward_bound(spec, layers, x, head=head)

    loss = loss_closure(net)
    if not np.isfinite(loss.data):
        raise NeuralError(f"non-finite loss {loss.data!r}")
    loss.backward()
    return collect_grads(spec, layers)
