"""L-layer fully connected network with frozen base weights and per-layer
low-rank adapters.

Layer l computes relu((W_l + delta_l * scale * B_l A_l) x); the final layer
omits the nonlinearity and emits logits. The backward pass is hand-wired for
this fixed graph.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    DimensionError,
    Matrix,
    NumericError,
    check_finite,
    relu,
    relu_backward,
    softmax_cross_entropy,
)
from .rng import STREAM_INIT, RngStream


class ConfigurationError(ValueError):
    """Raised for invalid model hyperparameters."""


@dataclass
class BaseNet:
    """Frozen base classifier: dims [d0, ..., dL], weights[l] is dL+1 x dl."""

    dims: list[int]
    weights: list[Matrix]

    def __post_init__(self) -> None:
        if len(self.weights) != len(self.dims) - 1:
            raise ConfigurationError(
                f"{len(self.weights)} weight matrices for {len(self.dims)} dims"
            )
        for l, w in enumerate(self.weights):
            expect = (self.dims[l + 1], self.dims[l])
            if w.shape != expect:
                raise DimensionError(
                    f"layer {l} weight shape {w.shape}, expected {expect}"
                )

    @property
    def num_layers(self) -> int:
        return len(self.weights)


@dataclass
class LoraAdapter:
    """Rank-r update factors for one layer: delta = lora_scale * B A."""

    A: Matrix  # r x n
    B: Matrix  # m x r
    rank: int
    lora_scale: float = 1.0

    def __post_init__(self) -> None:
        m, n = self.B.shape[0], self.A.shape[1]
        if self.A.shape[0] != self.rank or self.B.shape[1] != self.rank:
            raise ConfigurationError(
                f"factor shapes {self.A.shape}/{self.B.shape} disagree with "
                f"rank {self.rank}"
            )
        if not 1 <= self.rank <= min(m, n):
            raise ConfigurationError(
                f"rank {self.rank} outside [1, min({m}, {n})]"
            )
        if self.lora_scale <= 0:
            raise ConfigurationError("lora_scale must be positive")


@dataclass
class AdapterSet:
    """One adapter per base layer plus provenance metadata."""

    adapters: list[LoraAdapter]
    seed: int = 0
    strategy: str = ""
    step: int = 0

    def __len__(self) -> int:
        return len(self.adapters)

    def clone(self) -> "AdapterSet":
        return copy.deepcopy(self)


@dataclass
class LayerMask:
    """Per-layer 0/1 activations for one optimization step."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        self.bits = np.asarray(self.bits, dtype=np.int64)
        if not np.all((self.bits == 0) | (self.bits == 1)):
            raise ValueError("mask entries must be 0 or 1")

    @classmethod
    def ones(cls, num_layers: int) -> "LayerMask":
        return cls(np.ones(num_layers, dtype=np.int64))

    @classmethod
    def zeros(cls, num_layers: int) -> "LayerMask":
        return cls(np.zeros(num_layers, dtype=np.int64))

    @classmethod
    def from_subset(cls, num_layers: int, active: set[int]) -> "LayerMask":
        bits = np.zeros(num_layers, dtype=np.int64)
        for l in active:
            bits[l] = 1
        return cls(bits)


def init_adapters(
    base: BaseNet, rank: int, lora_scale: float = 1.0, seed: int = 0
) -> AdapterSet:
    """A ~ N(0, 1/n) entries, B = 0, so the initial update is exactly zero."""
    rng = RngStream(seed, STREAM_INIT)
    adapters = []
    for l in range(base.num_layers):
        m, n = base.weights[l].shape
        if rank > min(m, n):
            raise ConfigurationError(
                f"rank {rank} exceeds min dim {min(m, n)} at layer {l}"
            )
        a = rng.normal((rank, n)) / np.sqrt(n)
        b = np.zeros((m, rank))
        adapters.append(LoraAdapter(A=a, B=b, rank=rank, lora_scale=lora_scale))
    return AdapterSet(adapters=adapters, seed=seed)


def effective_delta(adapter: LoraAdapter) -> Matrix:
    return adapter.lora_scale * (adapter.B @ adapter.A)


def adapter_param_count(base: BaseNet, rank: int) -> int:
    return sum(rank * (m + n) for m, n in (w.shape for w in base.weights))


def _effective_weight(base: BaseNet, adapters: AdapterSet | None,
                      mask: LayerMask | None, l: int) -> Matrix:
    w = base.weights[l]
    if adapters is None:
        return w
    if mask is not None and mask.bits[l] == 0:
        return w
    ad = adapters.adapters[l]
    # B == 0 keeps forward bitwise equal to the base path (W + 0 == W).
    return w + effective_delta(ad)


def forward(
    base: BaseNet,
    adapters: AdapterSet | None,
    mask: LayerMask | None,
    x: Matrix,
) -> Matrix:
    """Batch-rows forward pass; returns batch x dL logits."""
    if x.shape[1] != base.dims[0]:
        raise DimensionError(
            f"input width {x.shape[1]} != d0 {base.dims[0]}"
        )
    if adapters is not None and len(adapters) != base.num_layers:
        raise DimensionError("adapter count does not match layer count")
    h = x
    last = base.num_layers - 1
    for l in range(base.num_layers):
        w = _effective_weight(base, adapters, mask, l)
        z = h @ w.T
        h = z if l == last else relu(z)
    return check_finite(h, "forward logits")


def forward_with_deltas(base: BaseNet, deltas: list[Matrix], x: Matrix) -> Matrix:
    """Forward with explicit dense per-layer updates (mixture merges)."""
    if len(deltas) != base.num_layers:
        raise DimensionError("delta count does not match layer count")
    h = x
    last = base.num_layers - 1
    for l in range(base.num_layers):
        z = h @ (base.weights[l] + deltas[l]).T
        h = z if l == last else relu(z)
    return check_finite(h, "forward logits")


def loss_and_grads(
    base: BaseNet,
    adapters: AdapterSet,
    mask: LayerMask,
    x: Matrix,
    labels: np.ndarray,
) -> tuple[float, dict[str, Matrix]]:
    """Mean CE loss and adjoints for every A_l, B_l.

    Adjoints of masked-out layers are exactly zero; the base path still
    transmits gradient to earlier layers regardless of the mask.
    """
    L = base.num_layers
    acts = [x]  # layer inputs h_0 .. h_{L-1}
    pre = []  # pre-activations z_1 .. z_L
    h = x
    for l in range(L):
        w = _effective_weight(base, adapters, mask, l)
        z = h @ w.T
        pre.append(z)
        h = z if l == L - 1 else relu(z)
        acts.append(h)
    loss, g = softmax_cross_entropy(acts[-1], labels)
    if not np.isfinite(loss):
        raise NumericError("non-finite loss")

    grads: dict[str, Matrix] = {}
    for l in range(L - 1, -1, -1):
        ad = adapters.adapters[l]
        gw = g.T @ acts[l]  # dL/dW_eff, m x n
        if mask.bits[l] == 1:
            grads[f"A{l}"] = ad.lora_scale * (ad.B.T @ gw)
            grads[f"B{l}"] = ad.lora_scale * (gw @ ad.A.T)
        else:
            grads[f"A{l}"] = np.zeros_like(ad.A)
            grads[f"B{l}"] = np.zeros_like(ad.B)
        if l > 0:
            w = _effective_weight(base, adapters, mask, l)
            g = relu_backward(pre[l - 1], g @ w)
    return loss, grads


def base_loss_and_grads(
    base: BaseNet, x: Matrix, labels: np.ndarray
) -> tuple[float, dict[str, Matrix]]:
    """Full-parameter gradients of the plain base network (pretraining)."""
    L = base.num_layers
    acts = [x]
    pre = []
    h = x
    for l in range(L):
        z = h @ base.weights[l].T
        pre.append(z)
        h = z if l == L - 1 else relu(z)
        acts.append(h)
    loss, g = softmax_cross_entropy(acts[-1], labels)
    grads: dict[str, Matrix] = {}
    for l in range(L - 1, -1, -1):
        grads[f"W{l}"] = g.T @ acts[l]
        if l > 0:
            g = relu_backward(pre[l - 1], g @ base.weights[l])
    return loss, grads
