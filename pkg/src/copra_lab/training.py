"""Optimization loop: Adam over masked adapter parameters, cosine learning
rate decay, evaluation, and checkpoint capture (including the early-quarter
checkpoint)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .datasets import Dataset
from .linalg import Matrix, NumericError, softmax_cross_entropy
from .network import (
    AdapterSet,
    BaseNet,
    LayerMask,
    base_loss_and_grads,
    forward,
    init_adapters,
    loss_and_grads,
)
from .rng import STREAM_INIT, STREAM_MASK, STREAM_SHUFFLE, RngStream
from .schedule import MODE_COPRA, MODE_FIXED, DropSchedule, prob_at, sample_mask


class TrainingDivergedError(NumericError):
    """Raised when the loss goes non-finite; carries the failing step."""

    def __init__(self, step: int):
        super().__init__(f"training diverged at step {step}")
        self.step = step


@dataclass
class TrainConfig:
    learning_rate: float = 5e-4
    total_steps: int = 500
    batch_size: int = 32
    schedule_mode: str = MODE_COPRA
    fixed_p: float | None = None
    seed: int = 0
    rank: int = 2
    lora_scale: float = 1.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-8
    # "freeze" leaves a masked layer's Adam state untouched for the step;
    # "advance" ticks its bias-correction counter anyway.
    adam_inactive: str = "freeze"
    checkpoint_steps: list[int] = field(default_factory=list)
    eval_every: int = 100

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.total_steps < 4:
            raise ValueError("total_steps must be >= 4")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.adam_inactive not in ("freeze", "advance"):
            raise ValueError("adam_inactive must be 'freeze' or 'advance'")


@dataclass
class MetricLog:
    steps: list[tuple[int, float, float, int]] = field(default_factory=list)
    evals: list[tuple[int, float, float]] = field(default_factory=list)

    def log_step(self, step: int, loss: float, p: float, active: int) -> None:
        if self.steps and step <= self.steps[-1][0]:
            raise ValueError("steps must be strictly increasing")
        self.steps.append((step, loss, p, active))

    def log_eval(self, step: int, train_acc: float, test_acc: float) -> None:
        self.evals.append((step, train_acc, test_acc))


def cosine_lr(lr0: float, t: int, total: int) -> float:
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * t / total))


class _Adam:
    """Per-parameter Adam state with a per-parameter update counter."""

    def __init__(self, shapes: dict[str, tuple[int, ...]],
                 beta1: float, beta2: float, eps: float):
        self.m = {k: np.zeros(s) for k, s in shapes.items()}
        self.v = {k: np.zeros(s) for k, s in shapes.items()}
        self.t = {k: 0 for k in shapes}
        self.beta1, self.beta2, self.eps = beta1, beta2, eps

    def step(self, name: str, param: Matrix, grad: Matrix, lr: float) -> None:
        self.t[name] += 1
        t = self.t[name]
        self.m[name] = self.beta1 * self.m[name] + (1 - self.beta1) * grad
        self.v[name] = self.beta2 * self.v[name] + (1 - self.beta2) * grad * grad
        mhat = self.m[name] / (1 - self.beta1 ** t)
        vhat = self.v[name] / (1 - self.beta2 ** t)
        param -= lr * mhat / (np.sqrt(vhat) + self.eps)

    def tick(self, name: str) -> None:
        self.t[name] += 1


class _BatchIterator:
    """Sequential minibatches over a per-epoch shuffled order."""

    def __init__(self, data: Dataset, batch_size: int, seed: int):
        self.data = data
        self.batch_size = min(batch_size, data.size)
        self.rng = RngStream(seed, STREAM_SHUFFLE)
        self.order = self.rng.permutation(data.size)
        self.pos = 0

    def next(self) -> tuple[Matrix, np.ndarray]:
        if self.pos + self.batch_size > self.data.size:
            self.order = self.rng.permutation(self.data.size)
            self.pos = 0
        idx = self.order[self.pos:self.pos + self.batch_size]
        self.pos += self.batch_size
        return self.data.features[idx], self.data.labels[idx]


def evaluate(
    base: BaseNet,
    adapters: AdapterSet | None,
    mask: LayerMask | None,
    data: Dataset,
) -> tuple[float, float]:
    """Argmax classification accuracy and mean CE loss; deterministic."""
    if data.size < 1:
        raise ValueError("cannot evaluate on an empty dataset")
    logits = forward(base, adapters, mask, data.features)
    pred = logits.argmax(axis=1)
    acc = float(np.mean(pred == data.labels))
    loss, _ = softmax_cross_entropy(logits, data.labels)
    return acc, loss


def train(
    base: BaseNet,
    config: TrainConfig,
    train_set: Dataset,
    test_set: Dataset,
) -> tuple[AdapterSet, MetricLog, dict[str, AdapterSet]]:
    """Run the masked fine-tuning loop.

    Inactive layers are true no-ops for the step: parameters and Adam moments
    stay bitwise unchanged (under the default adam_inactive="freeze").
    Checkpoints always include "early" at floor(T/4) and "final" at T.
    """
    if train_set.features.shape[1] != base.dims[0]:
        raise ValueError("dataset feature width does not match input dim")
    T = config.total_steps
    L = base.num_layers
    adapters = init_adapters(base, config.rank, config.lora_scale, config.seed)
    adapters.strategy = config.schedule_mode
    schedule = DropSchedule(T, config.schedule_mode, config.fixed_p)
    mask_rng = RngStream(config.seed, STREAM_MASK)
    batches = _BatchIterator(train_set, config.batch_size, config.seed)
    shapes: dict[str, tuple[int, ...]] = {}
    for l, ad in enumerate(adapters.adapters):
        shapes[f"A{l}"] = ad.A.shape
        shapes[f"B{l}"] = ad.B.shape
    adam = _Adam(shapes, config.adam_beta1, config.adam_beta2, config.adam_epsilon)

    ckpt_at = set(config.checkpoint_steps) | {T // 4, T}
    checkpoints: dict[str, AdapterSet] = {}
    log = MetricLog()

    for t in range(T):
        mask = sample_mask(schedule, t, L, mask_rng)
        x, y = batches.next()
        try:
            loss, grads = loss_and_grads(base, adapters, mask, x, y)
        except NumericError as exc:
            raise TrainingDivergedError(t) from exc
        if not math.isfinite(loss):
            raise TrainingDivergedError(t)
        lr = cosine_lr(config.learning_rate, t, T)
        for l in range(L):
            ad = adapters.adapters[l]
            if mask.bits[l] == 1:
                adam.step(f"A{l}", ad.A, grads[f"A{l}"], lr)
                adam.step(f"B{l}", ad.B, grads[f"B{l}"], lr)
            elif config.adam_inactive == "advance":
                adam.tick(f"A{l}")
                adam.tick(f"B{l}")
        p = prob_at(schedule, t)
        log.log_step(t, loss, p, int(mask.bits.sum()))
        done = t + 1
        if config.eval_every and (done % config.eval_every == 0 or done == T):
            full = LayerMask.ones(L)
            train_acc, _ = evaluate(base, adapters, full, train_set)
            test_acc, _ = evaluate(base, adapters, full, test_set)
            log.log_eval(done, train_acc, test_acc)
        if done in ckpt_at:
            snap = adapters.clone()
            snap.step = done
            label = "early" if done == T // 4 else (
                "final" if done == T else f"step{done}"
            )
            checkpoints[label] = snap
    adapters.step = T
    return adapters, log, checkpoints


def pretrain_base(
    dims: list[int],
    source: Dataset,
    steps: int = 2000,
    lr: float = 1e-3,
    seed: int = 0,
    batch_size: int = 32,
) -> tuple[BaseNet, float]:
    """Full-parameter Adam training of the base network on the source task.

    Returns the frozen base together with its source-task accuracy. With
    steps=0 the He-style random init is returned untrained.
    """
    if dims[0] != source.features.shape[1]:
        raise ValueError("dims[0] must equal the source feature width")
    rng = RngStream(seed, STREAM_INIT)
    weights = []
    for l in range(len(dims) - 1):
        fan_in = dims[l]
        weights.append(rng.normal((dims[l + 1], dims[l])) * math.sqrt(2.0 / fan_in))
    base = BaseNet(dims=list(dims), weights=weights)
    if steps == 0:
        acc, _ = evaluate(base, None, None, source)
        return base, acc
    shapes = {f"W{l}": w.shape for l, w in enumerate(base.weights)}
    adam = _Adam(shapes, 0.9, 0.999, 1e-8)
    batches = _BatchIterator(source, batch_size, seed)
    for t in range(steps):
        x, y = batches.next()
        loss, grads = base_loss_and_grads(base, x, y)
        if not math.isfinite(loss):
            raise TrainingDivergedError(t)
        step_lr = cosine_lr(lr, t, steps)
        for l in range(base.num_layers):
            adam.step(f"W{l}", base.weights[l], grads[f"W{l}"], step_lr)
    acc, _ = evaluate(base, None, None, source)
    return base, acc
