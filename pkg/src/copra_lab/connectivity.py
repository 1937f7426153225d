"""Linear-mode-connectivity evaluation: accuracy along the merge coefficient
and the barrier (largest shortfall below the chord between the endpoints)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .datasets import Dataset
from .merging import MergeWeights, align, fuse, mix
from .network import AdapterSet, BaseNet, LayerMask, forward_with_deltas
from .training import evaluate

METHOD_FUSION = "fusion"
METHOD_MIXTURE = "mixture"
METHOD_FUSION_ALIGN = "fusion+align"

DEFAULT_GRID = tuple(np.round(np.linspace(0.0, 1.0, 11), 10))


@dataclass
class InterpCurve:
    grid: list[float]
    accuracy: list[float]
    method: str
    metric: str = "accuracy"

    def __post_init__(self) -> None:
        g = self.grid
        if len(g) != len(self.accuracy):
            raise ValueError("grid/accuracy length mismatch")
        if g[0] != 0.0 or g[-1] != 1.0 or any(b <= a for a, b in zip(g, g[1:])):
            raise ValueError("grid must be strictly increasing from 0 to 1")
        if self.metric == "accuracy" and any(
            not 0.0 <= a <= 1.0 for a in self.accuracy
        ):
            raise ValueError("accuracies must lie in [0, 1]")


def _eval_point(base: BaseNet, a1: AdapterSet, a2: AdapterSet, method: str,
                c: float, data: Dataset, metric: str) -> float:
    from .linalg import softmax_cross_entropy

    if method == METHOD_MIXTURE:
        deltas = mix([a1, a2], MergeWeights.pair(c)).deltas
        logits = forward_with_deltas(base, deltas, data.features)
        if metric == "accuracy":
            return float(np.mean(logits.argmax(axis=1) == data.labels))
        loss, _ = softmax_cross_entropy(logits, data.labels)
        return -loss
    merged = fuse([a1, a2], MergeWeights.pair(c))
    acc, loss = evaluate(base, merged, LayerMask.ones(len(a1)), data)
    return acc if metric == "accuracy" else -loss


def interpolation_sweep(
    base: BaseNet,
    a1: AdapterSet,
    a2: AdapterSet,
    method: str,
    grid: list[float] | tuple[float, ...] = DEFAULT_GRID,
    eval_set: Dataset | None = None,
    metric: str = "accuracy",
) -> InterpCurve:
    """Accuracy of the (1-c, c)-merged model at each grid coefficient.

    c=0 reproduces a1 exactly and c=1 reproduces a2, for every method
    (merging with a zero weight skips that input bitwise, and alignment
    preserves the effective update). metric="neg_loss" sweeps negated CE
    instead of accuracy.
    """
    if eval_set is None:
        raise ValueError("eval_set is required")
    if method not in (METHOD_FUSION, METHOD_MIXTURE, METHOD_FUSION_ALIGN):
        raise ValueError(f"unknown method {method!r}")
    if metric not in ("accuracy", "neg_loss"):
        raise ValueError(f"unknown metric {metric!r}")
    b = a2
    if method == METHOD_FUSION_ALIGN:
        b, _ = align(a1, a2)
    accs = [
        _eval_point(base, a1, b, method, float(c), eval_set, metric)
        for c in grid
    ]
    return InterpCurve(grid=[float(c) for c in grid], accuracy=accs,
                       method=method, metric=metric)


def barrier(curve: InterpCurve) -> float:
    """max over grid points of chord(c) - acc(c), floored at zero."""
    a0, a1 = curve.accuracy[0], curve.accuracy[-1]
    worst = 0.0
    for c, acc in zip(curve.grid, curve.accuracy):
        chord = (1.0 - c) * a0 + c * a1
        worst = max(worst, chord - acc)
    return worst
