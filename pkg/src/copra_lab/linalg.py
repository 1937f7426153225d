"""Dense float64 matrix primitives and the finite-difference gradient oracle.

All public operations validate shapes and reject non-finite results instead of
letting NaN/Inf propagate silently.
"""

from __future__ import annotations

from typing import Callable, Mapping

import numpy as np

Matrix = np.ndarray


class DimensionError(ValueError):
    """Raised when operand shapes are incompatible."""


class NumericError(ArithmeticError):
    """Raised when an operation produces non-finite values."""


def as_matrix(data) -> Matrix:
    """Coerce to a 2-D float64 array, checking finiteness."""
    m = np.asarray(data, dtype=np.float64)
    if m.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got ndim={m.ndim}")
    check_finite(m, "input")
    return m


def check_finite(m: Matrix, context: str = "result") -> Matrix:
    if not np.all(np.isfinite(m)):
        raise NumericError(f"non-finite values in {context}")
    return m


def matmul(a: Matrix, b: Matrix) -> Matrix:
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"matmul shape mismatch: {a.shape} x {b.shape}"
        )
    return check_finite(a @ b, "matmul")


def relu(x: Matrix) -> Matrix:
    return np.maximum(x, 0.0)


def relu_backward(x: Matrix, upstream: Matrix) -> Matrix:
    """Pass upstream where x > 0; subgradient 0 at x == 0."""
    if x.shape != upstream.shape:
        raise DimensionError(
            f"relu_backward shape mismatch: {x.shape} vs {upstream.shape}"
        )
    return np.where(x > 0.0, upstream, 0.0)


def softmax_cross_entropy(logits: Matrix, labels: np.ndarray) -> tuple[float, Matrix]:
    """Mean cross-entropy over the batch and its gradient w.r.t. logits.

    Uses log-sum-exp stabilization (row max subtracted). The gradient is
    (softmax - onehot) / batch, so rows of the gradient sum to zero.
    """
    labels = np.asarray(labels, dtype=np.int64)
    batch, classes = logits.shape
    if labels.shape != (batch,):
        raise DimensionError(
            f"labels shape {labels.shape} does not match batch size {batch}"
        )
    if labels.min() < 0 or labels.max() >= classes:
        raise IndexError(
            f"labels must lie in [0, {classes}), got range "
            f"[{labels.min()}, {labels.max()}]"
        )
    shifted = logits - logits.max(axis=1, keepdims=True)
    lse = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(lse - shifted[np.arange(batch), labels]))
    probs = np.exp(shifted - lse[:, None])
    probs[np.arange(batch), labels] -= 1.0
    grad = probs / batch
    check_finite(grad, "softmax_cross_entropy gradient")
    if not np.isfinite(loss):
        raise NumericError("non-finite cross-entropy loss")
    return loss, grad


def finite_difference_check(
    f: Callable[[Mapping[str, Matrix]], float],
    params: Mapping[str, Matrix],
    grads: Mapping[str, Matrix],
    h: float = 1e-5,
) -> float:
    """Max relative error between analytic grads and central differences.

    Relative error per coordinate is |analytic - numeric| divided by
    max(1e-8, |analytic| + |numeric|).
    """
    if h <= 0:
        raise ValueError("h must be positive")
    worst = 0.0
    for name, theta in params.items():
        analytic = grads[name]
        if analytic.shape != theta.shape:
            raise DimensionError(
                f"gradient shape {analytic.shape} != parameter shape "
                f"{theta.shape} for {name!r}"
            )
        perturbed = {k: v.copy() for k, v in params.items()}
        flat = perturbed[name].ravel()
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            f_plus = f(perturbed)
            flat[i] = orig - h
            f_minus = f(perturbed)
            flat[i] = orig
            if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
                raise NumericError("non-finite objective during finite differencing")
            numeric = (f_plus - f_minus) / (2.0 * h)
            a = analytic.ravel()[i]
            err = abs(a - numeric) / max(1e-8, abs(a) + abs(numeric))
            worst = max(worst, err)
    return worst
