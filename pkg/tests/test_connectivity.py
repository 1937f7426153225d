import numpy as np
import pytest

from copra_lab.connectivity import (
    DEFAULT_GRID,
    InterpCurve,
    barrier,
    interpolation_sweep,
)
from copra_lab.datasets import Dataset
from copra_lab.network import LayerMask
from copra_lab.rng import RngStream
from copra_lab.training import evaluate
from conftest import make_adapters, make_base


def toy_eval_set(d=3, n=50, classes=4, seed=0):
    rng = RngStream(seed, 90)
    return Dataset(rng.normal((n, d)),
                   (rng.next_u64(n) % np.uint64(classes)).astype(np.int64))


def test_curve_validation():
    with pytest.raises(ValueError):
        InterpCurve(grid=[0.0, 0.5], accuracy=[0.5], method="fusion")
    with pytest.raises(ValueError):
        InterpCurve(grid=[0.0, 0.5, 0.9], accuracy=[0.5, 0.5, 0.5],
                    method="fusion")
    with pytest.raises(ValueError):
        InterpCurve(grid=[0.0, 0.5, 1.0], accuracy=[0.5, 1.5, 0.5],
                    method="fusion")


def test_barrier_hand_example():
    curve = InterpCurve(grid=[0.0, 0.5, 1.0], accuracy=[0.9, 0.7, 0.9],
                        method="fusion")
    assert abs(barrier(curve) - 0.2) < 1e-15


def test_barrier_floored_at_zero():
    curve = InterpCurve(grid=[0.0, 0.5, 1.0], accuracy=[0.5, 0.9, 0.5],
                        method="fusion")
    assert barrier(curve) == 0.0
    flat = InterpCurve(grid=[0.0, 0.5, 1.0], accuracy=[0.6] * 3, method="fusion")
    assert barrier(flat) == 0.0


def test_flat_curve_for_identical_adapters():
    base = make_base([3, 5, 4], seed=0)
    a = make_adapters(base, seed=1)
    data = toy_eval_set()
    for method in ("fusion", "mixture", "fusion+align"):
        curve = interpolation_sweep(base, a, a, method, DEFAULT_GRID, data)
        assert max(curve.accuracy) - min(curve.accuracy) < 1e-12


def test_endpoints_match_individual_models():
    base = make_base([3, 5, 4], seed=0)
    a1 = make_adapters(base, seed=2)
    a2 = make_adapters(base, seed=3)
    data = toy_eval_set(seed=1)
    full = LayerMask.ones(2)
    acc1 = evaluate(base, a1, full, data)[0]
    acc2 = evaluate(base, a2, full, data)[0]
    for method in ("fusion", "mixture", "fusion+align"):
        curve = interpolation_sweep(base, a1, a2, method, (0.0, 1.0), data)
        assert curve.accuracy[0] == acc1
        assert curve.accuracy[-1] == acc2


def test_sweep_symmetry():
    base = make_base([3, 5, 4], seed=0)
    a1 = make_adapters(base, seed=4)
    a2 = make_adapters(base, seed=5)
    data = toy_eval_set(seed=2)
    fwd = interpolation_sweep(base, a1, a2, "fusion", DEFAULT_GRID, data)
    rev = interpolation_sweep(base, a2, a1, "fusion", DEFAULT_GRID, data)
    assert fwd.accuracy == rev.accuracy[::-1]


def test_neg_loss_metric():
    base = make_base([3, 5, 4], seed=0)
    a1 = make_adapters(base, seed=6)
    a2 = make_adapters(base, seed=7)
    data = toy_eval_set(seed=3)
    curve = interpolation_sweep(base, a1, a2, "mixture", (0.0, 0.5, 1.0),
                                data, metric="neg_loss")
    assert curve.metric == "neg_loss"
    assert all(v <= 0.0 for v in curve.accuracy)


def test_sweep_validation():
    base = make_base([3, 5, 4], seed=0)
    a = make_adapters(base, seed=8)
    data = toy_eval_set()
    with pytest.raises(ValueError):
        interpolation_sweep(base, a, a, "bogus", DEFAULT_GRID, data)
    with pytest.raises(ValueError):
        interpolation_sweep(base, a, a, "fusion", DEFAULT_GRID, None)
    with pytest.raises(ValueError):
        interpolation_sweep(base, a, a, "fusion", DEFAULT_GRID, data,
                            metric="bogus")
