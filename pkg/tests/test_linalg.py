import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from copra_lab.linalg import (
    DimensionError,
    NumericError,
    check_finite,
    finite_difference_check,
    matmul,
    relu,
    relu_backward,
    softmax_cross_entropy,
)
from copra_lab.rng import RngStream


def test_matmul_identity():
    a = np.array([[1.0, 2.0], [3.0, 4.0]])
    assert np.array_equal(matmul(a, np.eye(2)), a)


def test_matmul_scalar():
    assert matmul(np.array([[2.0]]), np.array([[3.0]]))[0, 0] == 6.0


def test_matmul_rank_one():
    b = np.array([[1.0], [2.0]])
    a = np.array([[3.0, 4.0]])
    assert np.array_equal(matmul(b, a), np.array([[3.0, 4.0], [6.0, 8.0]]))


def test_matmul_shape_error_names_shapes():
    with pytest.raises(DimensionError, match=r"\(2, 3\).*\(2, 2\)"):
        matmul(np.zeros((2, 3)), np.zeros((2, 2)))


@given(st.integers(0, 1000))
@settings(max_examples=25, deadline=None)
def test_matmul_associative(seed):
    rng = RngStream(seed, 1)
    a, b, c = rng.normal((4, 5)), rng.normal((5, 6)), rng.normal((6, 3))
    left = matmul(matmul(a, b), c)
    right = matmul(a, matmul(b, c))
    denom = max(np.linalg.norm(left), 1e-12)
    assert np.linalg.norm(left - right) / denom < 1e-9


def test_relu_and_backward():
    x = np.array([[-1.0, 2.0]])
    assert np.array_equal(relu(x), np.array([[0.0, 2.0]]))
    up = np.array([[5.0, 7.0]])
    assert np.array_equal(relu_backward(x, up), np.array([[0.0, 7.0]]))
    assert np.array_equal(relu(np.full((2, 2), -3.0)), np.zeros((2, 2)))


def test_relu_backward_zero_subgradient():
    out = relu_backward(np.array([[0.0]]), np.array([[9.0]]))
    assert out[0, 0] == 0.0


def test_check_finite_rejects_nan():
    with pytest.raises(NumericError):
        check_finite(np.array([[np.nan]]))


def test_ce_uniform_logits():
    logits = np.zeros((3, 5))
    loss, _ = softmax_cross_entropy(logits, np.array([0, 2, 4]))
    assert abs(loss - math.log(5)) < 1e-12


def test_ce_confident_logits():
    loss, grad = softmax_cross_entropy(np.array([[10.0, -10.0]]), np.array([0]))
    expected = math.log1p(math.exp(-20.0))
    assert abs(loss - expected) < 1e-15
    assert abs(grad[0, 1] - math.exp(-20.0) / (1 + math.exp(-20.0))) < 1e-15
    assert abs(grad[0, 0] + grad[0, 1]) < 1e-15


@given(st.integers(0, 1000), st.integers(1, 8), st.integers(2, 6))
@settings(max_examples=50, deadline=None)
def test_ce_grad_rows_sum_zero_and_loss_nonneg(seed, batch, classes):
    rng = RngStream(seed, 1)
    logits = 3.0 * rng.normal((batch, classes))
    labels = (rng.next_u64(batch) % np.uint64(classes)).astype(np.int64)
    loss, grad = softmax_cross_entropy(logits, labels)
    assert loss >= 0.0
    assert np.all(np.abs(grad.sum(axis=1)) < 1e-12)


def test_ce_label_out_of_range():
    with pytest.raises(IndexError):
        softmax_cross_entropy(np.zeros((1, 3)), np.array([3]))
    with pytest.raises(IndexError):
        softmax_cross_entropy(np.zeros((1, 3)), np.array([-1]))


def test_fd_check_quadratic():
    theta = {"w": RngStream(1, 1).normal((3, 4))}

    def f(p):
        return 0.5 * float(np.sum(p["w"] ** 2))

    err = finite_difference_check(f, theta, {"w": theta["w"]}, h=1e-5)
    assert err < 1e-8


def test_fd_check_constant():
    theta = {"w": np.ones((2, 2))}
    err = finite_difference_check(lambda p: 1.0, theta,
                                  {"w": np.zeros((2, 2))}, h=1e-5)
    assert err == 0.0


def test_fd_check_catches_wrong_gradient():
    theta = {"w": np.ones((2, 2))}

    def f(p):
        return float(np.sum(p["w"]))

    err = finite_difference_check(f, theta, {"w": 2 * np.ones((2, 2))}, h=1e-5)
    assert err > 0.3


def test_fd_check_rejects_bad_h():
    with pytest.raises(ValueError):
        finite_difference_check(lambda p: 0.0, {}, {}, h=0.0)
