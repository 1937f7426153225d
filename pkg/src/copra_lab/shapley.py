"""Layerwise Shapley values: exact enumeration for small player counts and a
multilinear-extension sampling estimator.

The estimator integrates the expected marginal contribution e_i(q) over the
inclusion probability q in [0, 1] with the trapezoid rule; at each q it draws
one global inclusion vector per sample and derives every player's coalition
from it by exclusion, so a sample costs at most 2L distinct coalition
evaluations (and far fewer with memoization).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .datasets import Dataset
from .network import AdapterSet, BaseNet, LayerMask
from .rng import RngStream
from .training import evaluate

EXACT_PLAYER_LIMIT = 12


class BudgetError(ValueError):
    """Raised when exact enumeration would be too expensive."""


@dataclass
class CoalitionGame:
    """(N, v): players 0..n-1 and a characteristic function over subsets.

    value_fn takes a frozenset of player indices and must be deterministic.
    """

    player_count: int
    value_fn: Callable[[frozenset[int]], float]


@dataclass
class ShapleyResult:
    phi: np.ndarray
    stderr: np.ndarray
    method: str
    evaluations: int

    def __post_init__(self) -> None:
        self.phi = np.asarray(self.phi, dtype=np.float64)
        self.stderr = np.asarray(self.stderr, dtype=np.float64)
        if np.any(self.stderr < 0):
            raise ValueError("stderr must be nonnegative")


class _CachedGame:
    """Memoizing wrapper; counts unique value_fn evaluations."""

    def __init__(self, game: CoalitionGame):
        self.game = game
        self.cache: dict[frozenset[int], float] = {}

    def value(self, subset: frozenset[int]) -> float:
        if subset not in self.cache:
            self.cache[subset] = float(self.game.value_fn(subset))
        return self.cache[subset]

    @property
    def evaluations(self) -> int:
        return len(self.cache)


def table_game(values: dict[frozenset[int], float], players: int) -> CoalitionGame:
    """Game defined by an explicit subset-to-value table."""
    def v(subset: frozenset[int]) -> float:
        return values[frozenset(subset)]

    return CoalitionGame(player_count=players, value_fn=v)


def model_game(
    base: BaseNet,
    adapters: AdapterSet,
    eval_set: Dataset,
    metric: str = "accuracy",
) -> CoalitionGame:
    """Characteristic function: performance with adapters active exactly on
    the coalition's layers (v of the empty set is the base accuracy)."""
    if metric not in ("accuracy", "neg_loss"):
        raise ValueError(f"unknown metric {metric!r}")
    L = len(adapters)

    def v(subset: frozenset[int]) -> float:
        mask = LayerMask.from_subset(L, set(subset))
        acc, loss = evaluate(base, adapters, mask, eval_set)
        return acc if metric == "accuracy" else -loss

    return CoalitionGame(player_count=L, value_fn=v)


def exact_shapley(game: CoalitionGame) -> ShapleyResult:
    """Exact values by subset enumeration; exactly 2^L value evaluations."""
    n = game.player_count
    if n > EXACT_PLAYER_LIMIT:
        raise BudgetError(
            f"{n} players needs 2^{n} evaluations; use mle_shapley instead"
        )
    cached = _CachedGame(game)
    values = {}
    for bits in range(1 << n):
        subset = frozenset(i for i in range(n) if bits & (1 << i))
        values[bits] = cached.value(subset)
    fact = [math.factorial(k) for k in range(n + 1)]
    phi = np.zeros(n)
    for i in range(n):
        for bits in range(1 << n):
            if bits & (1 << i):
                continue
            s = bin(bits).count("1")
            weight = fact[s] * fact[n - s - 1] / fact[n]
            phi[i] += weight * (values[bits | (1 << i)] - values[bits])
    return ShapleyResult(phi=phi, stderr=np.zeros(n), method="exact",
                         evaluations=cached.evaluations)


def mle_shapley(
    game: CoalitionGame,
    q_grid_size: int = 21,
    samples_per_q: int = 64,
    rng: RngStream | None = None,
) -> ShapleyResult:
    """Sampling estimator of the multilinear-extension integral.

    For each q on a uniform grid the marginal contribution of every player is
    averaged over samples_per_q shared inclusion vectors; the q-integral uses
    the trapezoid rule and the standard error propagates the per-q sample
    variance through the quadrature weights.
    """
    if q_grid_size < 2:
        raise ValueError("q_grid_size must be >= 2")
    if samples_per_q < 1:
        raise ValueError("samples_per_q must be >= 1")
    if rng is None:
        rng = RngStream(0, 0)
    n = game.player_count
    cached = _CachedGame(game)
    qs = np.linspace(0.0, 1.0, q_grid_size)
    means = np.zeros((q_grid_size, n))
    variances = np.zeros((q_grid_size, n))
    for qi, q in enumerate(qs):
        marginals = np.zeros((samples_per_q, n))
        for s in range(samples_per_q):
            incl = rng.bernoulli(q, n)
            members = frozenset(int(i) for i in np.flatnonzero(incl))
            for i in range(n):
                excl = members - {i}
                marginals[s, i] = (cached.value(excl | {i})
                                   - cached.value(excl))
        means[qi] = marginals.mean(axis=0)
        variances[qi] = marginals.var(axis=0, ddof=1) if samples_per_q > 1 else 0.0
    # Trapezoid weights: h at interior points, h/2 at the ends.
    h = 1.0 / (q_grid_size - 1)
    w = np.full(q_grid_size, h)
    w[0] = w[-1] = h / 2.0
    phi = w @ means
    var_phi = (w ** 2) @ (variances / samples_per_q)
    return ShapleyResult(phi=phi, stderr=np.sqrt(var_phi), method="mle",
                         evaluations=cached.evaluations)
