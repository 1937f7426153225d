"""Counter-based deterministic random number generation.

Every stochastic component (mask sampling, adapter init, data generation,
batch shuffling) owns its own stream, so determinism survives any execution
order. A stream is identified by (global_seed, stream_id) and advances an
explicit counter; the same (seed, stream, counter) triple always yields the
same output.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

# Well-known stream ids used across the package.
STREAM_INIT = 1
STREAM_MASK = 2
STREAM_SHUFFLE = 3
STREAM_DATA = 4
STREAM_SPLIT = 5
STREAM_SHAPLEY = 6


def _mix(z: np.ndarray) -> np.ndarray:
    """SplitMix64 finalizer applied elementwise to uint64 values."""
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


@dataclass
class RngStream:
    """SplitMix64-style counter-based generator.

    Output at counter i depends only on (global_seed, stream_id, i), never on
    how many values other streams have consumed.
    """

    global_seed: int
    stream_id: int
    counter: int = 0
    _base: np.uint64 = field(init=False, repr=False)

    def __post_init__(self) -> None:
        with np.errstate(over="ignore"):
            seed = _mix(np.uint64(self.global_seed & 0xFFFFFFFFFFFFFFFF))
            stream = _mix(np.uint64(self.stream_id & 0xFFFFFFFFFFFFFFFF) * _GAMMA)
            self._base = np.uint64(seed ^ stream)

    def next_u64(self, n: int) -> np.ndarray:
        """Return n uint64 values, consuming n counter increments."""
        with np.errstate(over="ignore"):
            idx = np.arange(self.counter, self.counter + n, dtype=np.uint64)
            out = _mix(self._base + (idx + np.uint64(1)) * _GAMMA)
        self.counter += n
        return out

    def uniform(self, n: int) -> np.ndarray:
        """n doubles uniform on [0, 1), one counter increment each."""
        return (self.next_u64(n) >> np.uint64(11)) * (2.0 ** -53)

    def bernoulli(self, p: float, n: int) -> np.ndarray:
        """n independent Bernoulli(p) draws as int64 in {0, 1}.

        Consumes exactly n counter increments. p=0 and p=1 are exact: the
        uniform variate lies in [0, 1), so u < 0 never holds and u < 1 always
        does.
        """
        return (self.uniform(n) < p).astype(np.int64)

    def normal(self, shape: tuple[int, ...]) -> np.ndarray:
        """Standard normal array via Box-Muller; 2 increments per pair."""
        n = int(np.prod(shape)) if shape else 1
        pairs = (n + 1) // 2
        u1 = self.uniform(pairs)
        u2 = self.uniform(pairs)
        r = np.sqrt(-2.0 * np.log1p(-u1))  # log1p avoids log(0)
        theta = 2.0 * np.pi * u2
        z = np.concatenate([r * np.cos(theta), r * np.sin(theta)])[:n]
        return z.reshape(shape)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates permutation of range(n); consumes n-1 increments."""
        perm = np.arange(n)
        if n < 2:
            return perm
        draws = self.next_u64(n - 1)
        for i in range(n - 1, 0, -1):
            j = int(draws[n - 1 - i] % np.uint64(i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm
