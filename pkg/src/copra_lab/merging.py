"""Merging algebra for adapter sets.

Fusion averages the factors (B and A separately) and keeps rank r; mixture
averages the dense updates B_i A_i, whose rank can grow to k*r. For two
inputs the fusion-mixture discrepancy has the closed form
    dW_f - dW_m = -c(1-c) * scale * (B1 - B2)(A1 - A2),
which the gap diagnostic and the alignment upper bound build on. Alignment
rotates one adapter's factors by an orthogonal map chosen via Procrustes,
which changes the factors but never the effective update.

Note on symbols: the merge coefficient is called c throughout; "scale" always
means the adapters' lora_scale. (Some formulations overload one symbol for
both roles; here they are distinct knobs.)
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import Matrix
from .network import AdapterSet, LoraAdapter, effective_delta


class MergeError(ValueError):
    """Raised when adapter sets are not shape/rank compatible for merging."""


@dataclass(frozen=True)
class MergeWeights:
    coefficients: tuple[float, ...]

    def __post_init__(self) -> None:
        c = self.coefficients
        if len(c) < 2:
            raise ValueError("need at least 2 coefficients")
        if any(x < 0 for x in c):
            raise ValueError("coefficients must be nonnegative")
        if abs(sum(c) - 1.0) > 1e-12:
            raise ValueError(f"coefficients must sum to 1, got {sum(c)}")

    @classmethod
    def uniform(cls, k: int) -> "MergeWeights":
        return cls(tuple([1.0 / k] * k))

    @classmethod
    def pair(cls, c: float) -> "MergeWeights":
        """(1-c, c): c=0 selects the first input, c=1 the second."""
        return cls((1.0 - c, c))


@dataclass
class AlignMap:
    """Per-layer orthogonal r x r maps; P^T P = I within 1e-9 Frobenius."""

    maps: list[Matrix]
    degenerate: list[bool] = field(default_factory=list)

    def __post_init__(self) -> None:
        for l, p in enumerate(self.maps):
            r = p.shape[0]
            err = np.linalg.norm(p.T @ p - np.eye(r))
            if err > 1e-9:
                raise ValueError(f"map {l} not orthogonal (deviation {err:.2e})")
        if not self.degenerate:
            self.degenerate = [False] * len(self.maps)

    @classmethod
    def identity(cls, num_layers: int, rank: int) -> "AlignMap":
        return cls([np.eye(rank) for _ in range(num_layers)])


@dataclass
class DeltaSet:
    """Dense per-layer updates (the output of a mixture merge)."""

    deltas: list[Matrix]

    def __len__(self) -> int:
        return len(self.deltas)


def _check_compatible(sets: list[AdapterSet]) -> None:
    if len(sets) < 2:
        raise MergeError("need at least two adapter sets")
    ref = sets[0]
    for s in sets[1:]:
        if len(s) != len(ref):
            raise MergeError("layer counts differ")
        for l, (a, b) in enumerate(zip(ref.adapters, s.adapters)):
            if a.rank != b.rank or a.A.shape != b.A.shape or a.B.shape != b.B.shape:
                raise MergeError(f"layer {l}: rank/shape mismatch")
            if a.lora_scale != b.lora_scale:
                raise MergeError(f"layer {l}: lora_scale mismatch")


def _weighted_sum(mats: list[Matrix], coeffs: tuple[float, ...]) -> Matrix:
    # Skip zero coefficients so degenerate weights like (1, 0) return the
    # surviving input bitwise.
    terms = [(c, m) for c, m in zip(coeffs, mats) if c != 0.0]
    if len(terms) == 1 and terms[0][0] == 1.0:
        return terms[0][1].copy()
    out = np.zeros_like(mats[0])
    for c, m in terms:
        out += c * m
    return out


def fuse(sets: list[AdapterSet], weights: MergeWeights) -> AdapterSet:
    """Factor-space merge: B_f = sum c_i B_i, A_f = sum c_i A_i (rank r)."""
    _check_compatible(sets)
    if len(weights.coefficients) != len(sets):
        raise MergeError("weight count does not match input count")
    merged = []
    for l in range(len(sets[0])):
        ref = sets[0].adapters[l]
        a_f = _weighted_sum([s.adapters[l].A for s in sets], weights.coefficients)
        b_f = _weighted_sum([s.adapters[l].B for s in sets], weights.coefficients)
        merged.append(LoraAdapter(A=a_f, B=b_f, rank=ref.rank,
                                  lora_scale=ref.lora_scale))
    return AdapterSet(adapters=merged, strategy="fused")


def mix(sets: list[AdapterSet], weights: MergeWeights) -> DeltaSet:
    """Dense merge: dW = sum c_i * scale * B_i A_i."""
    _check_compatible(sets)
    if len(weights.coefficients) != len(sets):
        raise MergeError("weight count does not match input count")
    deltas = []
    for l in range(len(sets[0])):
        dense = [effective_delta(s.adapters[l]) for s in sets]
        deltas.append(_weighted_sum(dense, weights.coefficients))
    return DeltaSet(deltas)


def fusion_mixture_gap(a1: AdapterSet, a2: AdapterSet, c: float) -> list[float]:
    """Per-layer Frobenius norm of dW_fusion - dW_mixture at weights (1-c, c)."""
    w = MergeWeights.pair(c)
    fused = fuse([a1, a2], w)
    mixed = mix([a1, a2], w)
    gaps = []
    for l in range(len(a1)):
        diff = effective_delta(fused.adapters[l]) - mixed.deltas[l]
        gaps.append(float(np.linalg.norm(diff)))
    return gaps


def align(reference: AdapterSet, other: AdapterSet) -> tuple[AdapterSet, AlignMap]:
    """Rotate other's factors onto the reference with per-layer orthogonal P.

    P minimizes ||B1 - B2 P||_F^2 + ||A1 - P^T A2||_F^2; the closed form is
    P = U V^T from the SVD of M = B2^T B1 + A2 A1^T. The reparametrized
    adapter (B2 P, P^T A2) has the same effective update as the input.
    """
    _check_compatible([reference, other])
    maps: list[Matrix] = []
    degenerate: list[bool] = []
    aligned = []
    for l in range(len(reference)):
        r1, r2 = reference.adapters[l], other.adapters[l]
        m = r2.B.T @ r1.B + r2.A @ r1.A.T
        try:
            u, _, vt = np.linalg.svd(m)
            p = u @ vt
        except np.linalg.LinAlgError:
            p = np.eye(r2.rank)
            degenerate.append(True)
        else:
            degenerate.append(False)
        maps.append(p)
        aligned.append(
            LoraAdapter(A=p.T @ r2.A, B=r2.B @ p, rank=r2.rank,
                        lora_scale=r2.lora_scale)
        )
    out = AdapterSet(adapters=aligned, seed=other.seed,
                     strategy=other.strategy, step=other.step)
    return out, AlignMap(maps=maps, degenerate=degenerate)


def alignment_objective(reference: AdapterSet, other: AdapterSet) -> float:
    """Sum over layers of ||B1 - B2||_F^2 + ||A1 - A2||_F^2."""
    total = 0.0
    for r1, r2 in zip(reference.adapters, other.adapters):
        total += float(np.linalg.norm(r1.B - r2.B) ** 2)
        total += float(np.linalg.norm(r1.A - r2.A) ** 2)
    return total


def upper_bound(a1: AdapterSet, a2: AdapterSet, c: float,
                amap: AlignMap) -> list[float]:
    """Per-layer c(1-c)*scale*(||B1 - B2 P||_F + ||A1 - P^T A2||_F).

    Reported as a diagnostic; as a bound on the fusion-mixture gap it can be
    violated when both factor distances exceed 1, so callers should treat it
    as an alignment quality score rather than a guarantee.
    """
    gaps = []
    for l in range(len(a1)):
        r1, r2 = a1.adapters[l], a2.adapters[l]
        p = amap.maps[l]
        term = (np.linalg.norm(r1.B - r2.B @ p)
                + np.linalg.norm(r1.A - p.T @ r2.A))
        gaps.append(float(c * (1.0 - c) * r1.lora_scale * term))
    return gaps
