"""Structured (layer-subset) and unstructured (global magnitude) pruning of
trained adapter sets.

Structured pruning zeroes B on the dropped layers, which is exactly a
permanent layer mask and keeps the low-rank storage; unstructured pruning
zeroes the globally smallest-magnitude entries across every A and B.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import AdapterSet

STRUCTURED_VARIANTS = ("all", "everyother", "low", "mid", "high", "custom")


@dataclass(frozen=True)
class StructuredSpec:
    variant: str
    keep: tuple[int, ...] = ()  # 1-based layer indices, custom variant only

    def __post_init__(self) -> None:
        if self.variant not in STRUCTURED_VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.variant == "custom" and not self.keep:
            raise ValueError("custom variant needs a nonempty keep list")

    def kept_layers(self, num_layers: int) -> set[int]:
        """0-based indices of the layers whose adapters survive."""
        L = num_layers
        if self.variant == "all":
            kept = set(range(L))
        elif self.variant == "everyother":
            kept = set(range(0, L, 2))  # 1-based odd layers
        elif self.variant == "low":
            kept = set(range(0, L // 3))
        elif self.variant == "mid":
            kept = set(range(L // 3, 2 * L // 3))
        elif self.variant == "high":
            kept = set(range(2 * L // 3, L))
        else:  # custom
            kept = {i - 1 for i in self.keep}
            if any(i < 0 or i >= L for i in kept):
                raise ValueError(f"keep indices must lie in [1, {L}]")
        if not kept:
            raise ValueError(f"variant {self.variant!r} keeps no layers at L={L}")
        return kept


@dataclass(frozen=True)
class SparsitySpec:
    sparsity: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.sparsity < 1.0:
            raise ValueError("sparsity must lie in [0, 1)")


def structured_prune(adapters: AdapterSet, spec: StructuredSpec) -> AdapterSet:
    """Zero B on all layers outside the kept set; kept layers untouched."""
    kept = spec.kept_layers(len(adapters))
    out = adapters.clone()
    for l, ad in enumerate(out.adapters):
        if l not in kept:
            ad.B = np.zeros_like(ad.B)
    return out


def unstructured_prune(adapters: AdapterSet, spec: SparsitySpec) -> AdapterSet:
    """Zero the globally smallest-magnitude fraction of A and B entries.

    Ties break by (layer, matrix, row-major index) with A ordered before B,
    so the zero set at a lower sparsity is a subset of the zero set at any
    higher one.
    """
    out = adapters.clone()
    entries = []
    for l, ad in enumerate(out.adapters):
        entries.append(("A", l, ad.A))
        entries.append(("B", l, ad.B))
    entries.sort(key=lambda e: (e[1], e[0]))
    magnitudes = np.concatenate([np.abs(m).ravel() for _, _, m in entries])
    total = magnitudes.size
    k = int(round(spec.sparsity * total))
    if k == 0:
        return out
    # Stable sort keeps the deterministic tie order of the concatenation.
    zero_idx = np.argsort(magnitudes, kind="stable")[:k]
    flat_mask = np.ones(total, dtype=bool)
    flat_mask[zero_idx] = False
    offset = 0
    for _, _, m in entries:
        n = m.size
        keep = flat_mask[offset:offset + n].reshape(m.shape)
        m[...] = np.where(keep, m, 0.0)
        offset += n
    return out


def zero_fraction(adapters: AdapterSet) -> float:
    zeros = 0
    total = 0
    for ad in adapters.adapters:
        zeros += int(np.sum(ad.A == 0.0)) + int(np.sum(ad.B == 0.0))
        total += ad.A.size + ad.B.size
    return zeros / total
