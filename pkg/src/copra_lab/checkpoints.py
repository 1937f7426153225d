"""Portable JSON-shaped checkpoint files for base networks and adapter sets.

Floats are serialized as shortest round-trippable decimals (Python repr, the
json module's default), so load(save(x)) reproduces every matrix bitwise.
The encoding is recorded in the file header.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np

from .network import AdapterSet, BaseNet, LoraAdapter

FORMAT_VERSION = 1
FLOAT_ENCODING = "shortest-roundtrip-decimal"


class CheckpointError(ValueError):
    """Raised for unreadable or version-incompatible checkpoint files."""


def _header(kind: str) -> dict[str, Any]:
    return {"format_version": FORMAT_VERSION, "kind": kind,
            "float_encoding": FLOAT_ENCODING}


def _dump(doc: dict[str, Any], path: str) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _load(path: str, kind: str) -> dict[str, Any]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CheckpointError(f"cannot read {path}: {exc}") from exc
    if doc.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"{path}: format_version {doc.get('format_version')} != "
            f"{FORMAT_VERSION}"
        )
    if doc.get("kind") != kind:
        raise CheckpointError(
            f"{path}: kind {doc.get('kind')!r}, expected {kind!r}"
        )
    return doc


def save_base(path: str, base: BaseNet, source_accuracy: float | None = None,
              seed: int | None = None) -> None:
    doc = _header("basenet")
    doc["dims"] = base.dims
    doc["weights"] = [w.tolist() for w in base.weights]
    if source_accuracy is not None:
        doc["source_accuracy"] = source_accuracy
    if seed is not None:
        doc["seed"] = seed
    _dump(doc, path)


def load_base(path: str) -> BaseNet:
    doc = _load(path, "basenet")
    weights = [np.array(w, dtype=np.float64) for w in doc["weights"]]
    return BaseNet(dims=list(doc["dims"]), weights=weights)


def save_adapters(path: str, adapters: AdapterSet) -> None:
    doc = _header("adapters")
    doc["seed"] = adapters.seed
    doc["strategy"] = adapters.strategy
    doc["step"] = adapters.step
    doc["rank"] = adapters.adapters[0].rank if adapters.adapters else 0
    doc["lora_scale"] = (adapters.adapters[0].lora_scale
                         if adapters.adapters else 1.0)
    doc["layers"] = [
        {"A": ad.A.tolist(), "B": ad.B.tolist()} for ad in adapters.adapters
    ]
    _dump(doc, path)


def load_adapters(path: str) -> AdapterSet:
    doc = _load(path, "adapters")
    layers = []
    for entry in doc["layers"]:
        a = np.array(entry["A"], dtype=np.float64)
        b = np.array(entry["B"], dtype=np.float64)
        layers.append(
            LoraAdapter(A=a, B=b, rank=int(doc["rank"]),
                        lora_scale=float(doc["lora_scale"]))
        )
    return AdapterSet(adapters=layers, seed=int(doc["seed"]),
                      strategy=str(doc["strategy"]), step=int(doc["step"]))
