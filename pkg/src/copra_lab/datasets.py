"""Synthetic classification tasks and CSV ingestion.

All generators are pure functions of their arguments including the seed.
The fixed acceptance tasks: TaskA = spirals(4, 250, 0.15, seed 7),
TaskB = rings(4, 250, 0.1, seed 11), base pretraining on blobs(4, d=2).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import Matrix
from .rng import STREAM_DATA, STREAM_SPLIT, RngStream


class IngestionError(ValueError):
    """Raised for malformed CSV input, carrying row/column location."""


@dataclass
class Dataset:
    features: Matrix  # N x d
    labels: np.ndarray  # N ints in [0, K)
    name: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.features.shape[0] != self.labels.shape[0]:
            raise ValueError("feature/label count mismatch")
        if self.features.shape[0] < 1:
            raise ValueError("dataset must be nonempty")

    @property
    def size(self) -> int:
        return self.features.shape[0]

    @property
    def num_classes(self) -> int:
        return int(self.labels.max()) + 1


def _check_counts(classes: int, n_per_class: int) -> None:
    if classes < 2:
        raise ValueError("need at least 2 classes")
    if n_per_class < 1:
        raise ValueError("need at least 1 sample per class")


def gen_blobs(
    classes: int, dim: int, n_per_class: int, spread: float, seed: int
) -> Dataset:
    """Gaussian clusters at random unit-sphere centers scaled by 3."""
    _check_counts(classes, n_per_class)
    rng = RngStream(seed, STREAM_DATA)
    centers = rng.normal((classes, dim))
    centers /= np.linalg.norm(centers, axis=1, keepdims=True)
    centers *= 3.0
    feats = []
    labels = []
    for k in range(classes):
        pts = centers[k] + spread * rng.normal((n_per_class, dim))
        feats.append(pts)
        labels.append(np.full(n_per_class, k))
    return Dataset(
        np.concatenate(feats), np.concatenate(labels),
        name=f"blobs{classes}", seed=seed,
    )


def gen_spirals(
    classes: int, n_per_class: int, noise: float, seed: int,
    turns: float = 0.25,
) -> Dataset:
    """Interleaved Archimedean spiral arms in 2-D with Gaussian noise.

    turns controls how far each arm winds; the default quarter turn keeps the
    arms angularly separated, which the bias-free network needs (see
    append_bias_column for why).
    """
    _check_counts(classes, n_per_class)
    rng = RngStream(seed, STREAM_DATA)
    feats = []
    labels = []
    for k in range(classes):
        t = rng.uniform(n_per_class)
        radius = 0.3 + 2.7 * t
        angle = 2.0 * np.pi * (t * turns + k / classes)
        pts = np.stack(
            [radius * np.cos(angle), radius * np.sin(angle)], axis=1
        )
        pts += noise * rng.normal((n_per_class, 2))
        feats.append(pts)
        labels.append(np.full(n_per_class, k))
    return Dataset(
        np.concatenate(feats), np.concatenate(labels),
        name=f"spirals{classes}", seed=seed,
    )


def gen_rings(classes: int, n_per_class: int, noise: float, seed: int) -> Dataset:
    """Concentric circles, one radius per class."""
    _check_counts(classes, n_per_class)
    rng = RngStream(seed, STREAM_DATA)
    feats = []
    labels = []
    for k in range(classes):
        radius = 0.8 * (k + 1)
        angle = 2.0 * np.pi * rng.uniform(n_per_class)
        pts = np.stack(
            [radius * np.cos(angle), radius * np.sin(angle)], axis=1
        )
        pts += noise * rng.normal((n_per_class, 2))
        feats.append(pts)
        labels.append(np.full(n_per_class, k))
    return Dataset(
        np.concatenate(feats), np.concatenate(labels),
        name=f"rings{classes}", seed=seed,
    )


def split_train_test(
    data: Dataset, test_fraction: float = 0.2, split_seed: int = 0
) -> tuple[Dataset, Dataset]:
    """Disjoint reproducible split; the split seed is independent of the
    generation seed."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = RngStream(split_seed, STREAM_SPLIT)
    perm = rng.permutation(data.size)
    n_test = max(1, int(round(data.size * test_fraction)))
    test_idx = perm[:n_test]
    train_idx = perm[n_test:]
    train = Dataset(
        data.features[train_idx], data.labels[train_idx],
        name=data.name + "/train", seed=data.seed,
    )
    test = Dataset(
        data.features[test_idx], data.labels[test_idx],
        name=data.name + "/test", seed=data.seed,
    )
    return train, test


def shard(data: Dataset, k: int, seed: int) -> list[Dataset]:
    """Split into k disjoint random shards of near-equal size."""
    if k < 1 or k > data.size:
        raise ValueError(f"cannot split {data.size} samples into {k} shards")
    rng = RngStream(seed, STREAM_SPLIT)
    perm = rng.permutation(data.size)
    shards = []
    bounds = np.linspace(0, data.size, k + 1).astype(int)
    for i in range(k):
        idx = perm[bounds[i]:bounds[i + 1]]
        shards.append(
            Dataset(
                data.features[idx], data.labels[idx],
                name=f"{data.name}/shard{i}", seed=data.seed,
            )
        )
    return shards


def load_csv(path: str, has_header: bool = False) -> Dataset:
    """Rows are d decimal feature columns followed by one integer label."""
    feats: list[list[float]] = []
    labels: list[int] = []
    width = None
    with open(path) as fh:
        for row_no, line in enumerate(fh, start=1):
            if row_no == 1 and has_header:
                continue
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if width is None:
                width = len(cells)
                if width < 2:
                    raise IngestionError(
                        f"{path}:{row_no}: need at least one feature column"
                    )
            elif len(cells) != width:
                raise IngestionError(
                    f"{path}:{row_no}: expected {width} columns, got {len(cells)}"
                )
            try:
                feats.append([float(c) for c in cells[:-1]])
            except ValueError as exc:
                raise IngestionError(f"{path}:{row_no}: bad feature: {exc}") from exc
            try:
                labels.append(int(cells[-1]))
            except ValueError as exc:
                raise IngestionError(
                    f"{path}:{row_no}: column {width}: bad label: {exc}"
                ) from exc
    if not feats:
        raise IngestionError(f"{path}: no data rows")
    return Dataset(np.array(feats, dtype=np.float64), np.array(labels), name=path)


def append_bias_column(data: Dataset) -> Dataset:
    """Append a constant-1 feature column (homogeneous lift).

    The network has no bias parameters, so it is positively homogeneous in
    its input: classification depends only on the input direction. Radial
    tasks (rings) and winding spirals are not direction-separable in 2-D;
    the lift makes arbitrary 2-D regions expressible without adding any
    trainable bias.
    """
    ones = np.ones((data.size, 1))
    return Dataset(
        np.concatenate([data.features, ones], axis=1),
        data.labels, name=data.name + "+1", seed=data.seed,
    )


def task_a() -> Dataset:
    """Fixed acceptance target task: lifted 4-arm spirals."""
    return append_bias_column(gen_spirals(4, 250, 0.15, seed=7))


def task_b() -> Dataset:
    """Fixed acceptance second task: lifted 4-class rings."""
    return append_bias_column(gen_rings(4, 250, 0.1, seed=11))


def base_task() -> Dataset:
    """Fixed pretraining source: lifted 2-D blobs."""
    return append_bias_column(gen_blobs(4, 2, 250, spread=0.3, seed=2))


BASE_DIMS = [3, 32, 32, 32, 32, 32, 4]
