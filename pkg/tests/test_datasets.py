import numpy as np
import pytest

from copra_lab.datasets import (
    BASE_DIMS,
    Dataset,
    IngestionError,
    append_bias_column,
    base_task,
    gen_blobs,
    gen_rings,
    gen_spirals,
    load_csv,
    shard,
    split_train_test,
    task_a,
    task_b,
)


def test_generators_deterministic_and_balanced():
    for gen in (lambda s: gen_blobs(4, 2, 50, 0.3, s),
                lambda s: gen_spirals(4, 50, 0.1, s),
                lambda s: gen_rings(4, 50, 0.1, s)):
        a, b = gen(9), gen(9)
        assert np.array_equal(a.features, b.features)
        assert np.array_equal(a.labels, b.labels)
        counts = np.bincount(a.labels)
        assert counts.tolist() == [50] * 4
        assert a.features.shape == (200, 2)


def test_generator_seeds_differ():
    a = gen_blobs(3, 2, 10, 0.1, 1)
    b = gen_blobs(3, 2, 10, 0.1, 2)
    assert not np.array_equal(a.features, b.features)


def test_generator_validation():
    with pytest.raises(ValueError):
        gen_blobs(1, 2, 10, 0.1, 0)
    with pytest.raises(ValueError):
        gen_spirals(4, 0, 0.1, 0)


def test_blobs_zero_spread_collapses_to_centers():
    data = gen_blobs(4, 3, 20, 0.0, 5)
    for k in range(4):
        pts = data.features[data.labels == k]
        assert np.allclose(pts, pts[0], atol=1e-12)
        assert abs(np.linalg.norm(pts[0]) - 3.0) < 1e-9


def test_dataset_validation():
    with pytest.raises(ValueError):
        Dataset(np.zeros((3, 2)), np.zeros(2))


def test_split_disjoint_and_reproducible():
    data = gen_blobs(4, 2, 50, 0.3, 0)
    tr1, te1 = split_train_test(data, 0.2, split_seed=3)
    tr2, te2 = split_train_test(data, 0.2, split_seed=3)
    assert np.array_equal(tr1.features, tr2.features)
    assert te1.size == round(0.2 * data.size)
    assert tr1.size + te1.size == data.size
    # Disjoint: every test row absent from train rows.
    tr_rows = {tuple(r) for r in tr1.features}
    assert all(tuple(r) not in tr_rows for r in te1.features)
    with pytest.raises(ValueError):
        split_train_test(data, 0.0)


def test_split_seed_independent_of_generation_seed():
    data = gen_blobs(4, 2, 50, 0.3, 0)
    _, te_a = split_train_test(data, 0.2, split_seed=1)
    _, te_b = split_train_test(data, 0.2, split_seed=2)
    assert not np.array_equal(te_a.features, te_b.features)


def test_shard_partition():
    data = gen_blobs(4, 2, 50, 0.3, 0)
    shards = shard(data, 5, seed=7)
    assert sum(s.size for s in shards) == data.size
    all_rows = sorted(tuple(r) for s in shards for r in s.features)
    assert all_rows == sorted(tuple(r) for r in data.features)
    with pytest.raises(ValueError):
        shard(data, 0, seed=0)


def test_csv_roundtrip(tmp_path):
    p = tmp_path / "d.csv"
    p.write_text("x,y,label\n1.0,2.0,1\n-0.5,3.25,0\n")
    data = load_csv(str(p), has_header=True)
    assert data.size == 2
    assert data.features[0].tolist() == [1.0, 2.0]
    assert data.labels.tolist() == [1, 0]


def test_csv_minimal(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("1.0,2.0,1\n")
    data = load_csv(str(p))
    assert data.size == 1 and data.labels[0] == 1


def test_csv_error_locations(tmp_path):
    ragged = tmp_path / "ragged.csv"
    ragged.write_text("1.0,2.0,1\n3.0,0\n")
    with pytest.raises(IngestionError, match=":2"):
        load_csv(str(ragged))
    bad_label = tmp_path / "lbl.csv"
    bad_label.write_text("1.0,2.0,x\n")
    with pytest.raises(IngestionError, match="label"):
        load_csv(str(bad_label))
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    with pytest.raises(IngestionError):
        load_csv(str(empty))


def test_append_bias_column():
    data = gen_rings(3, 10, 0.1, 0)
    lifted = append_bias_column(data)
    assert lifted.features.shape == (30, 3)
    assert np.all(lifted.features[:, 2] == 1.0)
    assert np.array_equal(lifted.features[:, :2], data.features)


def test_fixed_tasks():
    a, b, s = task_a(), task_b(), base_task()
    for d in (a, b, s):
        assert d.features.shape == (1000, BASE_DIMS[0])
        assert d.num_classes == 4
    assert np.array_equal(task_a().features, a.features)
