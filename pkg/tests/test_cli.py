import json
import os
import subprocess
import sys

import pytest

from copra_lab import cli


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli")
    pre = str(root / "pre")
    cli.cmd_pretrain(
        {"dims": [3, 8, 8, 8, 8, 8, 4], "dataset": {"kind": "base_task"},
         "steps": 200, "seed": 0},
        pre, None,
    )
    tr = str(root / "tr")
    train_cfg = {
        "base": os.path.join(pre, "base.json"),
        "dataset": {"kind": "task_a"},
        "train": {"total_steps": 60, "seed": 1, "lora_scale": 8.0},
    }
    cli.cmd_train(train_cfg, tr, None)
    tr2 = str(root / "tr2")
    cli.cmd_train(train_cfg, tr2, 2)
    return {"root": root, "pre": pre, "tr": tr, "tr2": tr2,
            "train_cfg": train_cfg}


def test_output_contract(pipeline):
    for d in (pipeline["pre"], pipeline["tr"]):
        names = set(os.listdir(d))
        assert {"config.json", "summary.json", "manifest.json"} <= names
        manifest = json.load(open(os.path.join(d, "manifest.json")))
        assert set(manifest["files"]) == names - {"manifest.json"}
        for h in manifest["files"].values():
            assert len(h) == 64
    tr = set(os.listdir(pipeline["tr"]))
    assert {"adapters_early.json", "adapters_final.json", "metrics.csv",
            "evals.csv", "adapter_vector.csv"} <= tr


def test_rerun_is_byte_identical(pipeline, tmp_path):
    out = str(tmp_path / "again")
    cli.cmd_train(pipeline["train_cfg"], out, None)
    a = json.load(open(os.path.join(pipeline["tr"], "manifest.json")))
    b = json.load(open(os.path.join(out, "manifest.json")))
    assert a == b


def test_seed_override_changes_results(pipeline):
    a = json.load(open(os.path.join(pipeline["tr"], "manifest.json")))
    b = json.load(open(os.path.join(pipeline["tr2"], "manifest.json")))
    assert a["files"]["adapters_final.json"] != b["files"]["adapters_final.json"]
    cfg = json.load(open(os.path.join(pipeline["tr2"], "config.json")))
    assert cfg["train"]["seed"] == 2


def test_unknown_field_rejected(pipeline, tmp_path):
    bad = dict(pipeline["train_cfg"], bogus_field=1)
    with pytest.raises(cli.ConfigError, match="bogus_field"):
        cli.cmd_train(bad, str(tmp_path / "x"), None)
    with pytest.raises(cli.ConfigError, match="missing required"):
        cli.cmd_train({"dataset": {"kind": "task_a"}, "train": {}},
                      str(tmp_path / "y"), None)
    with pytest.raises(cli.ConfigError):
        cli.resolve_dataset({"kind": "nope"})


def test_merge_and_interp(pipeline, tmp_path):
    a = os.path.join(pipeline["tr"], "adapters_final.json")
    b = os.path.join(pipeline["tr2"], "adapters_final.json")
    base = os.path.join(pipeline["pre"], "base.json")
    mg = str(tmp_path / "mg")
    cli.cmd_merge({"inputs": [a, b], "method": "fusion"}, mg, None)
    assert os.path.exists(os.path.join(mg, "merged.json"))
    ip = str(tmp_path / "ip")
    res = cli.cmd_interp(
        {"base": base, "a": a, "b": a, "methods": ["fusion", "mixture"],
         "dataset": {"kind": "task_a"}},
        ip, None,
    )
    # a interpolated with itself: flat curve, zero barrier.
    assert res["barriers"]["fusion"] < 1e-12
    lines = open(os.path.join(ip, "curve.csv")).read().splitlines()
    assert lines[0] == "c,accuracy,method,seed_pair"
    assert len(lines) == 1 + 2 * 11


def test_shapley_and_prune(pipeline, tmp_path):
    base = os.path.join(pipeline["pre"], "base.json")
    a = os.path.join(pipeline["tr"], "adapters_final.json")
    sh = str(tmp_path / "sh")
    res = cli.cmd_shapley(
        {"base": base, "adapters": a, "dataset": {"kind": "task_a"},
         "q_grid": 5, "samples": 4, "method": "both"},
        sh, None,
    )
    assert len(res["exact"]["phi"]) == 6
    assert res["exact"]["evaluations"] == 64
    pr = str(tmp_path / "pr")
    cli.cmd_prune(
        {"base": base, "dataset": {"kind": "task_a"},
         "inputs": [{"path": a, "strategy": "copra"}],
         "structured": ["all", "everyother", "attention"],
         "sparsities": [0.5]},
        pr, None,
    )
    lines = open(os.path.join(pr, "prune.csv")).read().splitlines()
    assert lines[0] == "variant_or_sparsity,accuracy,strategy,checkpoint"
    assert any("attention,unsupported" in l for l in lines)


def test_fedsim_degenerate_single_client(pipeline, tmp_path):
    base = os.path.join(pipeline["pre"], "base.json")
    out = str(tmp_path / "fs")
    res = cli.cmd_fedsim(
        {"base": base, "dataset": {"kind": "task_a"}, "clients": 1,
         "replicates": [0], "schedule_modes": ["full"],
         "train": {"total_steps": 30, "lora_scale": 8.0}},
        out, None,
    )
    # k=1: merged model is the single client, accuracies identical.
    assert res["full"]["merged_mean"] == res["full"]["origin_mean"]


def test_mtlsim_self_fusion(pipeline, tmp_path):
    base = os.path.join(pipeline["pre"], "base.json")
    out = str(tmp_path / "mt")
    res = cli.cmd_mtlsim(
        {"base": base, "task_a": {"kind": "task_a"},
         "task_b": {"kind": "task_a"}, "replicates": [0],
         "schedule_modes": ["full"], "split_seed_b": 101, "seed_offset_b": 0,
         "train": {"total_steps": 30, "lora_scale": 8.0}},
        out, None,
    )
    # Same task, same seed, same split: fusing a model with itself.
    s = res["full"]
    assert s["merged_a"] == s["origin_a"]
    assert s["merged_b"] == s["origin_b"]


def test_ablate_records_divergence(pipeline, tmp_path):
    base = os.path.join(pipeline["pre"], "base.json")
    out = str(tmp_path / "ab")
    cli.cmd_ablate(
        {"base": base, "dataset": {"kind": "task_a"},
         "learning_rates": [5e-4, 1e100], "steps_grid": [20],
         "schedule_modes": ["full"], "seeds": [0, 1],
         "train": {"lora_scale": 100.0}},
        out, None,
    )
    lines = open(os.path.join(out, "ablate.csv")).read().splitlines()[1:]
    flags = [l.split(",")[6] for l in lines]
    assert "True" in flags and "False" in flags
    summary = json.load(open(os.path.join(out, "summary.json")))
    assert summary["diverged_cells"] >= 1


def test_console_entry_point(pipeline, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(pipeline["train_cfg"]))
    out = str(tmp_path / "run")
    proc = subprocess.run(
        [sys.executable, "-m", "copra_lab.cli", "train",
         "--config", str(cfg), "--out", out, "--threads", "1"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert os.path.exists(os.path.join(out, "manifest.json"))


def test_cli_error_exit_codes(tmp_path):
    assert cli.main(["train", "--config", str(tmp_path / "none.json"),
                     "--out", str(tmp_path / "o")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"bogus": 1}))
    assert cli.main(["train", "--config", str(bad),
                     "--out", str(tmp_path / "o2")]) == 1
