"""Experiment runner: one subcommand per experiment, JSON configs in,
CSV/JSON results out.

Every run writes its resolved config next to the outputs, then the result
files, then a manifest with content hashes — reruns of the same config
reproduce identical hashes. Execution is single-threaded for bitwise
reproducibility; --threads is accepted for interface compatibility but
values above 1 do not change scheduling.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import checkpoints as ckpt
from .connectivity import DEFAULT_GRID, barrier, interpolation_sweep
from .datasets import (
    Dataset,
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
from .merging import MergeWeights, align, fuse, mix
from .network import AdapterSet, BaseNet, LayerMask
from .pruning import SparsitySpec, StructuredSpec, structured_prune, unstructured_prune
from .rng import STREAM_SHAPLEY, RngStream
from .shapley import exact_shapley, mle_shapley, model_game
from .schedule import MODE_COPRA, MODE_FULL
from .training import (
    TrainConfig,
    TrainingDivergedError,
    evaluate,
    pretrain_base,
    train,
)


class ConfigError(ValueError):
    """Raised for unknown fields or schema violations in experiment configs."""


# ---------------------------------------------------------------------------
# config plumbing

def _require(cfg: dict, allowed: dict[str, Any], context: str) -> dict:
    """Fill defaults and reject unknown fields. allowed maps field -> default
    (REQUIRED sentinel for mandatory fields)."""
    unknown = set(cfg) - set(allowed)
    if unknown:
        raise ConfigError(f"{context}: unknown fields {sorted(unknown)}")
    out = {}
    for key, default in allowed.items():
        if key in cfg:
            out[key] = cfg[key]
        elif default is REQUIRED:
            raise ConfigError(f"{context}: missing required field {key!r}")
        else:
            out[key] = default
    return out


REQUIRED = object()

_DATASET_FIELDS = {
    "kind": REQUIRED,
    "classes": 4,
    "dim": 2,
    "n_per_class": 250,
    "noise": 0.15,
    "spread": 0.3,
    "turns": 0.25,
    "seed": 0,
    "lift": True,
    "path": None,
    "has_header": False,
}


def resolve_dataset(cfg: dict, context: str = "dataset") -> Dataset:
    c = _require(cfg, _DATASET_FIELDS, context)
    kind = c["kind"]
    if kind == "task_a":
        return task_a()
    if kind == "task_b":
        return task_b()
    if kind == "base_task":
        return base_task()
    if kind == "blobs":
        data = gen_blobs(c["classes"], c["dim"], c["n_per_class"],
                         c["spread"], c["seed"])
    elif kind == "spirals":
        data = gen_spirals(c["classes"], c["n_per_class"], c["noise"],
                           c["seed"], turns=c["turns"])
    elif kind == "rings":
        data = gen_rings(c["classes"], c["n_per_class"], c["noise"], c["seed"])
    elif kind == "csv":
        if not c["path"]:
            raise ConfigError(f"{context}: csv kind requires a path")
        return load_csv(c["path"], c["has_header"])
    else:
        raise ConfigError(f"{context}: unknown dataset kind {kind!r}")
    if c["lift"]:
        data = append_bias_column(data)
    return data


_TRAIN_FIELDS = {
    "learning_rate": 5e-4,
    "total_steps": 500,
    "batch_size": 32,
    "schedule_mode": MODE_COPRA,
    "fixed_p": None,
    "seed": 0,
    "rank": 2,
    "lora_scale": 1.0,
    "adam_inactive": "freeze",
    "checkpoint_steps": [],
    "eval_every": 100,
}


def resolve_train_config(cfg: dict, seed_override: int | None,
                         context: str = "train") -> TrainConfig:
    c = _require(cfg, _TRAIN_FIELDS, context)
    if seed_override is not None:
        c["seed"] = seed_override
    return TrainConfig(**c)


# ---------------------------------------------------------------------------
# output plumbing

def _fmt(x: Any) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, np.integer):
        return str(int(x))
    return str(x)


def write_csv(path: str, header: Sequence[str],
              rows: Sequence[Sequence[Any]]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def write_json(path: str, doc: Any) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_manifest(out_dir: str) -> None:
    """Hash every output file; written last, so reruns can be diffed by hash."""
    entries = {}
    for name in sorted(os.listdir(out_dir)):
        if name == "manifest.json":
            continue
        full = os.path.join(out_dir, name)
        if os.path.isfile(full):
            with open(full, "rb") as fh:
                entries[name] = hashlib.sha256(fh.read()).hexdigest()
    write_json(os.path.join(out_dir, "manifest.json"), {"files": entries})


def _prepare_out(out_dir: str, resolved_config: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    write_json(os.path.join(out_dir, "config.json"), resolved_config)


def flat_adapter_vector(adapters: AdapterSet) -> np.ndarray:
    parts = []
    for ad in adapters.adapters:
        parts.append(ad.A.ravel())
        parts.append(ad.B.ravel())
    return np.concatenate(parts)


def _metrics_rows(log) -> tuple[list, list]:
    step_rows = [(s, loss, p, active) for s, loss, p, active in log.steps]
    eval_rows = [(s, tr, te) for s, tr, te in log.evals]
    return step_rows, eval_rows


# ---------------------------------------------------------------------------
# subcommands

def cmd_pretrain(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "dims": REQUIRED, "dataset": REQUIRED, "steps": 2000, "lr": 1e-3,
        "seed": 0, "batch_size": 32, "test_fraction": 0.2, "split_seed": 100,
    }, "pretrain")
    if seed_override is not None:
        c["seed"] = seed_override
    _prepare_out(out_dir, c)
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    base, train_acc = pretrain_base(c["dims"], train_set, c["steps"], c["lr"],
                                    c["seed"], c["batch_size"])
    test_acc, test_loss = evaluate(base, None, None, test_set)
    ckpt.save_base(os.path.join(out_dir, "base.json"), base,
                   source_accuracy=train_acc, seed=c["seed"])
    write_json(os.path.join(out_dir, "summary.json"), {
        "train_accuracy": train_acc,
        "test_accuracy": test_acc,
        "test_loss": test_loss,
    })
    write_manifest(out_dir)
    return {"test_accuracy": test_acc}


def cmd_train(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "dataset": REQUIRED, "train": REQUIRED,
        "test_fraction": 0.2, "split_seed": 101,
    }, "train")
    tc = resolve_train_config(c["train"], seed_override)
    c["train"] = tc.__dict__.copy()
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    adapters, log, checkpoints = train(base, tc, train_set, test_set)
    for label, snap in checkpoints.items():
        ckpt.save_adapters(
            os.path.join(out_dir, f"adapters_{label}.json"), snap
        )
    step_rows, eval_rows = _metrics_rows(log)
    write_csv(os.path.join(out_dir, "metrics.csv"),
              ["step", "loss", "p", "active_layers"], step_rows)
    write_csv(os.path.join(out_dir, "evals.csv"),
              ["step", "train_acc", "test_acc"], eval_rows)
    vec = flat_adapter_vector(adapters)
    write_csv(os.path.join(out_dir, "adapter_vector.csv"),
              ["index", "value"], list(enumerate(vec.tolist())))
    full = LayerMask.ones(len(adapters))
    test_acc, test_loss = evaluate(base, adapters, full, test_set)
    train_acc, _ = evaluate(base, adapters, full, train_set)
    write_json(os.path.join(out_dir, "summary.json"), {
        "final_train_accuracy": train_acc,
        "final_test_accuracy": test_acc,
        "final_test_loss": test_loss,
        "schedule_mode": tc.schedule_mode,
        "seed": tc.seed,
    })
    write_manifest(out_dir)
    return {"test_accuracy": test_acc}


def cmd_merge(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "inputs": REQUIRED, "method": "fusion", "weights": None,
    }, "merge")
    _prepare_out(out_dir, c)
    sets = [ckpt.load_adapters(p) for p in c["inputs"]]
    if c["weights"] is None:
        w = MergeWeights.uniform(len(sets))
    else:
        w = MergeWeights(tuple(c["weights"]))
    method = c["method"]
    if method == "fusion+align":
        aligned = [sets[0]]
        for other in sets[1:]:
            a, _ = align(sets[0], other)
            aligned.append(a)
        sets = aligned
        method = "fusion"
    if method == "fusion":
        merged = fuse(sets, w)
        merged.strategy = "merged:" + c["method"]
        ckpt.save_adapters(os.path.join(out_dir, "merged.json"), merged)
    elif method == "mixture":
        deltas = mix(sets, w)
        doc = {"format_version": ckpt.FORMAT_VERSION, "kind": "deltas",
               "float_encoding": ckpt.FLOAT_ENCODING,
               "layers": [d.tolist() for d in deltas.deltas]}
        write_json(os.path.join(out_dir, "merged.json"), doc)
    else:
        raise ConfigError(f"merge: unknown method {c['method']!r}")
    write_json(os.path.join(out_dir, "summary.json"), {
        "method": c["method"], "inputs": len(sets),
        "weights": list(w.coefficients),
    })
    write_manifest(out_dir)
    return {}


def cmd_interp(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "a": REQUIRED, "b": REQUIRED,
        "methods": ["fusion"], "grid": None, "dataset": REQUIRED,
        "test_fraction": 0.2, "split_seed": 101, "eval_on": "test",
        "metric": "accuracy", "seed_pair": "",
    }, "interp")
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    a1 = ckpt.load_adapters(c["a"])
    a2 = ckpt.load_adapters(c["b"])
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    eval_set = test_set if c["eval_on"] == "test" else train_set
    grid = tuple(c["grid"]) if c["grid"] else DEFAULT_GRID
    rows = []
    barriers = {}
    for method in c["methods"]:
        curve = interpolation_sweep(base, a1, a2, method, grid, eval_set,
                                    metric=c["metric"])
        barriers[method] = barrier(curve)
        for coeff, acc in zip(curve.grid, curve.accuracy):
            rows.append((coeff, acc, method, c["seed_pair"]))
    write_csv(os.path.join(out_dir, "curve.csv"),
              ["c", "accuracy", "method", "seed_pair"], rows)
    write_json(os.path.join(out_dir, "summary.json"), {"barriers": barriers})
    write_manifest(out_dir)
    return {"barriers": barriers}


def cmd_shapley(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "adapters": REQUIRED, "dataset": REQUIRED,
        "test_fraction": 0.2, "split_seed": 101, "eval_on": "test",
        "method": "both", "q_grid": 21, "samples": 64,
        "metric": "accuracy", "seed": 0,
    }, "shapley")
    if seed_override is not None:
        c["seed"] = seed_override
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    adapters = ckpt.load_adapters(c["adapters"])
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    eval_set = test_set if c["eval_on"] == "test" else train_set
    game = model_game(base, adapters, eval_set, metric=c["metric"])
    rows = []
    summary = {}
    if c["method"] in ("exact", "both"):
        res = exact_shapley(game)
        for l in range(game.player_count):
            rows.append((l + 1, res.phi[l], res.stderr[l], "exact"))
        summary["exact"] = {"phi": res.phi.tolist(),
                            "evaluations": res.evaluations}
    if c["method"] in ("mle", "both"):
        rng = RngStream(c["seed"], STREAM_SHAPLEY)
        res = mle_shapley(game, c["q_grid"], c["samples"], rng)
        for l in range(game.player_count):
            rows.append((l + 1, res.phi[l], res.stderr[l], "mle"))
        summary["mle"] = {"phi": res.phi.tolist(),
                          "stderr": res.stderr.tolist(),
                          "evaluations": res.evaluations}
    if not rows:
        raise ConfigError(f"shapley: unknown method {c['method']!r}")
    write_csv(os.path.join(out_dir, "shapley.csv"),
              ["layer", "phi", "stderr", "method"], rows)
    write_json(os.path.join(out_dir, "summary.json"), summary)
    write_manifest(out_dir)
    return summary


def cmd_prune(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "inputs": REQUIRED, "dataset": REQUIRED,
        "test_fraction": 0.2, "split_seed": 101,
        "structured": ["all", "everyother", "low", "mid", "high"],
        "sparsities": [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9],
    }, "prune")
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    data = resolve_dataset(c["dataset"])
    _, test_set = split_train_test(data, c["test_fraction"], c["split_seed"])
    rows = []
    for item in c["inputs"]:
        item = _require(item, {"path": REQUIRED, "strategy": REQUIRED,
                               "checkpoint": "final"}, "prune.inputs")
        adapters = ckpt.load_adapters(item["path"])
        full = LayerMask.ones(len(adapters))
        for variant in c["structured"]:
            if variant == "attention":
                rows.append((variant, "unsupported", item["strategy"],
                             item["checkpoint"]))
                continue
            pruned = structured_prune(adapters, StructuredSpec(variant))
            acc, _ = evaluate(base, pruned, full, test_set)
            rows.append((variant, acc, item["strategy"], item["checkpoint"]))
        for rho in c["sparsities"]:
            pruned = unstructured_prune(adapters, SparsitySpec(rho))
            acc, _ = evaluate(base, pruned, full, test_set)
            rows.append((rho, acc, item["strategy"], item["checkpoint"]))
    write_csv(os.path.join(out_dir, "prune.csv"),
              ["variant_or_sparsity", "accuracy", "strategy", "checkpoint"],
              rows)
    write_json(os.path.join(out_dir, "summary.json"),
               {"rows": len(rows)})
    write_manifest(out_dir)
    return {}


def cmd_fedsim(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "dataset": REQUIRED, "clients": 5,
        "replicates": [0, 1, 2, 3, 4],
        "schedule_modes": [MODE_FULL, MODE_COPRA],
        "train": {}, "test_fraction": 0.2, "split_seed": 101,
        "shard_seed_base": 1000, "align_before_merge": False,
        "weight_by_shard_size": False,
    }, "fedsim")
    if c["clients"] < 1:
        raise ConfigError("fedsim: clients must be >= 1")
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    rows = []
    summary: dict[str, Any] = {}
    for mode in c["schedule_modes"]:
        origin_means = []
        merged_accs = []
        for rep in c["replicates"]:
            shards = shard(train_set, c["clients"], seed=c["shard_seed_base"] + rep)
            sets = []
            for ci, sh in enumerate(shards):
                tc = resolve_train_config(
                    dict(c["train"], schedule_mode=mode, seed=rep * 100 + ci),
                    None, "fedsim.train")
                if sh.size < tc.batch_size:
                    raise ConfigError(
                        f"fedsim: shard size {sh.size} below batch size "
                        f"{tc.batch_size}"
                    )
                adapters, _, _ = train(base, tc, sh, test_set)
                sets.append(adapters)
            full = LayerMask.ones(len(sets[0]))
            client_accs = [evaluate(base, s, full, test_set)[0] for s in sets]
            for ci, acc in enumerate(client_accs):
                rows.append((rep, mode, f"client{ci}", "origin", acc))
            if c["align_before_merge"]:
                sets = [sets[0]] + [align(sets[0], s)[0] for s in sets[1:]]
            if c["weight_by_shard_size"]:
                sizes = [s.size for s in shards]
                w = MergeWeights(tuple(sz / sum(sizes) for sz in sizes))
            else:
                w = MergeWeights.uniform(len(sets)) if len(sets) > 1 else None
            merged = fuse(sets, w) if w is not None else sets[0]
            macc = evaluate(base, merged, full, test_set)[0]
            rows.append((rep, mode, "server", "merge", macc))
            origin_means.append(float(np.mean(client_accs)))
            merged_accs.append(macc)
        summary[mode] = {
            "origin_mean": float(np.mean(origin_means)),
            "merged_mean": float(np.mean(merged_accs)),
        }
    write_csv(os.path.join(out_dir, "fedsim.csv"),
              ["replicate", "strategy", "member", "kind", "accuracy"], rows)
    write_json(os.path.join(out_dir, "summary.json"), summary)
    write_manifest(out_dir)
    return summary


def cmd_mtlsim(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "task_a": REQUIRED, "task_b": REQUIRED,
        "replicates": [0, 1, 2, 3, 4],
        "schedule_modes": [MODE_FULL, MODE_COPRA],
        "train": {}, "test_fraction": 0.2,
        "split_seed_a": 101, "split_seed_b": 102,
        "merge_c": 0.5, "seed_offset_b": 50,
    }, "mtlsim")
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    data_a = resolve_dataset(c["task_a"], "task_a")
    data_b = resolve_dataset(c["task_b"], "task_b")
    if data_a.features.shape[1] != data_b.features.shape[1]:
        raise ConfigError("mtlsim: tasks must share the input width")
    if data_a.num_classes != data_b.num_classes:
        raise ConfigError("mtlsim: tasks must share the class count")
    tr_a, te_a = split_train_test(data_a, c["test_fraction"], c["split_seed_a"])
    tr_b, te_b = split_train_test(data_b, c["test_fraction"], c["split_seed_b"])
    rows = []
    summary: dict[str, Any] = {}
    for mode in c["schedule_modes"]:
        acc = {"origin_a": [], "origin_b": [], "merged_a": [], "merged_b": []}
        for rep in c["replicates"]:
            tc_a = resolve_train_config(
                dict(c["train"], schedule_mode=mode, seed=rep), None,
                "mtlsim.train")
            tc_b = resolve_train_config(
                dict(c["train"], schedule_mode=mode,
                     seed=rep + c["seed_offset_b"]), None, "mtlsim.train")
            ad_a, _, _ = train(base, tc_a, tr_a, te_a)
            ad_b, _, _ = train(base, tc_b, tr_b, te_b)
            merged = fuse([ad_a, ad_b], MergeWeights.pair(c["merge_c"]))
            full = LayerMask.ones(len(ad_a))
            oa = evaluate(base, ad_a, full, te_a)[0]
            ob = evaluate(base, ad_b, full, te_b)[0]
            ma = evaluate(base, merged, full, te_a)[0]
            mb = evaluate(base, merged, full, te_b)[0]
            rows += [(rep, mode, "task_a_model", "task_a", oa),
                     (rep, mode, "task_b_model", "task_b", ob),
                     (rep, mode, "merged", "task_a", ma),
                     (rep, mode, "merged", "task_b", mb)]
            acc["origin_a"].append(oa)
            acc["origin_b"].append(ob)
            acc["merged_a"].append(ma)
            acc["merged_b"].append(mb)
        summary[mode] = {k: float(np.mean(v)) for k, v in acc.items()}
        summary[mode]["merged_mean"] = float(
            np.mean(acc["merged_a"] + acc["merged_b"])
        )
        summary[mode]["origin_mean"] = float(
            np.mean(acc["origin_a"] + acc["origin_b"])
        )
    write_csv(os.path.join(out_dir, "mtlsim.csv"),
              ["replicate", "strategy", "model", "eval_task", "accuracy"],
              rows)
    write_json(os.path.join(out_dir, "summary.json"), summary)
    write_manifest(out_dir)
    return summary


def cmd_ablate(cfg: dict, out_dir: str, seed_override: int | None) -> dict:
    c = _require(cfg, {
        "base": REQUIRED, "dataset": REQUIRED,
        "learning_rates": REQUIRED, "steps_grid": REQUIRED,
        "schedule_modes": [MODE_FULL, MODE_COPRA],
        "seeds": [0, 1], "train": {},
        "test_fraction": 0.2, "split_seed": 101, "merge_c": 0.5,
    }, "ablate")
    if not c["learning_rates"] or not c["steps_grid"]:
        raise ConfigError("ablate: grids must be nonempty")
    _prepare_out(out_dir, c)
    base = ckpt.load_base(c["base"])
    data = resolve_dataset(c["dataset"])
    train_set, test_set = split_train_test(data, c["test_fraction"],
                                           c["split_seed"])
    rows = []
    vec_rows = []
    for lr in c["learning_rates"]:
        for steps in c["steps_grid"]:
            for mode in c["schedule_modes"]:
                cell_sets = []
                cell_accs = []
                diverged = False
                bad_step = ""
                for seed in c["seeds"]:
                    tc = resolve_train_config(
                        dict(c["train"], learning_rate=lr, total_steps=steps,
                             schedule_mode=mode, seed=seed), None,
                        "ablate.train")
                    try:
                        adapters, _, _ = train(base, tc, train_set, test_set)
                    except TrainingDivergedError as exc:
                        diverged = True
                        bad_step = exc.step
                        break
                    full = LayerMask.ones(len(adapters))
                    cell_sets.append(adapters)
                    cell_accs.append(evaluate(base, adapters, full, test_set)[0])
                    vec = flat_adapter_vector(adapters)
                    vec_rows.append([lr, steps, mode, seed]
                                    + [repr(v) for v in vec.tolist()])
                if diverged:
                    rows.append((lr, steps, mode, "", "", "", True, bad_step))
                    continue
                merged = fuse(cell_sets[:2], MergeWeights.pair(c["merge_c"])) \
                    if len(cell_sets) >= 2 else cell_sets[0]
                full = LayerMask.ones(len(merged))
                macc = evaluate(base, merged, full, test_set)[0]
                mean_acc = float(np.mean(cell_accs))
                rows.append((lr, steps, mode, mean_acc, cell_accs[0],
                             macc, False, ""))
    write_csv(os.path.join(out_dir, "ablate.csv"),
              ["lr", "steps", "strategy", "mean_acc", "first_seed_acc",
               "merged_acc", "diverged", "first_bad_step"], rows)
    with open(os.path.join(out_dir, "adapter_vectors.csv"), "w") as fh:
        fh.write("lr,steps,strategy,seed,values...\n")
        for row in vec_rows:
            fh.write(",".join(str(x) for x in row) + "\n")
    write_json(os.path.join(out_dir, "summary.json"), {
        "cells": len(rows),
        "diverged_cells": sum(1 for r in rows if r[6]),
    })
    write_manifest(out_dir)
    return {}


_COMMANDS = {
    "pretrain": cmd_pretrain,
    "train": cmd_train,
    "merge": cmd_merge,
    "interp": cmd_interp,
    "shapley": cmd_shapley,
    "prune": cmd_prune,
    "fedsim": cmd_fedsim,
    "mtlsim": cmd_mtlsim,
    "ablate": cmd_ablate,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="copra-lab",
        description="Layer-drop LoRA training and evaluation experiments",
    )
    parser.add_argument("subcommand", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="JSON config path")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed-override", type=int, default=None)
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for compatibility; execution is serial")
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        _COMMANDS[args.subcommand](cfg, args.out, args.seed_override)
    except (ConfigError, ckpt.CheckpointError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
