"""Shared plumbing for the experiment scripts: the standard base network and
the canned experiment constants used across all runs."""

import argparse
import os

from copra_lab import cli
from copra_lab.datasets import BASE_DIMS

SOURCE_SPLIT_SEED = 100
TASK_SPLIT_SEED = 101
TRAIN_STEPS = 2000
LMC_LORA_SCALE = 16.0
SIM_LORA_SCALE = 32.0
SEED_PAIRS = ((0, 1), (4, 5), (6, 7), (8, 9), (10, 11))


def out_dir_arg(description: str) -> str:
    parser = argparse.ArgumentParser(description=description)
    parser.add_argument("--out", default="results", help="output root directory")
    return parser.parse_args().out


def ensure_base(out_root: str) -> str:
    """Pretrain (or reuse) the standard frozen base; returns its checkpoint."""
    pre_dir = os.path.join(out_root, "pretrain")
    base_path = os.path.join(pre_dir, "base.json")
    if not os.path.exists(base_path):
        cli.cmd_pretrain(
            {"dims": BASE_DIMS, "dataset": {"kind": "base_task"},
             "steps": 2000, "lr": 1e-3, "seed": 0,
             "split_seed": SOURCE_SPLIT_SEED},
            pre_dir, None,
        )
    return base_path


def train_model(out_root: str, mode: str, seed: int, base_path: str,
                lora_scale: float) -> str:
    """Train one adapter set on TaskA; returns the final checkpoint path."""
    run_dir = os.path.join(out_root, f"train_{mode}_seed{seed}")
    final = os.path.join(run_dir, "adapters_final.json")
    if not os.path.exists(final):
        cli.cmd_train(
            {"base": base_path, "dataset": {"kind": "task_a"},
             "split_seed": TASK_SPLIT_SEED,
             "train": {"total_steps": TRAIN_STEPS, "schedule_mode": mode,
                       "seed": seed, "lora_scale": lora_scale,
                       "eval_every": 200}},
            run_dir, None,
        )
    return final
