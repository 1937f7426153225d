"""Pruning experiment: structured variants and an unstructured sparsity sweep
over the trained final and early checkpoints of both schedules."""

import os

from copra_lab import cli
from common import (
    LMC_LORA_SCALE,
    SEED_PAIRS,
    TASK_SPLIT_SEED,
    ensure_base,
    out_dir_arg,
    train_model,
)


def main() -> None:
    out = out_dir_arg(__doc__)
    base = ensure_base(out)
    inputs = []
    for mode in ("copra", "full"):
        for s1, s2 in SEED_PAIRS:
            for seed in (s1, s2):
                final = train_model(out, mode, seed, base, LMC_LORA_SCALE)
                inputs.append({"path": final, "strategy": mode,
                               "checkpoint": "final"})
                early = final.replace("adapters_final", "adapters_early")
                inputs.append({"path": early, "strategy": mode,
                               "checkpoint": "early"})
    cli.cmd_prune(
        {"base": base, "dataset": {"kind": "task_a"},
         "split_seed": TASK_SPLIT_SEED, "inputs": inputs},
        os.path.join(out, "prune"), None,
    )
    print("wrote", os.path.join(out, "prune", "prune.csv"))


if __name__ == "__main__":
    main()
