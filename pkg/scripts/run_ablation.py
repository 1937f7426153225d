"""Learning-rate x iteration ablation grid for both schedules, recording
per-cell accuracy, merged (c=0.5) accuracy, divergence flags, and flattened
adapter parameter vectors."""

import os

from copra_lab import cli
from common import LMC_LORA_SCALE, ensure_base, out_dir_arg


def main() -> None:
    out = out_dir_arg(__doc__)
    base = ensure_base(out)
    cli.cmd_ablate(
        {"base": base, "dataset": {"kind": "task_a"},
         "learning_rates": [1e-4, 5e-4, 1e-3, 5e-3],
         "steps_grid": [500, 1000, 2000],
         "train": {"lora_scale": LMC_LORA_SCALE, "eval_every": 0}},
        os.path.join(out, "ablate"), None,
    )
    print("wrote", os.path.join(out, "ablate", "ablate.csv"))


if __name__ == "__main__":
    main()
