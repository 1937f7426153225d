"""Simulated multi-task merging: one model per task (TaskA spirals, TaskB
rings) fused at c=0.5, both schedules, five replicates."""

import json
import os

from copra_lab import cli
from common import SIM_LORA_SCALE, TRAIN_STEPS, ensure_base, out_dir_arg


def main() -> None:
    out = out_dir_arg(__doc__)
    base = ensure_base(out)
    res = cli.cmd_mtlsim(
        {"base": base, "task_a": {"kind": "task_a"},
         "task_b": {"kind": "task_b"},
         "train": {"total_steps": TRAIN_STEPS, "lora_scale": SIM_LORA_SCALE,
                   "eval_every": 0}},
        os.path.join(out, "mtlsim"), None,
    )
    print(json.dumps(res, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
