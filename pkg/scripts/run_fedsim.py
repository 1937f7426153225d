"""Simulated federated learning: five clients on disjoint TaskA shards,
server-side fusion, both schedules, five replicates."""

import json
import os

from copra_lab import cli
from common import SIM_LORA_SCALE, TRAIN_STEPS, ensure_base, out_dir_arg


def main() -> None:
    out = out_dir_arg(__doc__)
    base = ensure_base(out)
    res = cli.cmd_fedsim(
        {"base": base, "dataset": {"kind": "task_a"},
         "train": {"total_steps": TRAIN_STEPS, "lora_scale": SIM_LORA_SCALE,
                   "eval_every": 0}},
        os.path.join(out, "fedsim"), None,
    )
    print(json.dumps(res, indent=1, sort_keys=True))


if __name__ == "__main__":
    main()
