"""Layerwise Shapley experiment: exact and sampled values for one model per
schedule, emitted as plot-ready per-layer CSVs."""

import os

from copra_lab import cli
from common import (
    LMC_LORA_SCALE,
    TASK_SPLIT_SEED,
    ensure_base,
    out_dir_arg,
    train_model,
)


def main() -> None:
    out = out_dir_arg(__doc__)
    base = ensure_base(out)
    for mode in ("copra", "full"):
        adapters = train_model(out, mode, 0, base, LMC_LORA_SCALE)
        res = cli.cmd_shapley(
            {"base": base, "adapters": adapters,
             "dataset": {"kind": "task_a"}, "split_seed": TASK_SPLIT_SEED,
             "method": "both", "q_grid": 21, "samples": 64},
            os.path.join(out, f"shapley_{mode}"), None,
        )
        print(mode, "phi:", [round(v, 4) for v in res["exact"]["phi"]])


if __name__ == "__main__":
    main()
