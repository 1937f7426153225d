"""Linear-mode-connectivity experiment: train seed pairs under the
progressive-drop and standard schedules, sweep the interpolation coefficient
for fusion / mixture / fusion+align, and summarize barriers per pair."""

import json
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
    summary = {}
    for mode in ("copra", "full"):
        for s1, s2 in SEED_PAIRS:
            a = train_model(out, mode, s1, base, LMC_LORA_SCALE)
            b = train_model(out, mode, s2, base, LMC_LORA_SCALE)
            methods = ["fusion", "mixture"]
            if mode == "full":
                methods.append("fusion+align")
            res = cli.cmd_interp(
                {"base": base, "a": a, "b": b, "methods": methods,
                 "dataset": {"kind": "task_a"},
                 "split_seed": TASK_SPLIT_SEED,
                 "seed_pair": f"{s1}-{s2}"},
                os.path.join(out, f"interp_{mode}_{s1}_{s2}"), None,
            )
            summary[f"{mode}:{s1}-{s2}"] = res["barriers"]
            print(mode, (s1, s2), res["barriers"], flush=True)
    with open(os.path.join(out, "lmc_barriers.json"), "w") as fh:
        json.dump(summary, fh, indent=1, sort_keys=True)


if __name__ == "__main__":
    main()
