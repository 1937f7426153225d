"""Progressive drop-probability schedule and Bernoulli mask sampling.

The progressive mode ramps the per-layer activation probability linearly as
min(4t / 3T, 1): zero at t=0, reaching 1 at t = ceil(3T/4) and staying there
for the final quarter, where training coincides with standard low-rank
fine-tuning.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .network import LayerMask
from .rng import RngStream

MODE_COPRA = "copra"
MODE_FULL = "full"
MODE_FIXED = "fixed_p"


@dataclass(frozen=True)
class DropSchedule:
    total_steps: int
    mode: str = MODE_COPRA
    fixed_p: float | None = None

    def __post_init__(self) -> None:
        if self.mode not in (MODE_COPRA, MODE_FULL, MODE_FIXED):
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.mode == MODE_COPRA and self.total_steps < 4:
            raise ValueError("progressive mode needs total_steps >= 4")
        if self.total_steps < 1:
            raise ValueError("total_steps must be >= 1")
        if self.mode == MODE_FIXED:
            if self.fixed_p is None or not 0.0 <= self.fixed_p <= 1.0:
                raise ValueError("fixed_p mode requires p in [0, 1]")

    @property
    def stage_two_start(self) -> int:
        """First step at which p == 1 in progressive mode: ceil(3T/4)."""
        return math.ceil(3 * self.total_steps / 4)


def prob_at(schedule: DropSchedule, t: int) -> float:
    if not 0 <= t < schedule.total_steps:
        raise ValueError(
            f"step {t} outside [0, {schedule.total_steps})"
        )
    if schedule.mode == MODE_FULL:
        return 1.0
    if schedule.mode == MODE_FIXED:
        return float(schedule.fixed_p)
    return min(4.0 * t / (3.0 * schedule.total_steps), 1.0)


def sample_mask(
    schedule: DropSchedule, t: int, num_layers: int, rng: RngStream
) -> LayerMask:
    """One independent Bernoulli(p) draw per layer; consumes exactly
    num_layers counter increments."""
    p = prob_at(schedule, t)
    return LayerMask(rng.bernoulli(p, num_layers))
