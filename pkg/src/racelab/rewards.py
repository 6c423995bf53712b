"""Terminal reward framework and the racing-reward variants.

Episodes score -1 on crash and +1 on lap completion; between terminals one of
four shaped signals applies: ``none`` (terminal only), ``distance`` (progress
along a reference line), ``cth`` (cross-track and heading), or ``steer``
(steering magnitude penalty). Every shaped term is scaled by vehicle and
track constants so the numbers are dimensionless and transfer across setups.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .raceline import LineRelation, RaceLine, progress_delta

VARIANTS = ("none", "distance", "cth", "steer")
REFERENCES = ("center", "mincurve")


class Terminal(enum.Enum):
    """How an episode ended. The reward framework scores the first two;
    TIMEOUT truncates an episode without a terminal reward."""

    CRASH = "crash"
    LAP_COMPLETE = "lap_complete"
    TIMEOUT = "timeout"


@dataclass(frozen=True)
class RewardConfig:
    """Which racing reward applies, its weights, and its reference line."""

    variant: str = "none"
    beta_distance: float = 0.5
    beta_heading: float = 0.04
    beta_cross_track: float = 0.004
    beta_steering: float = 0.01
    reference: str = "center"

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.reference not in REFERENCES:
            raise ValueError(
                f"reference must be one of {REFERENCES}, got {self.reference!r}"
            )
        betas = (
            self.beta_distance,
            self.beta_heading,
            self.beta_cross_track,
            self.beta_steering,
        )
        if any(b < 0 for b in betas):
            raise ValueError("reward weights must be >= 0")


@dataclass(frozen=True)
class StepContext:
    """Everything one reward evaluation needs about one planner step.

    ``width_scale`` is the full local track width at the vehicle's nearest
    centerline point; ``decision_period`` is the wall-clock span of one
    planner step (used only for bound checks).
    """

    prev_relation: LineRelation
    next_relation: LineRelation
    speed: float
    delta_ref: float
    terminal: Terminal | None
    line: RaceLine
    max_speed: float
    max_steer: float
    width_scale: float
    decision_period: float = 0.1


def terminal_reward(terminal: Terminal) -> float:
    """Eq-1 terminal cases: crash -1, lap complete +1."""
    if terminal is Terminal.CRASH:
        return -1.0
    if terminal is Terminal.LAP_COMPLETE:
        return 1.0
    raise ValueError(f"no terminal reward for {terminal!r}")


def distance_reward(ctx: StepContext, cfg: RewardConfig) -> float:
    """Progress made this step as a fraction of the lap, times beta_distance.

    The progress difference wraps into (-s_total/2, s_total/2] so the step
    across the start line counts as its small forward value.
    """
    s_total = ctx.line.s_total
    r = (
        cfg.beta_distance
        * progress_delta(ctx.prev_relation.s, ctx.next_relation.s, s_total)
        / s_total
    )
    # Projection can locally outpace the vehicle near curvature; factor 2
    # covers the worst corridor geometry.
    bound = 2.0 * cfg.beta_distance * ctx.decision_period * ctx.max_speed / s_total
    assert abs(r) <= bound + 1e-12, f"distance reward {r} exceeds bound {bound}"
    return r


def cth_reward(ctx: StepContext, cfg: RewardConfig) -> float:
    """Velocity along the line minus the scaled cross-track error.

    ``beta_heading * (V/V_max) * cos(theta) - beta_cross_track * d_c / width``.
    """
    rel = ctx.next_relation
    r = cfg.beta_heading * (ctx.speed / ctx.max_speed) * math.cos(
        rel.theta
    ) - cfg.beta_cross_track * (rel.d_c / ctx.width_scale)
    bound = cfg.beta_heading + cfg.beta_cross_track
    assert abs(r) <= bound + 1e-12 or rel.d_c > ctx.width_scale, (
        f"cth reward {r} exceeds bound {bound}"
    )
    return r


def steering_reward(ctx: StepContext, cfg: RewardConfig) -> float:
    """Penalty proportional to the commanded steering magnitude."""
    r = -cfg.beta_steering * abs(ctx.delta_ref) / ctx.max_steer
    assert -cfg.beta_steering - 1e-12 <= r <= 0.0
    return r


def compute_reward(ctx: StepContext, cfg: RewardConfig) -> float:
    """Terminal cases dominate; otherwise dispatch on the configured variant."""
    if ctx.terminal is not None:
        return terminal_reward(ctx.terminal)
    if cfg.variant == "none":
        return 0.0
    if cfg.variant == "distance":
        return distance_reward(ctx, cfg)
    if cfg.variant == "cth":
        return cth_reward(ctx, cfg)
    if cfg.variant == "steer":
        return steering_reward(ctx, cfg)
    raise ValueError(f"unknown reward variant {cfg.variant!r}")
