"""Planners: classical baselines and the learned-modification architecture.

Pure pursuit tracks a reference line with a fixed lookahead; follow-the-gap
reacts to the lidar scan alone; the modification planner adds a policy's
steering correction to the pure-pursuit command (delta_ref = delta_pf +
delta_nn) while leaving the speed reference untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import geometry
from .raceline import RaceLine, project_progress
from .simenv import ActionCommand, Decision, VehicleParams, VehicleState


def pure_pursuit(
    state: VehicleState, line: RaceLine, lookahead: float, params: VehicleParams
) -> ActionCommand:
    """Steer toward the point one lookahead ahead of the projection.

    ``delta_ref = atan(2 L sin(alpha) / lookahead)`` with ``alpha`` the
    target bearing in the vehicle frame; the speed reference is the target
    segment's stored speed.
    """
    if lookahead <= 0:
        raise ValueError("lookahead must be positive")
    if len(line.waypoints) == 0:
        raise ValueError("reference line is empty")
    s_here = project_progress(state.position, line)
    s_target = (s_here + lookahead) % line.s_total
    target = line.point_at(s_target)
    idx = line.segment_at(s_target)
    alpha = geometry.wrap_angle(
        math.atan2(target[1] - state.y, target[0] - state.x) - state.psi
    )
    delta = math.atan(2.0 * params.wheelbase * math.sin(alpha) / lookahead)
    delta = max(-params.max_steer, min(params.max_steer, delta))
    return ActionCommand(v_ref=float(line.speeds[idx]), delta_ref=delta)


@dataclass(frozen=True)
class FgmConfig:
    """Follow-the-gap tuning knobs."""

    bubble_radius: float = 0.4  # metres masked around the nearest return
    floor_speed: float = 1.0  # speed at full steering lock (m/s)
    fov: float = math.pi  # must match the lidar the scan came from
    top_speed: float | None = None  # None = vehicle max speed
    target: str = "center"  # aim point within the chosen run: center | farthest

    def __post_init__(self):
        if self.target not in ("center", "farthest"):
            raise ValueError(f"unknown gap target {self.target!r}")


def follow_the_gap(
    scan: np.ndarray, params: VehicleParams, config: FgmConfig | None = None
) -> ActionCommand:
    """Mask a bubble around the nearest return, steer into the widest gap.

    Speed falls linearly from top speed to the floor as commanded steering
    approaches full lock. All beams masked -> emergency stop command.
    """
    config = config or FgmConfig()
    scan = np.asarray(scan, dtype=float)
    n = len(scan)
    if n < 2:
        raise ValueError("need at least 2 beams")
    angles = -config.fov / 2.0 + np.arange(n) * config.fov / (n - 1)

    nearest = int(np.argmin(scan))
    half_angle = math.atan2(config.bubble_radius, float(scan[nearest]))
    masked = scan.copy()
    masked[np.abs(angles - angles[nearest]) <= half_angle + 1e-12] = 0.0

    free = masked > 0.0
    if not free.any():
        return ActionCommand(v_ref=0.0, delta_ref=0.0)

    # Contiguous runs of free beams: (width, |center angle|, -center angle)
    # picks widest, then most-ahead, then leftmost.
    runs = []
    start = None
    for k in range(n + 1):
        if k < n and free[k]:
            if start is None:
                start = k
        elif start is not None:
            runs.append((start, k - 1))
            start = None
    best = None
    for lo, hi in runs:
        center = (lo + hi) // 2
        key = (-(hi - lo + 1), abs(angles[center]), -angles[center])
        if best is None or key < best[0]:
            best = (key, lo, hi, center)
    _, lo, hi, target = best
    if config.target == "farthest":
        run = masked[lo : hi + 1]
        deepest = run == run.max()
        cand = np.arange(lo, hi + 1)[deepest]
        target = int(min(cand, key=lambda k: (abs(angles[k]), -angles[k])))

    delta = max(-params.max_steer, min(params.max_steer, float(angles[target])))
    top = config.top_speed if config.top_speed is not None else params.max_speed
    v = top - (top - config.floor_speed) * abs(delta) / params.max_steer
    return ActionCommand(v_ref=v, delta_ref=delta)


def modification_plan(
    pf: ActionCommand, a_nn: float, params: VehicleParams
) -> ActionCommand:
    """Add the policy's steering correction: delta_ref = delta_pf + a*max_steer."""
    delta = pf.delta_ref + a_nn * params.max_steer
    delta = max(-params.max_steer, min(params.max_steer, delta))
    return ActionCommand(v_ref=pf.v_ref, delta_ref=delta)


def build_observation(
    state: VehicleState,
    pf: ActionCommand,
    scan: np.ndarray,
    params: VehicleParams,
    max_range: float = 4.0,
) -> np.ndarray:
    """14 scalars in [-1, 1]: v, delta, v_pf, delta_pf, then the 10 ranges."""
    obs = np.empty(4 + len(scan))
    obs[0] = state.v / params.max_speed
    obs[1] = state.delta / params.max_steer
    obs[2] = pf.v_ref / params.max_speed
    obs[3] = pf.delta_ref / params.max_steer
    obs[4:] = np.asarray(scan, dtype=float) / max_range
    return obs


# ---------------------------------------------------------------------------
# Planner objects (the episode-loop interface)


@dataclass
class PurePursuitPlanner:
    line: RaceLine
    params: VehicleParams
    lookahead: float = 1.0
    max_range: float = 4.0

    def plan(self, state: VehicleState, scan: np.ndarray) -> Decision:
        cmd = pure_pursuit(state, self.line, self.lookahead, self.params)
        obs = build_observation(state, cmd, scan, self.params, self.max_range)
        return Decision(cmd=cmd, obs=obs, a_nn=0.0)


@dataclass
class FgmPlanner:
    """Episode adapter for follow-the-gap.

    ``crop_beams`` drops that many beams from each end of the scan before
    gap finding (the config's fov is narrowed to match), so the planner
    only steers toward directions it can actually drive; side returns
    describe the wall beside the car, and aiming at them invites U-turns.
    The full scan still feeds the observation.
    """

    params: VehicleParams
    config: FgmConfig = field(default_factory=FgmConfig)
    max_range: float = 4.0
    crop_beams: int = 0

    def plan(self, state: VehicleState, scan: np.ndarray) -> Decision:
        cmd_cfg = self.config
        gap_scan = np.asarray(scan, dtype=float)
        if self.crop_beams > 0:
            n = len(gap_scan)
            spacing = cmd_cfg.fov / (n - 1)
            gap_scan = gap_scan[self.crop_beams : n - self.crop_beams]
            cmd_cfg = replace(
                cmd_cfg, fov=cmd_cfg.fov - 2 * self.crop_beams * spacing
            )
        cmd = follow_the_gap(gap_scan, self.params, cmd_cfg)
        obs = build_observation(state, cmd, scan, self.params, self.max_range)
        return Decision(cmd=cmd, obs=obs, a_nn=0.0)


@dataclass
class ModificationPlanner:
    """Pure pursuit plus a learned steering correction.

    ``exploration_std > 0`` adds clipped Gaussian noise to the policy output;
    ``uniform_random`` replaces the policy with uniform actions (warmup).
    """

    actor: object  # callable obs -> scalar in [-1, 1]
    line: RaceLine
    params: VehicleParams
    lookahead: float = 1.0
    max_range: float = 4.0
    exploration_std: float = 0.0
    uniform_random: bool = False
    rng: np.random.Generator | None = None

    def plan(self, state: VehicleState, scan: np.ndarray) -> Decision:
        pf = pure_pursuit(state, self.line, self.lookahead, self.params)
        obs = build_observation(state, pf, scan, self.params, self.max_range)
        if self.uniform_random:
            a = float(self.rng.uniform(-1.0, 1.0))
        else:
            a = float(self.actor(obs))
            if self.exploration_std > 0.0:
                a += float(self.rng.normal(0.0, self.exploration_std))
        a = max(-1.0, min(1.0, a))
        cmd = modification_plan(pf, a, self.params)
        return Decision(cmd=cmd, obs=obs, a_nn=a)
