"""Deterministic episodic racing simulator.

Kinematic bicycle with first-order proportional actuators, a 10-beam planar
range sensor, axis-aligned square obstacles, and crash / lap-complete /
timeout episode bookkeeping. Physics advances at ``dt`` (default 0.01 s); the
planner is queried every ``planner_period`` physics steps (default 10, i.e.
10 Hz decisions).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Protocol

import numpy as np

from . import geometry
from .centerline import Centerline
from .errors import SpawnError
from .grid import OccupancyGrid
from .raceline import RaceLine, line_relation, progress_delta
from .rewards import RewardConfig, StepContext, Terminal, compute_reward
from .track import Track


@dataclass(frozen=True)
class VehicleParams:
    """Physical vehicle constants; proportional gains are per second."""

    wheelbase: float = 0.33
    max_steer: float = 0.4
    max_speed: float = 7.0
    max_steer_rate: float = 3.2
    max_accel: float = 7.0
    k_v: float = 10.0
    k_delta: float = 10.0

    def __post_init__(self):
        vals = (
            self.wheelbase,
            self.max_steer,
            self.max_speed,
            self.max_steer_rate,
            self.max_accel,
            self.k_v,
            self.k_delta,
        )
        if any(v <= 0 for v in vals):
            raise ValueError("all vehicle parameters must be positive")
        if self.max_steer >= math.pi / 2:
            raise ValueError("max_steer must be below pi/2")


@dataclass(frozen=True)
class VehicleState:
    x: float
    y: float
    psi: float
    v: float
    delta: float
    t: float = 0.0

    @property
    def position(self) -> np.ndarray:
        return np.array([self.x, self.y])


@dataclass(frozen=True)
class ActionCommand:
    """Velocity and steering references handed to the actuators."""

    v_ref: float
    delta_ref: float


@dataclass(frozen=True)
class Obstacle:
    """Axis-aligned square obstacle."""

    center: tuple[float, float]
    side: float = 0.6

    def __post_init__(self):
        if self.side <= 0:
            raise ValueError("obstacle side must be positive")

    @property
    def bounds(self) -> tuple[float, float, float, float]:
        h = self.side / 2.0
        cx, cy = self.center
        return cx - h, cy - h, cx + h, cy + h


@dataclass(frozen=True)
class EpisodeOutcome:
    terminal: Terminal
    lap_time: float
    trajectory: tuple
    step_count: int  # planner decisions taken
    physics_steps: int
    obstacles: tuple = ()

    def __post_init__(self):
        if self.terminal is Terminal.LAP_COMPLETE and self.lap_time <= 0:
            raise ValueError("completed lap must have positive lap time")
        if not self.trajectory:
            raise ValueError("trajectory must be nonempty")


@dataclass(frozen=True)
class Transition:
    """Replay unit produced once per planner decision."""

    obs: np.ndarray
    action: float
    reward: float
    next_obs: np.ndarray
    done: float


@dataclass(frozen=True)
class Decision:
    """What a planner returns for one decision point."""

    cmd: ActionCommand
    obs: np.ndarray
    a_nn: float = 0.0


class Planner(Protocol):
    def plan(self, state: VehicleState, scan: np.ndarray) -> Decision: ...


def _clamp(x: float, lo: float, hi: float) -> float:
    return lo if x < lo else hi if x > hi else x


def step_dynamics(
    state: VehicleState, cmd: ActionCommand, params: VehicleParams, dt: float
) -> VehicleState:
    """One physics step: proportional actuators, then kinematic bicycle.

    Command references are clamped to the actuator envelopes, the actuators
    move speed and steering toward them under rate/acceleration limits, and
    the pose integrates with the updated speed and steering.
    """
    v_ref = _clamp(cmd.v_ref, 0.0, params.max_speed)
    d_ref = _clamp(cmd.delta_ref, -params.max_steer, params.max_steer)

    accel = _clamp(params.k_v * (v_ref - state.v), -params.max_accel, params.max_accel)
    v = _clamp(state.v + accel * dt, 0.0, params.max_speed)
    steer_rate = _clamp(
        params.k_delta * (d_ref - state.delta),
        -params.max_steer_rate,
        params.max_steer_rate,
    )
    delta = _clamp(state.delta + steer_rate * dt, -params.max_steer, params.max_steer)

    x = state.x + v * math.cos(state.psi) * dt
    y = state.y + v * math.sin(state.psi) * dt
    psi = geometry.wrap_angle(state.psi + v * math.tan(delta) / params.wheelbase * dt)
    return VehicleState(x=x, y=y, psi=psi, v=v, delta=delta, t=state.t + dt)


# ---------------------------------------------------------------------------
# Sensing and collision


def _ray_box(ox, oy, dx, dy, bounds) -> float:
    """Entry distance of a ray into an AABB, or inf if it misses.

    Origin inside the box yields 0.
    """
    x0, y0, x1, y1 = bounds
    tmin, tmax = -math.inf, math.inf
    for o, d, lo, hi in ((ox, dx, x0, x1), (oy, dy, y0, y1)):
        if abs(d) < 1e-15:
            if o < lo or o > hi:
                return math.inf
        else:
            ta = (lo - o) / d
            tb = (hi - o) / d
            if ta > tb:
                ta, tb = tb, ta
            tmin = max(tmin, ta)
            tmax = min(tmax, tb)
    if tmax < max(tmin, 0.0):
        return math.inf
    return max(tmin, 0.0)


def scan_lidar(
    state: VehicleState,
    grid: OccupancyGrid,
    obstacles: list[Obstacle],
    n_beams: int = 10,
    fov: float = math.pi,
    max_range: float = 4.0,
) -> np.ndarray:
    """Planar range scan: ``n_beams`` beams spanning ``fov`` around heading.

    Beam ``k`` points at ``psi - fov/2 + k * fov / (n_beams - 1)``. Each
    return is the distance to the first occupied grid cell or obstacle
    boundary, clipped to ``max_range``.
    """
    if n_beams < 2:
        raise ValueError("need at least 2 beams")
    if max_range <= 0:
        raise ValueError("max_range must be positive")
    out = np.empty(n_beams)
    for k in range(n_beams):
        ang = state.psi - fov / 2.0 + k * fov / (n_beams - 1)
        r = grid.raycast(state.x, state.y, ang, max_range)
        if obstacles:
            dx, dy = math.cos(ang), math.sin(ang)
            for ob in obstacles:
                r = min(r, _ray_box(state.x, state.y, dx, dy, ob.bounds))
        out[k] = min(r, max_range)
    return out


def check_collision(
    state: VehicleState,
    grid: OccupancyGrid,
    obstacles: list[Obstacle],
    radius: float = 0.15,
) -> bool:
    """True iff the disc footprint hits an occupied cell or an obstacle."""
    res = grid.resolution
    r0, c0 = grid.world_to_cell(state.x - radius, state.y - radius)
    r1, c1 = grid.world_to_cell(state.x + radius, state.y + radius)
    r2 = radius * radius
    for row in range(r0, r1 + 1):
        for col in range(c0, c1 + 1):
            if not grid.occupied_at_cell(row, col):
                continue
            # distance from footprint center to this cell's rectangle
            x0 = grid.origin[0] + col * res
            y0 = grid.origin[1] + row * res
            dx = state.x - _clamp(state.x, x0, x0 + res)
            dy = state.y - _clamp(state.y, y0, y0 + res)
            if dx * dx + dy * dy <= r2:
                return True
    for ob in obstacles:
        x0, y0, x1, y1 = ob.bounds
        dx = state.x - _clamp(state.x, x0, x1)
        dy = state.y - _clamp(state.y, y0, y1)
        if dx * dx + dy * dy <= r2:
            return True
    return False


# ---------------------------------------------------------------------------
# Obstacle spawning


@dataclass(frozen=True)
class SpawnRules:
    side: float = 0.6
    counts: tuple[int, ...] = (3, 4)
    min_separation: float = 2.0  # pairwise arc-length separation (m)
    start_clearance: float = 1.0  # keep-out around the start line (m)
    min_gap: float = 0.5  # free lateral gap required on one side (m)
    max_attempts: int = 1000


def _arc_distance(a: float, b: float, total: float) -> float:
    d = abs(a - b) % total
    return min(d, total - d)


def spawn_obstacles(
    rng: np.random.Generator, center: Centerline, rules: SpawnRules | None = None
) -> list[Obstacle]:
    """Randomly place 3 or 4 square obstacles along the track.

    Each obstacle sits at a random arc position, displaced laterally by a
    random amount that keeps the square inside the corridor, at least
    ``min_gap`` of free width on one side, ``min_separation`` of arc length
    from every other obstacle, and ``start_clearance`` from the start line.
    """
    rules = rules or SpawnRules()
    count = int(rules.counts[rng.integers(len(rules.counts))])
    total = center.length
    xs = center.points[:, 0]
    ys = center.points[:, 1]
    placed_s: list[float] = []
    out: list[Obstacle] = []
    for _ in range(count):
        for _attempt in range(rules.max_attempts):
            s = float(rng.uniform(0.0, total))
            if _arc_distance(s, 0.0, total) < rules.start_clearance:
                continue
            if any(_arc_distance(s, q, total) < rules.min_separation for q in placed_s):
                continue
            k = min(
                int(np.searchsorted(center.s, s, side="right")) - 1,
                len(center.points) - 2,
            )
            px = float(np.interp(s, center.s, xs))
            py = float(np.interp(s, center.s, ys))
            nx, ny = center.normals[k]
            half = (abs(nx) + abs(ny)) * rules.side / 2.0
            w_l = float(center.w_left[k])
            w_r = float(center.w_right[k])
            lo, hi = -(w_r - half), w_l - half
            if lo > hi:
                continue
            d = float(rng.uniform(lo, hi))
            gap_left = w_l - d - half
            gap_right = w_r + d - half
            if max(gap_left, gap_right) < rules.min_gap:
                continue
            out.append(
                Obstacle(center=(px + d * nx, py + d * ny), side=rules.side)
            )
            placed_s.append(s)
            break
        else:
            raise SpawnError(
                f"could not place obstacle {len(out) + 1}/{count} "
                f"after {rules.max_attempts} attempts"
            )
    return out


# ---------------------------------------------------------------------------
# Episode runner


@dataclass(frozen=True)
class Environment:
    """Everything an episode needs besides the planner and the reward."""

    track: Track
    params: VehicleParams = field(default_factory=VehicleParams)
    dt: float = 0.01
    planner_period: int = 10
    timeout: float = 60.0
    n_beams: int = 10
    fov: float = math.pi
    max_range: float = 4.0
    footprint_radius: float = 0.15
    obstacles_enabled: bool = False
    spawn: SpawnRules = field(default_factory=SpawnRules)
    start_s: float = 0.0

    def start_state(self) -> VehicleState:
        center = self.track.center
        s = self.start_s % center.length
        px = float(np.interp(s, center.s, center.points[:, 0]))
        py = float(np.interp(s, center.s, center.points[:, 1]))
        k = min(int(np.searchsorted(center.s, s, side="right")) - 1, len(center.points) - 2)
        tx, ty = center.points[k + 1] - center.points[k]
        return VehicleState(x=px, y=py, psi=math.atan2(ty, tx), v=0.0, delta=0.0, t=0.0)

    def start_line(self) -> tuple[np.ndarray, np.ndarray]:
        """Finish-line segment: the track cross-section at the start pose."""
        center = self.track.center
        s = self.start_s % center.length
        k = min(int(np.searchsorted(center.s, s, side="right")) - 1, len(center.points) - 2)
        p = np.array(
            [
                np.interp(s, center.s, center.points[:, 0]),
                np.interp(s, center.s, center.points[:, 1]),
            ]
        )
        n = center.normals[k]
        pad = self.footprint_radius + 0.05
        return p + n * (center.w_left[k] + pad), p - n * (center.w_right[k] + pad)


def run_episode(
    planner: Planner,
    reward_cfg: RewardConfig,
    env: Environment,
    rng: np.random.Generator,
) -> tuple[EpisodeOutcome, list[Transition]]:
    """Run one lap attempt and log a transition per planner decision.

    The loop queries the planner every ``planner_period`` physics steps,
    advances physics at ``dt`` between decisions, checks collision and
    lap completion after every physics step, and scores each decision with
    the configured reward. ``done`` is set on crash and lap completion;
    a timeout truncates without setting it.
    """
    params = env.params
    state = env.start_state()
    obstacles = (
        spawn_obstacles(rng, env.track.center, env.spawn) if env.obstacles_enabled else []
    )
    reward_line: RaceLine = env.track.line_for(reward_cfg.reference)
    center_line: RaceLine = env.track.line_for("center")
    line_a, line_b = env.start_line()

    relation = line_relation(state.position, state.psi, reward_line)
    progress_s = line_relation(state.position, state.psi, center_line).s
    cum_progress = 0.0
    s_total_center = center_line.s_total

    trajectory = [state]
    transitions: list[Transition] = []
    pending: tuple[np.ndarray, float] | None = None
    pending_scan: np.ndarray | None = None
    terminal: Terminal | None = None
    physics_steps = 0
    decisions = 0
    max_physics = int(round(env.timeout / env.dt))

    while terminal is None and physics_steps < max_physics:
        scan = scan_lidar(
            state, env.track.grid, obstacles, env.n_beams, env.fov, env.max_range
        )
        decision = planner.plan(state, scan)
        if pending is not None:
            obs_prev, a_prev, r_prev = pending
            transitions.append(
                Transition(obs_prev, a_prev, r_prev, decision.obs, done=0.0)
            )
        decisions += 1

        for _ in range(env.planner_period):
            prev_pos = state.position
            state = step_dynamics(state, decision.cmd, params, env.dt)
            physics_steps += 1
            s_now = line_relation(state.position, state.psi, center_line).s
            cum_progress += progress_delta(progress_s, s_now, s_total_center)
            progress_s = s_now
            if check_collision(
                state, env.track.grid, obstacles, env.footprint_radius
            ):
                terminal = Terminal.CRASH
                break
            if cum_progress >= 0.5 * s_total_center and geometry.segments_intersect(
                prev_pos, state.position, line_a, line_b
            ):
                terminal = Terminal.LAP_COMPLETE
                break
            if physics_steps >= max_physics:
                terminal = Terminal.TIMEOUT
                break

        next_relation = line_relation(state.position, state.psi, reward_line)
        ctx = StepContext(
            prev_relation=relation,
            next_relation=next_relation,
            speed=state.v,
            delta_ref=decision.cmd.delta_ref,
            terminal=terminal if terminal in (Terminal.CRASH, Terminal.LAP_COMPLETE) else None,
            line=reward_line,
            max_speed=params.max_speed,
            max_steer=params.max_steer,
            width_scale=env.track.width_at(progress_s),
            decision_period=env.dt * env.planner_period,
        )
        reward = compute_reward(ctx, reward_cfg)
        relation = next_relation
        trajectory.append(state)
        pending = (decision.obs, decision.a_nn, reward)

    # Close the last transition with the observation at the final state.
    if pending is not None:
        scan = scan_lidar(
            state, env.track.grid, obstacles, env.n_beams, env.fov, env.max_range
        )
        final_obs = planner.plan(state, scan).obs
        obs_prev, a_prev, r_prev = pending
        done = 1.0 if terminal in (Terminal.CRASH, Terminal.LAP_COMPLETE) else 0.0
        transitions.append(Transition(obs_prev, a_prev, r_prev, final_obs, done=done))

    if terminal is None:
        terminal = Terminal.TIMEOUT
    outcome = EpisodeOutcome(
        terminal=terminal,
        lap_time=physics_steps * env.dt,
        trajectory=tuple(trajectory),
        step_count=decisions,
        physics_steps=physics_steps,
        obstacles=tuple(obstacles),
    )
    return outcome, transitions


def save_env_config(env: Environment, seed: int, path: str) -> None:
    """Flat ``key = value`` environment config (simulation + spawn + seed)."""
    p = env.params
    pairs = [
        ("track", env.track.name),
        ("wheelbase", p.wheelbase),
        ("max_steer", p.max_steer),
        ("max_speed", p.max_speed),
        ("max_steer_rate", p.max_steer_rate),
        ("max_accel", p.max_accel),
        ("k_v", p.k_v),
        ("k_delta", p.k_delta),
        ("dt", env.dt),
        ("planner_period", env.planner_period),
        ("timeout", env.timeout),
        ("n_beams", env.n_beams),
        ("fov", env.fov),
        ("max_range", env.max_range),
        ("footprint_radius", env.footprint_radius),
        ("obstacles", "on" if env.obstacles_enabled else "off"),
        ("start_s", env.start_s),
        ("spawn_side", env.spawn.side),
        ("spawn_counts", ",".join(str(c) for c in env.spawn.counts)),
        ("spawn_min_separation", env.spawn.min_separation),
        ("spawn_start_clearance", env.spawn.start_clearance),
        ("spawn_min_gap", env.spawn.min_gap),
        ("spawn_max_attempts", env.spawn.max_attempts),
        ("seed", seed),
    ]
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for key, value in pairs:
            f.write(f"{key} = {value}\n")


def load_env_config(path: str, track: Track) -> tuple[Environment, int]:
    """Parse a flat env config; the track bundle is supplied by the caller."""
    kv: dict[str, str] = {}
    with open(path, "r", encoding="ascii") as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            kv[key.strip()] = value.strip()

    def take(key, conv, default):
        if key not in kv or kv[key] == "":
            return default
        return conv(kv[key])

    params = VehicleParams(
        wheelbase=take("wheelbase", float, 0.33),
        max_steer=take("max_steer", float, 0.4),
        max_speed=take("max_speed", float, 7.0),
        max_steer_rate=take("max_steer_rate", float, 3.2),
        max_accel=take("max_accel", float, 7.0),
        k_v=take("k_v", float, 10.0),
        k_delta=take("k_delta", float, 10.0),
    )
    spawn = SpawnRules(
        side=take("spawn_side", float, 0.6),
        counts=take("spawn_counts", lambda s: tuple(int(x) for x in s.split(",")), (3, 4)),
        min_separation=take("spawn_min_separation", float, 2.0),
        start_clearance=take("spawn_start_clearance", float, 1.0),
        min_gap=take("spawn_min_gap", float, 0.5),
        max_attempts=take("spawn_max_attempts", int, 1000),
    )
    env = Environment(
        track=track,
        params=params,
        dt=take("dt", float, 0.01),
        planner_period=take("planner_period", int, 10),
        timeout=take("timeout", float, 60.0),
        n_beams=take("n_beams", int, 10),
        fov=take("fov", float, math.pi),
        max_range=take("max_range", float, 4.0),
        footprint_radius=take("footprint_radius", float, 0.15),
        obstacles_enabled=take("obstacles", lambda s: s.lower() in ("on", "true", "1"), False),
        spawn=spawn,
        start_s=take("start_s", float, 0.0),
    )
    return env, take("seed", int, 0)


def save_trajectory(path: str, outcome: EpisodeOutcome, transitions: list[Transition]) -> None:
    """Trajectory log: CSV ``t,x,y,psi,v,delta,reward`` per planner step."""
    rows = outcome.trajectory[1:]
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("t,x,y,psi,v,delta,reward\n")
        for st, tr in zip(rows, transitions):
            f.write(
                f"{st.t:.9g},{st.x:.9g},{st.y:.9g},{st.psi:.9g},"
                f"{st.v:.9g},{st.delta:.9g},{tr.reward:.9g}\n"
            )
