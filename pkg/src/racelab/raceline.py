"""Reference lines: projection geometry, minimum-curvature offsets, speed profile.

A :class:`RaceLine` is the closed reference path planners and reward signals
work against. It stores unique waypoints (no closing duplicate); the segment
from the last waypoint back to the first is implied, and ``s_total`` includes
it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import geometry
from .centerline import Centerline
from .errors import InfeasibleConstraintError


@dataclass(frozen=True)
class RaceLine:
    """Ordered waypoints with target speeds and cumulative arc length."""

    waypoints: np.ndarray
    speeds: np.ndarray
    s: np.ndarray

    def __post_init__(self):
        for name in ("waypoints", "speeds", "s"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if len(self.waypoints) < 3:
            raise ValueError("a race line needs at least 3 waypoints")

    @property
    def s_total(self) -> float:
        closing = float(np.hypot(*(self.waypoints[-1] - self.waypoints[0])))
        return float(self.s[-1]) + closing

    @cached_property
    def _segments(self) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        starts = self.waypoints
        ends = np.roll(self.waypoints, -1, axis=0)
        dirs = ends - starts
        lengths = np.hypot(dirs[:, 0], dirs[:, 1])
        return starts, dirs, lengths**2, lengths

    @cached_property
    def segment_headings(self) -> np.ndarray:
        _, dirs, _, _ = self._segments
        return np.arctan2(dirs[:, 1], dirs[:, 0])

    def segment_at(self, s: float) -> int:
        """Index of the segment containing arc length ``s`` (wraps)."""
        s = s % self.s_total
        i = int(np.searchsorted(self.s, s, side="right") - 1)
        return max(0, min(i, len(self.waypoints) - 1))

    def point_at(self, s: float) -> np.ndarray:
        """Interpolate the position at arc length ``s`` (wraps modulo s_total)."""
        s = s % self.s_total
        starts, dirs, _, lengths = self._segments
        i = self.segment_at(s)
        t = (s - self.s[i]) / lengths[i] if lengths[i] > 0 else 0.0
        return starts[i] + t * dirs[i]

    def speed_at_segment(self, index: int) -> float:
        return float(self.speeds[index])


@dataclass(frozen=True)
class LineRelation:
    """Where a pose sits relative to a reference line."""

    s: float
    d_c: float
    theta: float
    segment_index: int


def project_progress(position: np.ndarray, line: RaceLine) -> float:
    """Arc length of the orthogonal projection of `position` onto `line`.

    Wraps modulo ``s_total``; equidistant segments resolve to the smaller
    ``s``.
    """
    starts, dirs, len2, lengths = line._segments
    i, t, _ = geometry.project_to_segments(np.asarray(position, float), starts, dirs, len2)
    return (float(line.s[i]) + t * float(lengths[i])) % line.s_total


def line_relation(position: np.ndarray, heading: float, line: RaceLine) -> LineRelation:
    """Progress, cross-track distance and heading error of a pose."""
    q = np.asarray(position, dtype=float)
    starts, dirs, len2, lengths = line._segments
    i, t, d2 = geometry.project_to_segments(q, starts, dirs, len2)
    s = (float(line.s[i]) + t * float(lengths[i])) % line.s_total
    theta = geometry.wrap_angle(heading - float(line.segment_headings[i]))
    return LineRelation(s=s, d_c=math.sqrt(d2), theta=theta, segment_index=i)


def progress_delta(s_prev: float, s_next: float, s_total: float) -> float:
    """Step progress ``s_next - s_prev`` wrapped into (-s_total/2, s_total/2]."""
    d = (s_next - s_prev) % s_total
    if d > s_total / 2.0:
        d -= s_total
    return d


# ---------------------------------------------------------------------------
# Minimum-curvature offsets


def _curvature_and_jacobian(
    points: np.ndarray, normals: np.ndarray, closed: bool
) -> tuple[np.ndarray, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Signed curvature per point and its partials w.r.t. the lateral offsets.

    The Jacobian is tri-banded (kappa_i depends on offsets i-1, i, i+1) and is
    returned as three diagonals ``(d_prev, d_self, d_next)``.
    """
    n = len(points)
    if closed:
        A = np.roll(points, 1, axis=0)
        B = points
        C = np.roll(points, -1, axis=0)
        nA = np.roll(normals, 1, axis=0)
        nB = normals
        nC = np.roll(normals, -1, axis=0)
    else:
        A, B, C = points[:-2], points[1:-1], points[2:]
        nA, nB, nC = normals[:-2], normals[1:-1], normals[2:]
    u = B - A
    v = C - B
    w = C - A
    z = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    a = np.hypot(u[:, 0], u[:, 1])
    b = np.hypot(v[:, 0], v[:, 1])
    c = np.hypot(w[:, 0], w[:, 1])
    abc = a * b * c
    kappa = 2.0 * z / abc

    pref = 2.0 / abc
    # d kappa / d A, B, C as 2-vectors
    dk_dA = pref[:, None] * np.column_stack([-v[:, 1], v[:, 0]]) + kappa[:, None] * (
        u / (a**2)[:, None] + w / (c**2)[:, None]
    )
    dk_dB = pref[:, None] * np.column_stack([u[:, 1] + v[:, 1], -u[:, 0] - v[:, 0]]) - kappa[
        :, None
    ] * (u / (a**2)[:, None] - v / (b**2)[:, None])
    dk_dC = pref[:, None] * np.column_stack([-u[:, 1], u[:, 0]]) - kappa[:, None] * (
        v / (b**2)[:, None] + w / (c**2)[:, None]
    )
    d_prev = np.einsum("ij,ij->i", dk_dA, nA)
    d_self = np.einsum("ij,ij->i", dk_dB, nB)
    d_next = np.einsum("ij,ij->i", dk_dC, nC)
    if not closed:
        z0 = np.zeros(1)
        kappa = np.concatenate([z0, kappa, z0])
        d_prev = np.concatenate([z0, d_prev, z0])
        d_self = np.concatenate([z0, d_self, z0])
        d_next = np.concatenate([z0, d_next, z0])
    return kappa, (d_prev, d_self, d_next)


def _band_to_dense(diags, closed: bool) -> np.ndarray:
    """Materialize the tri-banded Jacobian (rows: kappa, cols: offsets)."""
    d_prev, d_self, d_next = diags
    n = len(d_self)
    idx = np.arange(n)
    D = np.zeros((n, n))
    D[idx, idx] = d_self
    if closed:
        D[idx, (idx - 1) % n] = d_prev
        D[idx, (idx + 1) % n] = d_next
    else:
        D[idx[1:], idx[1:] - 1] = d_prev[1:]
        D[idx[:-1], idx[:-1] + 1] = d_next[:-1]
    return D


def curvature_objective(
    points: np.ndarray, normals: np.ndarray, offsets: np.ndarray, closed: bool = True
) -> float:
    """Summed squared discrete curvature of the laterally offset path."""
    shifted = points + offsets[:, None] * normals
    kappa = geometry.signed_curvature(shifted, closed=closed)
    return float(np.sum(kappa**2))


def optimize_offsets(
    points: np.ndarray,
    normals: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    closed: bool = True,
    tol: float = 1e-8,
    max_outer: int = 40,
    max_inner: int = 20000,
) -> np.ndarray:
    """Box-constrained lateral offsets minimizing summed squared curvature.

    Sequentially linearizes the offset-path curvature around the current
    offsets and solves each resulting box-constrained quadratic program by
    projected gradient descent (convergence threshold ``tol`` on objective
    change). Candidate steps are backtracked against the true nonlinear
    objective, so the result never exceeds the zero-offset objective.
    """
    points = np.asarray(points, dtype=float)
    normals = np.asarray(normals, dtype=float)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if np.any(lower > upper):
        raise InfeasibleConstraintError("empty offset box: track narrower than 2*margin")
    n = len(points)
    alpha = np.clip(np.zeros(n), lower, upper)
    j_cur = curvature_objective(points, normals, alpha, closed)

    for _ in range(max_outer):
        kappa, diags = _curvature_and_jacobian(
            points + alpha[:, None] * normals, normals, closed
        )
        D = _band_to_dense(diags, closed)
        # Tight Lipschitz constant for grad f, f = |kappa + D(x - alpha)|^2,
        # via power iteration on D^T D (5% safety factor).
        z = np.ones(n)
        for _ in range(30):
            z = D.T @ (D @ z)
            norm = float(np.linalg.norm(z))
            if norm == 0.0:
                break
            z /= norm
        lip = 2.1 * float(z @ (D.T @ (D @ z)))
        if lip <= 0.0:
            break
        step = 1.0 / lip

        # Projected gradient with Nesterov momentum (restart on increase),
        # stopping on objective change below tol.
        base = kappa - D @ alpha
        x = alpha.copy()
        f_x = float(np.sum((base + D @ x) ** 2))
        momentum = x.copy()
        theta = 1.0
        for _ in range(max_inner):
            grad = 2.0 * (D.T @ (base + D @ momentum))
            x_new = np.clip(momentum - step * grad, lower, upper)
            f_new = float(np.sum((base + D @ x_new) ** 2))
            if f_new > f_x:
                momentum = x.copy()  # restart momentum at the best point
                theta = 1.0
                continue
            theta_new = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * theta * theta))
            momentum = x_new + ((theta - 1.0) / theta_new) * (x_new - x)
            done = f_x - f_new < tol
            x, f_x, theta = x_new, f_new, theta_new
            if done:
                break

        # Backtrack the SQP step against the true objective.
        improved = False
        scale = 1.0
        while scale > 1e-4:
            cand = alpha + scale * (x - alpha)
            j_cand = curvature_objective(points, normals, cand, closed)
            if j_cand < j_cur:
                alpha, gain = cand, j_cur - j_cand
                j_cur = j_cand
                improved = True
                break
            scale *= 0.5
        if not improved or gain < tol:
            break

    assert j_cur <= curvature_objective(points, normals, np.zeros(n), closed) + 1e-12
    assert np.all(alpha >= lower - 1e-12) and np.all(alpha <= upper + 1e-12)
    return alpha


def optimize_min_curvature(center: Centerline, margin: float) -> np.ndarray:
    """Minimum-curvature lateral offsets for a track centerline.

    ``margin`` (>= half vehicle width) shrinks the usable corridor on both
    sides. Raises :class:`InfeasibleConstraintError` where the track is
    narrower than ``2 * margin``.
    """
    if margin < 0:
        raise ValueError("margin must be >= 0")
    pts = center.interior_points
    normals = center.normals[:-1]
    lower = -(center.w_right[:-1] - margin)
    upper = center.w_left[:-1] - margin
    if np.any(lower > upper):
        raise InfeasibleConstraintError(
            "track narrower than twice the margin somewhere along the loop"
        )
    return optimize_offsets(pts, normals, lower, upper, closed=True)


# ---------------------------------------------------------------------------
# Speed profile


@dataclass(frozen=True)
class SpeedLimits:
    """Dynamic limits for the minimum-time speed profile."""

    v_max: float = 7.0
    a_lat_max: float = 8.0
    a_long_max: float = 6.0

    def __post_init__(self):
        if self.v_max <= 0 or self.a_lat_max <= 0 or self.a_long_max <= 0:
            raise ValueError("speed profile limits must be positive")


def speed_profile(
    waypoints: np.ndarray, limits: SpeedLimits, closed: bool = True
) -> np.ndarray:
    """Per-waypoint speeds: lateral-acceleration cap plus forward/backward
    longitudinal passes iterated to a fixed point.

    On closed loops the passes wrap around the ring until nothing changes, so
    the result does not depend on the traversal's starting index.
    """
    pts = np.asarray(waypoints, dtype=float)
    n = len(pts)
    kappa = np.abs(geometry.signed_curvature(pts, closed=closed))
    v = np.full(n, limits.v_max)
    turning = kappa > 0
    v[turning] = np.minimum(limits.v_max, np.sqrt(limits.a_lat_max / kappa[turning]))

    if closed:
        seg = np.roll(pts, -1, axis=0) - pts
    else:
        seg = np.diff(pts, axis=0)
    ds = np.hypot(seg[:, 0], seg[:, 1])
    two_a = 2.0 * limits.a_long_max

    for _ in range(10 * n):
        changed = False
        idx = range(n) if closed else range(n - 1)
        for i in idx:
            j = (i + 1) % n
            cap = math.sqrt(v[i] ** 2 + two_a * ds[i])
            if cap < v[j]:
                v[j] = cap
                changed = True
        for i in reversed(list(idx)):
            j = (i + 1) % n
            cap = math.sqrt(v[j] ** 2 + two_a * ds[i])
            if cap < v[i]:
                v[i] = cap
                changed = True
        if not changed:
            break
    return v


def build_raceline(
    waypoints: np.ndarray, limits: SpeedLimits | None = None
) -> RaceLine:
    """Attach a minimum-time speed profile and arc lengths to loop waypoints."""
    limits = limits or SpeedLimits()
    pts = np.asarray(waypoints, dtype=float)
    speeds = speed_profile(pts, limits, closed=True)
    s = geometry.cumulative_arclength(pts)
    return RaceLine(waypoints=pts, speeds=speeds, s=s)


def centerline_raceline(center: Centerline, limits: SpeedLimits | None = None) -> RaceLine:
    """The centerline itself as a drivable reference line."""
    return build_raceline(center.interior_points, limits)


def min_curvature_raceline(
    center: Centerline, margin: float, limits: SpeedLimits | None = None
) -> RaceLine:
    """Optimize offsets and wrap the result as a reference line."""
    offsets = optimize_min_curvature(center, margin)
    pts = center.interior_points + offsets[:, None] * center.normals[:-1]
    return build_raceline(pts, limits)


# ---------------------------------------------------------------------------
# File format


def save_raceline(line: RaceLine, path: str) -> None:
    """CSV with header ``x,y,speed,s``; 9-significant-digit floats."""
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("x,y,speed,s\n")
        for (x, y), v, s in zip(line.waypoints, line.speeds, line.s):
            f.write(f"{x:.9g},{y:.9g},{v:.9g},{s:.9g}\n")


def load_raceline(path: str) -> RaceLine:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=float)
    if data.ndim != 2 or data.shape[1] != 4:
        raise ValueError(f"{path}: expected 4 columns x,y,speed,s")
    return RaceLine(waypoints=data[:, :2], speeds=data[:, 2], s=data[:, 3])
