"""Polyline geometry primitives shared by the track tooling.

Conventions used throughout the package:

* loops are traversed counter-clockwise; the "left" normal of a tangent
  ``t`` is ``(-t_y, t_x)``,
* curvature is the signed Menger curvature of consecutive point triples
  (positive for left turns on a CCW loop),
* arc length ``s`` starts at 0 on the first point and increases along the
  direction of travel.
"""

from __future__ import annotations

import math

import numpy as np


def wrap_angle(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    w = (a + math.pi) % (2.0 * math.pi) - math.pi
    if w == -math.pi:
        w = math.pi
    return w


def wrap_angle_array(a: np.ndarray) -> np.ndarray:
    w = np.mod(a + np.pi, 2.0 * np.pi) - np.pi
    return np.where(w == -np.pi, np.pi, w)


def cumulative_arclength(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length per point, ``s[0] = 0``."""
    d = np.hypot(*np.diff(points, axis=0).T)
    return np.concatenate(([0.0], np.cumsum(d)))


def loop_length(points: np.ndarray) -> float:
    """Total length of the closed polyline through `points` (no duplicate end)."""
    closed = np.vstack([points, points[0]])
    return float(cumulative_arclength(closed)[-1])


def signed_curvature(points: np.ndarray, closed: bool = True) -> np.ndarray:
    """Signed Menger curvature at every point of a polyline.

    For point ``p_i`` the curvature of the circle through
    ``(p_{i-1}, p_i, p_{i+1})`` is returned, signed by turn direction
    (positive = left). Open polylines get zero curvature at their endpoints;
    collinear triples yield exactly zero.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < 3:
        return np.zeros(n)
    if closed:
        prv = np.roll(pts, 1, axis=0)
        nxt = np.roll(pts, -1, axis=0)
        cur = pts
    else:
        prv, cur, nxt = pts[:-2], pts[1:-1], pts[2:]
    u = cur - prv
    v = nxt - cur
    w = nxt - prv
    cross = u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0]
    a = np.hypot(u[:, 0], u[:, 1])
    b = np.hypot(v[:, 0], v[:, 1])
    c = np.hypot(w[:, 0], w[:, 1])
    denom = a * b * c
    kappa = np.zeros(len(cur))
    ok = denom > 0.0
    kappa[ok] = 2.0 * cross[ok] / denom[ok]
    if closed:
        return kappa
    return np.concatenate(([0.0], kappa, [0.0]))


def resample_loop(points: np.ndarray, spacing: float) -> np.ndarray:
    """Resample a closed loop to (near-)uniform spacing.

    Returns unique points (no closing duplicate). The actual spacing is
    ``length / n`` with ``n = round(length / spacing)`` so the loop closes
    exactly.
    """
    pts = np.asarray(points, dtype=float)
    if np.allclose(pts[0], pts[-1]):
        pts = pts[:-1]
    closed = np.vstack([pts, pts[0]])
    s = cumulative_arclength(closed)
    length = s[-1]
    n = max(int(round(length / spacing)), 8)
    s_new = np.arange(n) * (length / n)
    x = np.interp(s_new, s, closed[:, 0])
    y = np.interp(s_new, s, closed[:, 1])
    return np.column_stack([x, y])


def loop_tangents(points: np.ndarray) -> np.ndarray:
    """Unit tangents of a closed loop (no duplicate end), central differences."""
    pts = np.asarray(points, dtype=float)
    d = np.roll(pts, -1, axis=0) - np.roll(pts, 1, axis=0)
    norm = np.hypot(d[:, 0], d[:, 1])
    return d / norm[:, None]


def left_normals(tangents: np.ndarray) -> np.ndarray:
    """Rotate unit tangents +90 degrees."""
    return np.column_stack([-tangents[:, 1], tangents[:, 0]])


def signed_loop_area(points: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise loops."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def smooth_loop(points: np.ndarray, window: int, passes: int = 1) -> np.ndarray:
    """Circular moving-average smoothing of a closed loop."""
    pts = np.asarray(points, dtype=float)
    if window < 3 or len(pts) <= window:
        return pts
    half = window // 2
    kernel = np.ones(2 * half + 1) / (2 * half + 1)
    for _ in range(passes):
        padded = np.vstack([pts[-half:], pts, pts[:half]])
        pts = np.column_stack([
            np.convolve(padded[:, 0], kernel, mode="valid"),
            np.convolve(padded[:, 1], kernel, mode="valid"),
        ])
    return pts


def project_to_segments(
    q: np.ndarray,
    starts: np.ndarray,
    dirs: np.ndarray,
    len2: np.ndarray,
) -> tuple[int, float, float]:
    """Project point `q` onto the closest of a set of segments.

    Returns ``(segment index, param t in [0, 1], squared distance)``. Ties in
    distance pick the lowest segment index.
    """
    rel = q[None, :] - starts
    t = np.einsum("ij,ij->i", rel, dirs)
    np.divide(t, len2, out=t, where=len2 > 0.0)
    np.clip(t, 0.0, 1.0, out=t)
    foot = starts + t[:, None] * dirs
    d2 = np.einsum("ij,ij->i", q[None, :] - foot, q[None, :] - foot)
    i = int(np.argmin(d2))
    return i, float(t[i]), float(d2[i])


def segments_intersect(
    p0: np.ndarray, p1: np.ndarray, q0: np.ndarray, q1: np.ndarray
) -> bool:
    """True if segment p0-p1 crosses segment q0-q1 (inclusive of endpoints)."""
    d1 = p1 - p0
    d2 = q1 - q0
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    rel = q0 - p0
    if denom == 0.0:
        return False
    t = (rel[0] * d2[1] - rel[1] * d2[0]) / denom
    u = (rel[0] * d1[1] - rel[1] * d1[0]) / denom
    return 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0
