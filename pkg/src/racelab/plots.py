"""Deterministic SVG rendering of tracks, reference lines and trajectories.

The SVG is assembled from fixed-format strings, so equal inputs produce
byte-identical files. Track walls come from sub-cell contours of the
occupancy mask; the reference line is dashed, the driven path solid.
"""

from __future__ import annotations

import numpy as np
from skimage import measure

from .raceline import RaceLine
from .simenv import Obstacle
from .track import Track

_W = 900  # image width in px; height follows the grid aspect ratio


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _polyline(points_px: np.ndarray, style: str) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points_px)
    return f'<polyline points="{pts}" {style}/>'


def emit_trajectory_plot(
    trajectory_xy: np.ndarray,
    track: Track,
    line: RaceLine,
    out_path: str,
    obstacles: list[Obstacle] | None = None,
) -> None:
    """Write an SVG overlaying walls, reference line, obstacles and path.

    ``trajectory_xy`` is an (n, 2) array (may be empty). The reference line
    is drawn dashed; the driven path solid.
    """
    grid = track.grid
    res = grid.resolution
    x0, y0 = grid.origin
    span_x = grid.width_cells * res
    span_y = grid.height_cells * res
    scale = _W / span_x
    height = span_y * scale

    def to_px(xy: np.ndarray) -> np.ndarray:
        xy = np.atleast_2d(xy)
        px = (xy[:, 0] - x0) * scale
        py = height - (xy[:, 1] - y0) * scale  # SVG y grows downward
        return np.column_stack([px, py])

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_W} {_fmt(height)}">',
        f'<rect width="{_W}" height="{_fmt(height)}" fill="#ffffff"/>',
    ]

    # Track walls: 0.5-level contours of the occupancy mask. find_contours
    # returns (row, col) vertices in cell units; convert to world metres.
    mask = grid.cells.astype(float)
    for contour in measure.find_contours(mask, 0.5):
        world = np.column_stack(
            [x0 + (contour[:, 1] + 0.5) * res, y0 + (contour[:, 0] + 0.5) * res]
        )
        parts.append(
            _polyline(
                to_px(world),
                'fill="none" stroke="#444444" stroke-width="1.5"',
            )
        )

    closed_line = np.vstack([line.waypoints, line.waypoints[:1]])
    parts.append(
        _polyline(
            to_px(closed_line),
            'fill="none" stroke="#2e8b57" stroke-width="1.5" '
            'stroke-dasharray="8 5"',
        )
    )

    for ob in obstacles or []:
        bx0, by0, bx1, by1 = ob.bounds
        (px0, py1), (px1, py0) = to_px(np.array([[bx0, by0], [bx1, by1]]))
        parts.append(
            f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" '
            f'width="{_fmt(px1 - px0)}" height="{_fmt(py1 - py0)}" '
            f'fill="#888888" stroke="#333333" stroke-width="1"/>'
        )

    trajectory_xy = np.asarray(trajectory_xy, dtype=float).reshape(-1, 2)
    if len(trajectory_xy) >= 2:
        parts.append(
            _polyline(
                to_px(trajectory_xy),
                'fill="none" stroke="#cc2222" stroke-width="2"',
            )
        )

    parts.append("</svg>")
    with open(out_path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(parts) + "\n")


def load_trajectory_xy(path: str) -> np.ndarray:
    """x,y columns of a trajectory CSV written by the episode runner."""
    with open(path, "r", encoding="ascii") as f:
        rows = [line for i, line in enumerate(f) if i > 0 and line.strip()]
    if not rows:
        return np.empty((0, 2))
    data = np.loadtxt(rows, delimiter=",", dtype=float, ndmin=2)
    return data[:, 1:3]
