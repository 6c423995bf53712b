"""Track bundle: grid + centerline + the two reference lines.

``build_track`` runs the full pipeline (centerline extraction, speed
profiles, minimum-curvature optimization) on an occupancy grid; the result
can be persisted to a directory and reloaded without re-optimizing.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .centerline import Centerline, extract_centerline
from .errors import TrackTopologyError
from .grid import OccupancyGrid, load_grid, save_grid
from .raceline import (
    RaceLine,
    SpeedLimits,
    centerline_raceline,
    load_raceline,
    min_curvature_raceline,
    save_raceline,
)

DEFAULT_MARGIN = 0.3

_CENTER_HEADER = "x,y,nx,ny,w_left,w_right"


@dataclass(frozen=True)
class Track:
    """Everything derived from one occupancy grid."""

    name: str
    grid: OccupancyGrid
    center: Centerline
    line_center: RaceLine
    line_mincurve: RaceLine
    margin: float

    def line_for(self, reference: str) -> RaceLine:
        if reference == "center":
            return self.line_center
        if reference == "mincurve":
            return self.line_mincurve
        raise ValueError(f"unknown reference line {reference!r}")

    def width_at(self, s: float) -> float:
        """Full track width at centerline arc position ``s`` (wraps)."""
        s = s % self.center.length
        w = self.center.w_left + self.center.w_right
        return float(np.interp(s, self.center.s, w))


def _check_on_track(grid: OccupancyGrid, line: RaceLine, label: str) -> None:
    occupied = grid.occupied_at_many(line.waypoints)
    if occupied.any():
        k = int(np.argmax(occupied))
        raise TrackTopologyError(
            f"{label} waypoint {k} at {tuple(line.waypoints[k])} is off the track"
        )


def build_track(
    grid: OccupancyGrid,
    name: str = "track",
    spacing: float = 0.2,
    margin: float = DEFAULT_MARGIN,
    limits: SpeedLimits | None = None,
) -> Track:
    """Extract the centerline and build both reference lines from a grid."""
    limits = limits or SpeedLimits()
    center = extract_centerline(grid, spacing=spacing)
    line_center = centerline_raceline(center, limits)
    line_mincurve = min_curvature_raceline(center, margin, limits)
    _check_on_track(grid, line_center, "centerline")
    _check_on_track(grid, line_mincurve, "raceline")
    return Track(
        name=name,
        grid=grid,
        center=center,
        line_center=line_center,
        line_mincurve=line_mincurve,
        margin=margin,
    )


def save_track(track: Track, out_dir: str) -> None:
    """Persist a bundle as grid + centerline + raceline CSVs + metadata."""
    os.makedirs(out_dir, exist_ok=True)
    save_grid(track.grid, os.path.join(out_dir, "track.grid"))
    pts = track.center.points[:-1]
    nor = track.center.normals[:-1]
    with open(os.path.join(out_dir, "center.csv"), "w", encoding="ascii", newline="\n") as f:
        f.write(_CENTER_HEADER + "\n")
        for (x, y), (nx, ny), wl, wr in zip(
            pts, nor, track.center.w_left[:-1], track.center.w_right[:-1]
        ):
            f.write(f"{x:.17g},{y:.17g},{nx:.17g},{ny:.17g},{wl:.17g},{wr:.17g}\n")
    save_raceline(track.line_center, os.path.join(out_dir, "line_center.csv"))
    save_raceline(track.line_mincurve, os.path.join(out_dir, "line_mincurve.csv"))
    meta = {"name": track.name, "margin": track.margin}
    with open(os.path.join(out_dir, "meta.json"), "w", encoding="ascii", newline="\n") as f:
        json.dump(meta, f, indent=2, sort_keys=True)
        f.write("\n")


def load_track(in_dir: str) -> Track:
    """Reload a bundle written by :func:`save_track` (no recomputation)."""
    grid = load_grid(os.path.join(in_dir, "track.grid"))
    data = np.loadtxt(
        os.path.join(in_dir, "center.csv"), delimiter=",", skiprows=1, dtype=float
    )
    closed = np.vstack([data, data[:1]])
    center = Centerline(
        points=closed[:, 0:2],
        normals=closed[:, 2:4],
        w_left=closed[:, 4],
        w_right=closed[:, 5],
    )
    with open(os.path.join(in_dir, "meta.json"), "r", encoding="ascii") as f:
        meta = json.load(f)
    return Track(
        name=meta["name"],
        grid=grid,
        center=center,
        line_center=load_raceline(os.path.join(in_dir, "line_center.csv")),
        line_mincurve=load_raceline(os.path.join(in_dir, "line_mincurve.csv")),
        margin=float(meta["margin"]),
    )
