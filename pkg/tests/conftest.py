"""Shared fixtures: synthetic grids and the bundled tracks (built once)."""

from __future__ import annotations

import math

import numpy as np
import pytest

from racelab import OccupancyGrid, RaceLine, build_track
from racelab.trackgen import load_asset


def make_annulus_grid(
    r_inner: float = 2.0,
    r_outer: float = 4.0,
    resolution: float = 0.05,
    pad: float = 0.25,
) -> OccupancyGrid:
    """Square grid whose free space is the ring r_inner <= r <= r_outer."""
    half = r_outer + pad
    n = int(math.ceil(2.0 * half / resolution))
    xs = (np.arange(n) + 0.5) * resolution - half
    gx, gy = np.meshgrid(xs, xs)
    r = np.hypot(gx, gy)
    free = (r >= r_inner) & (r <= r_outer)
    return OccupancyGrid(
        width_cells=n,
        height_cells=n,
        resolution=resolution,
        origin=(-half, -half),
        cells=~free,
    )


def make_corridor_grid(
    length: float = 8.0, width: float = 2.0, resolution: float = 0.05
) -> OccupancyGrid:
    """Open (non-closed) straight corridor along +x, walls on all sides."""
    w = int(round(length / resolution)) + 8
    h = int(round(width / resolution)) + 8
    cells = np.ones((h, w), dtype=bool)
    cells[4:-4, 4:-4] = False
    return OccupancyGrid(w, h, resolution, origin=(0.0, 0.0), cells=cells)


def make_free_grid(
    span: float = 20.0, resolution: float = 0.05, origin: tuple = None
) -> OccupancyGrid:
    """Entirely free square grid, origin centered unless given."""
    n = int(round(span / resolution))
    if origin is None:
        origin = (-span / 2.0, -span / 2.0)
    return OccupancyGrid(n, n, resolution, origin, np.zeros((n, n), dtype=bool))


def make_circle_line(
    radius: float, n: int = 256, v: float = 5.0, center=(0.0, 0.0)
) -> RaceLine:
    """CCW circular reference line with constant speed."""
    t = 2.0 * np.pi * np.arange(n) / n
    pts = np.column_stack(
        [center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)]
    )
    s = np.concatenate([[0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))])
    return RaceLine(waypoints=pts, speeds=np.full(n, v), s=s)


def make_straight_line(
    length: float = 100.0, n: int = 100, v: float = 5.0, offset: float = 50.0
) -> RaceLine:
    """Loop whose bottom edge runs along y = 0 from x = 0 to ``length``.

    The return edge sits ``offset`` away so projections near the bottom edge
    are unambiguous; there ``s`` equals ``x`` exactly.
    """
    x = np.linspace(0.0, length, n)
    bottom = np.column_stack([x, np.zeros(n)])
    top = np.column_stack([x[::-1], np.full(n, offset)])
    pts = np.vstack([bottom, top])
    d = np.hypot(*np.diff(pts, axis=0).T)
    s = np.concatenate([[0.0], np.cumsum(d)])
    return RaceLine(waypoints=pts, speeds=np.full(2 * n, v), s=s)


@pytest.fixture(scope="session")
def annulus_grid() -> OccupancyGrid:
    return make_annulus_grid()


@pytest.fixture(scope="session")
def oval_track():
    return build_track(load_asset("oval"), name="oval")


@pytest.fixture(scope="session")
def circuit_track():
    return build_track(load_asset("circuit"), name="circuit")
