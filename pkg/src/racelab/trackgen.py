"""Procedural track construction and access to the bundled track assets.

A track starts as a *design*: an exact closed polyline (the intended center
path) plus a half-width. Rasterization marks every grid cell whose center
lies within the half-width corridor as free. The bundled assets were produced
by ``scripts/build_assets.py`` from the designs in this module.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources

import numpy as np
from scipy.spatial import cKDTree

from .grid import OccupancyGrid

_SAMPLE_STEP = 0.002  # corridor sampling step used when rasterizing (m)


@dataclass(frozen=True)
class TrackDesign:
    """Exact geometric intent of a track before rasterization."""

    name: str
    points: np.ndarray  # closed design polyline, unique points, CCW
    half_width: float
    resolution: float
    design_length: float  # analytic length of the design path


def _arc(center, radius, a0, a1, step=0.02):
    """CCW arc sample points from angle a0 to a1 (exclusive of the endpoint)."""
    sweep = a1 - a0
    n = max(int(math.ceil(abs(sweep) * radius / step)), 4)
    t = a0 + sweep * np.arange(n) / n
    return np.column_stack([center[0] + radius * np.cos(t), center[1] + radius * np.sin(t)])


def _line(p0, p1, step=0.02):
    """Sample points from p0 toward p1 (exclusive of p1)."""
    p0 = np.asarray(p0, float)
    p1 = np.asarray(p1, float)
    n = max(int(math.ceil(np.hypot(*(p1 - p0)) / step)), 1)
    t = np.arange(n) / n
    return p0 + t[:, None] * (p1 - p0)


def design_oval(
    straight: float = 14.0,
    radius: float = 3.25,
    width: float = 3.2,
    resolution: float = 0.05,
) -> TrackDesign:
    """Stadium oval: two straights joined by semicircular ends."""
    h = straight / 2.0
    parts = [
        _line((-h, -radius), (h, -radius)),
        _arc((h, 0.0), radius, -math.pi / 2, math.pi / 2),
        _line((h, radius), (-h, radius)),
        _arc((-h, 0.0), radius, math.pi / 2, 3 * math.pi / 2),
    ]
    pts = np.vstack(parts)
    length = 2.0 * straight + 2.0 * math.pi * radius
    return TrackDesign(
        name="oval",
        points=pts,
        half_width=width / 2.0,
        resolution=resolution,
        design_length=length,
    )


def design_circuit(
    span_x: float = 17.0,
    span_y: float = 8.5,
    radii: tuple[float, float, float, float] = (2.2, 3.0, 2.6, 3.6),
    width: float = 3.2,
    resolution: float = 0.05,
) -> TrackDesign:
    """Rounded rectangle with four distinct corner radii (CCW from bottom edge).

    ``radii`` are for the bottom-right, top-right, top-left and bottom-left
    corners in traversal order.
    """
    hx, hy = span_x / 2.0, span_y / 2.0
    r_br, r_tr, r_tl, r_bl = radii
    if min(radii) <= 0 or max(r_br + r_tr, r_tl + r_bl) > span_y or max(
        r_br + r_bl, r_tr + r_tl
    ) > span_x:
        raise ValueError("corner radii do not fit the rectangle spans")
    parts = [
        _line((-hx + r_bl, -hy), (hx - r_br, -hy)),
        _arc((hx - r_br, -hy + r_br), r_br, -math.pi / 2, 0.0),
        _line((hx, -hy + r_br), (hx, hy - r_tr)),
        _arc((hx - r_tr, hy - r_tr), r_tr, 0.0, math.pi / 2),
        _line((hx - r_tr, hy), (-hx + r_tl, hy)),
        _arc((-hx + r_tl, hy - r_tl), r_tl, math.pi / 2, math.pi),
        _line((-hx, hy - r_tl), (-hx, -hy + r_bl)),
        _arc((-hx + r_bl, -hy + r_bl), r_bl, math.pi, 3 * math.pi / 2),
    ]
    pts = np.vstack(parts)
    length = 2.0 * (span_x + span_y) - (2.0 - math.pi / 2.0) * sum(radii)
    return TrackDesign(
        name="circuit",
        points=pts,
        half_width=width / 2.0,
        resolution=resolution,
        design_length=length,
    )


BUILTIN_DESIGNS = {"oval": design_oval, "circuit": design_circuit}


def rasterize(design: TrackDesign, pad: float = 0.3) -> OccupancyGrid:
    """Mark cells whose center lies within the design corridor as free.

    Distances are measured against a dense resampling of the design polyline
    (step 2 mm), so the boundary error is far below one cell.
    """
    closed = np.vstack([design.points, design.points[:1]])
    seg = np.diff(closed, axis=0)
    seg_len = np.hypot(seg[:, 0], seg[:, 1])
    s = np.concatenate([[0.0], np.cumsum(seg_len)])
    dense_s = np.arange(0.0, s[-1], _SAMPLE_STEP)
    dense = np.column_stack(
        [np.interp(dense_s, s, closed[:, 0]), np.interp(dense_s, s, closed[:, 1])]
    )
    tree = cKDTree(dense)

    lo = design.points.min(axis=0) - design.half_width - pad
    hi = design.points.max(axis=0) + design.half_width + pad
    res = design.resolution
    width = int(math.ceil((hi[0] - lo[0]) / res))
    height = int(math.ceil((hi[1] - lo[1]) / res))
    xs = lo[0] + (np.arange(width) + 0.5) * res
    ys = lo[1] + (np.arange(height) + 0.5) * res
    gx, gy = np.meshgrid(xs, ys)
    centers = np.column_stack([gx.ravel(), gy.ravel()])
    dist, _ = tree.query(centers, workers=-1)
    free = (dist <= design.half_width).reshape(height, width)
    return OccupancyGrid(
        width_cells=width,
        height_cells=height,
        resolution=res,
        origin=(float(lo[0]), float(lo[1])),
        cells=~free,
    )


def design_metadata(design: TrackDesign, grid: OccupancyGrid) -> dict:
    """Asset sidecar recording intent plus independently counted cells."""
    return {
        "name": design.name,
        "design_length": design.design_length,
        "width": 2.0 * design.half_width,
        "resolution": design.resolution,
        "free_cells": int(np.count_nonzero(~grid.cells)),
    }


# ---------------------------------------------------------------------------
# Bundled assets


def asset_names() -> list[str]:
    return sorted(BUILTIN_DESIGNS)


def _asset_root():
    return resources.files("racelab") / "assets"


def asset_grid_path(name: str) -> str:
    return str(_asset_root() / f"{name}.grid")


def load_asset(name: str) -> OccupancyGrid:
    """Load a bundled track grid by name ('oval' or 'circuit')."""
    from .grid import load_grid

    path = _asset_root() / f"{name}.grid"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled track named {name!r}; have {asset_names()}")
    return load_grid(str(path))


def load_asset_meta(name: str) -> dict:
    path = _asset_root() / f"{name}.json"
    with path.open("r", encoding="ascii") as f:
        return json.load(f)
