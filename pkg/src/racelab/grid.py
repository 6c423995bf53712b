"""Binary occupancy grids and their plain-text file format.

Format (``RLGRID 1``): a header of ``key value`` lines followed by
``height`` rows of ``width`` characters, ``#`` occupied and ``.`` free.
Row 0 of the payload is the row of cells starting at the grid origin;
row index grows with world ``y``. Files round-trip bit-exactly through
:func:`load_grid` / :func:`save_grid`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridFormatError, GridTruncationError

MAGIC = "RLGRID 1"
HEADER_KEYS = ("width", "height", "resolution", "origin_x", "origin_y")


@dataclass(frozen=True)
class OccupancyGrid:
    """Binary drivable/occupied map with metric resolution.

    ``cells`` is a read-only bool array of shape ``(height, width)``,
    True = occupied. Cell ``(row, col)`` covers the world square with corner
    ``origin + (col, row) * resolution``. Every lookup outside the bounds
    reports occupied.
    """

    width_cells: int
    height_cells: int
    resolution: float
    origin: tuple[float, float]
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.resolution <= 0:
            raise GridFormatError(f"resolution must be > 0, got {self.resolution}")
        if self.width_cells < 1 or self.height_cells < 1:
            raise GridFormatError("grid must be at least 1x1 cells")
        cells = np.asarray(self.cells, dtype=bool)
        if cells.shape != (self.height_cells, self.width_cells):
            raise GridTruncationError(
                f"payload shape {cells.shape} does not match declared "
                f"{self.height_cells}x{self.width_cells}"
            )
        cells = cells.copy()
        cells.flags.writeable = False
        object.__setattr__(self, "cells", cells)

    @classmethod
    def from_values(
        cls,
        values: np.ndarray,
        resolution: float,
        origin: tuple[float, float] = (0.0, 0.0),
    ) -> "OccupancyGrid":
        """Threshold a numeric map: cell >= 0.5 of the max value => occupied."""
        values = np.asarray(values, dtype=float)
        peak = values.max() if values.size else 1.0
        occ = values >= 0.5 * peak if peak > 0 else np.zeros_like(values, dtype=bool)
        h, w = occ.shape
        return cls(w, h, resolution, origin, occ)

    @property
    def free_cells(self) -> int:
        return int(self.cells.size - np.count_nonzero(self.cells))

    def world_to_cell(self, x: float, y: float) -> tuple[int, int]:
        col = math.floor((x - self.origin[0]) / self.resolution)
        row = math.floor((y - self.origin[1]) / self.resolution)
        return row, col

    def cell_center(self, row: int, col: int) -> tuple[float, float]:
        return (
            self.origin[0] + (col + 0.5) * self.resolution,
            self.origin[1] + (row + 0.5) * self.resolution,
        )

    def occupied_at(self, x: float, y: float) -> bool:
        row, col = self.world_to_cell(x, y)
        return self.occupied_at_cell(row, col)

    def occupied_at_cell(self, row: int, col: int) -> bool:
        if 0 <= row < self.height_cells and 0 <= col < self.width_cells:
            return bool(self.cells[row, col])
        return True

    def occupied_at_many(self, xy: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`occupied_at` for an (n, 2) array of positions."""
        col = np.floor((xy[:, 0] - self.origin[0]) / self.resolution).astype(int)
        row = np.floor((xy[:, 1] - self.origin[1]) / self.resolution).astype(int)
        inside = (
            (row >= 0)
            & (row < self.height_cells)
            & (col >= 0)
            & (col < self.width_cells)
        )
        out = np.ones(len(xy), dtype=bool)
        out[inside] = self.cells[row[inside], col[inside]]
        return out

    def raycast(self, x: float, y: float, angle: float, max_range: float) -> float:
        """Distance along a ray to the first occupied cell, clipped to max_range.

        Standard DDA traversal; the start cell itself counts (a ray cast from
        inside a wall returns 0).
        """
        if self.occupied_at(x, y):
            return 0.0
        res = self.resolution
        dx, dy = math.cos(angle), math.sin(angle)
        row, col = self.world_to_cell(x, y)
        step_c = 1 if dx > 0 else -1
        step_r = 1 if dy > 0 else -1
        # Distance to the first vertical / horizontal cell boundary.
        if dx > 0:
            t_max_x = ((col + 1) * res + self.origin[0] - x) / dx
        elif dx < 0:
            t_max_x = (col * res + self.origin[0] - x) / dx
        else:
            t_max_x = math.inf
        if dy > 0:
            t_max_y = ((row + 1) * res + self.origin[1] - y) / dy
        elif dy < 0:
            t_max_y = (row * res + self.origin[1] - y) / dy
        else:
            t_max_y = math.inf
        t_delta_x = abs(res / dx) if dx != 0 else math.inf
        t_delta_y = abs(res / dy) if dy != 0 else math.inf

        t = 0.0
        while t <= max_range:
            if t_max_x < t_max_y:
                t = t_max_x
                t_max_x += t_delta_x
                col += step_c
            else:
                t = t_max_y
                t_max_y += t_delta_y
                row += step_r
            if t > max_range:
                break
            if not (0 <= row < self.height_cells and 0 <= col < self.width_cells):
                return min(t, max_range)
            if self.cells[row, col]:
                return min(t, max_range)
        return max_range


def _format_float(v: float) -> str:
    return repr(float(v))


def load_grid(path: str) -> OccupancyGrid:
    """Parse an ``RLGRID 1`` file."""
    with open(path, "r", encoding="ascii") as f:
        lines = f.read().split("\n")
    if not lines or lines[0] != MAGIC:
        raise GridFormatError(f"{path}: missing magic line {MAGIC!r}")
    header: dict[str, str] = {}
    idx = 1
    for key in HEADER_KEYS:
        if idx >= len(lines):
            raise GridFormatError(f"{path}: header ended before {key!r}")
        parts = lines[idx].split()
        if len(parts) != 2 or parts[0] != key:
            raise GridFormatError(f"{path}: expected '{key} <value>', got {lines[idx]!r}")
        header[key] = parts[1]
        idx += 1
    try:
        width = int(header["width"])
        height = int(header["height"])
        resolution = float(header["resolution"])
        origin = (float(header["origin_x"]), float(header["origin_y"]))
    except ValueError as e:
        raise GridFormatError(f"{path}: bad header value ({e})") from e
    if width < 1 or height < 1 or resolution <= 0:
        raise GridFormatError(f"{path}: illegal dimensions/resolution in header")

    rows = lines[idx : idx + height]
    if len(rows) < height:
        raise GridTruncationError(f"{path}: expected {height} payload rows, got {len(rows)}")
    cells = np.empty((height, width), dtype=bool)
    for r, line in enumerate(rows):
        if len(line) != width:
            raise GridTruncationError(
                f"{path}: payload row {r} has {len(line)} cells, expected {width}"
            )
        bad = set(line) - {"#", "."}
        if bad:
            raise GridFormatError(f"{path}: illegal payload characters {sorted(bad)}")
        cells[r] = np.frombuffer(line.encode("ascii"), dtype="S1") == b"#"
    trailing = [ln for ln in lines[idx + height :] if ln]
    if trailing:
        raise GridTruncationError(f"{path}: {len(trailing)} unexpected trailing lines")
    return OccupancyGrid(width, height, resolution, origin, cells)


def save_grid(grid: OccupancyGrid, path: str) -> None:
    """Write an ``RLGRID 1`` file (bit-exact round trip with load_grid)."""
    out = [
        MAGIC,
        f"width {grid.width_cells}",
        f"height {grid.height_cells}",
        f"resolution {_format_float(grid.resolution)}",
        f"origin_x {_format_float(grid.origin[0])}",
        f"origin_y {_format_float(grid.origin[1])}",
    ]
    glyphs = np.where(grid.cells, "#", ".")
    out.extend("".join(row) for row in glyphs)
    with open(path, "w", encoding="ascii", newline="\n") as f:
        f.write("\n".join(out) + "\n")
