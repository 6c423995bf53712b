#!/usr/bin/env python3
"""Regenerate the bundled track assets (grids + metadata sidecars).

Writes ``src/racelab/assets/<name>.grid`` and ``<name>.json`` for every
builtin design, then sanity-checks each grid by running the full track
pipeline on it. The free-cell count in the sidecar is recounted from the
written file's text, independently of the rasterizer.
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from racelab import build_track, load_grid, save_grid  # noqa: E402
from racelab.trackgen import BUILTIN_DESIGNS, design_metadata, rasterize  # noqa: E402


def main() -> int:
    assets = os.path.join(os.path.dirname(__file__), "..", "src", "racelab", "assets")
    os.makedirs(assets, exist_ok=True)
    for name, make in sorted(BUILTIN_DESIGNS.items()):
        design = make()
        grid = rasterize(design)
        grid_path = os.path.join(assets, f"{name}.grid")
        save_grid(grid, grid_path)

        meta = design_metadata(design, grid)
        with open(grid_path, "r", encoding="ascii") as f:
            text = f.read()
        dots = text.count(".")
        if dots != meta["free_cells"]:
            # resolution/origin floats may contain '.'; count payload only
            payload = "\n".join(text.splitlines()[6:])
            dots = payload.count(".")
        assert dots == meta["free_cells"], (name, dots, meta["free_cells"])
        with open(os.path.join(assets, f"{name}.json"), "w", encoding="ascii") as f:
            json.dump(meta, f, indent=2, sort_keys=True)
            f.write("\n")

        track = build_track(load_grid(grid_path), name=name)
        err = abs(track.center.length - design.design_length) / design.design_length
        print(
            f"{name}: {grid.width_cells}x{grid.height_cells} cells, "
            f"{meta['free_cells']} free; centerline {track.center.length:.2f} m "
            f"(design {design.design_length:.2f} m, {100 * err:.2f}% off); "
            f"width min {min(track.center.w_left + track.center.w_right):.2f} m"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
