"""Command-line interface.

Subcommands: ``track build``, ``raceline optimize``, ``train``, ``eval``,
``plot``, ``report``. Exit codes: 0 success, 1 runtime error, 2 usage error.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import trackgen
from .benchmarks import format_report, run_benchmark1, run_benchmark2
from .config import config_digest, load_experiment, make_environment
from .errors import RaceLabError
from .grid import load_grid
from .plots import emit_trajectory_plot, load_trajectory_xy
from .raceline import save_raceline
from .td3 import train
from .track import build_track, save_track


def _resolve_grid(name_or_path: str):
    if os.path.exists(name_or_path):
        return load_grid(name_or_path), os.path.splitext(os.path.basename(name_or_path))[0]
    if name_or_path in trackgen.asset_names():
        return trackgen.load_asset(name_or_path), name_or_path
    raise RaceLabError(
        f"{name_or_path!r} is neither a file nor a bundled track "
        f"(have {', '.join(trackgen.asset_names())})"
    )


def _load_track_for(cfg):
    grid, name = _resolve_grid(cfg.track_asset)
    return build_track(
        grid, name=name, spacing=cfg.spacing, margin=cfg.margin, limits=cfg.limits
    )


def _cmd_track_build(args) -> int:
    grid, name = _resolve_grid(args.grid)
    track = build_track(grid, name=name, spacing=args.spacing, margin=args.margin)
    out = args.out or f"{name}_track"
    save_track(track, out)
    print(
        f"built track {name!r}: length {track.center.length:.2f} m, "
        f"{len(track.center.interior_points)} waypoints -> {out}/"
    )
    return 0


def _cmd_raceline_optimize(args) -> int:
    grid, name = _resolve_grid(args.track)
    track = build_track(grid, name=name, spacing=args.spacing, margin=args.margin)
    out = args.out or f"{name}_raceline.csv"
    save_raceline(track.line_mincurve, out)
    lap = float(np.sum(np.linalg.norm(
        np.diff(np.vstack([track.line_mincurve.waypoints,
                           track.line_mincurve.waypoints[:1]]), axis=0), axis=1)))
    print(f"optimized raceline for {name!r}: {lap:.2f} m -> {out}")
    return 0


def _cmd_train(args) -> int:
    cfg = load_experiment(args.config)
    digest = config_digest(args.config)
    seed = args.seed if args.seed is not None else cfg.train_seed
    out_dir = args.out or os.path.join("runs", digest)
    os.makedirs(out_dir, exist_ok=True)
    track = _load_track_for(cfg)
    env = make_environment(cfg, track)
    snapshot = os.path.join(out_dir, "actor.snapshot")
    curve = os.path.join(out_dir, "curve.csv")
    print(f"training: digest {digest}, seed {seed}, out {out_dir}")
    _, records = train(
        env,
        cfg.reward,
        cfg.td3,
        seed,
        pf_reference=cfg.pf_reference,
        lookahead=cfg.lookahead,
        snapshot_path=snapshot,
        curve_path=curve,
    )
    done = sum(1 for r in records if r.outcome == "lap_complete")
    print(
        f"trained {len(records)} episodes ({done} laps completed); "
        f"snapshot -> {snapshot}, curve -> {curve}"
    )
    return 0


def _cmd_eval(args) -> int:
    cfg = load_experiment(args.config)
    digest = config_digest(args.config)
    out_dir = args.out or os.path.join("runs", digest)
    track = _load_track_for(cfg)
    runner = run_benchmark1 if args.benchmark == 1 else run_benchmark2
    report = runner(cfg, track, out_dir=out_dir, digest=digest)
    sys.stdout.write(format_report(report))
    print(f"report -> {os.path.join(out_dir, 'report.txt')}")
    return 0


def _cmd_plot(args) -> int:
    grid, name = _resolve_grid(args.track)
    track = build_track(grid, name=name)
    xy = load_trajectory_xy(args.log)
    out = args.out or os.path.splitext(args.log)[0] + ".svg"
    emit_trajectory_plot(xy, track, track.line_for(args.reference), out)
    print(f"plot -> {out}")
    return 0


def _cmd_report(args) -> int:
    path = os.path.join(args.dir, "report.txt")
    if not os.path.exists(path):
        raise RaceLabError(f"no report.txt under {args.dir!r}")
    with open(path, "r", encoding="ascii") as f:
        sys.stdout.write(f.read())
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="racelab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    p_track = sub.add_parser("track", help="track tooling")
    track_sub = p_track.add_subparsers(dest="track_command", required=True)
    p_build = track_sub.add_parser("build", help="grid -> centerline + racelines bundle")
    p_build.add_argument("grid", help="occupancy grid file or bundled track name")
    p_build.add_argument("--out", help="output directory (default <name>_track)")
    p_build.add_argument("--spacing", type=float, default=0.2)
    p_build.add_argument("--margin", type=float, default=0.3)
    p_build.set_defaults(func=_cmd_track_build)

    p_line = sub.add_parser("raceline", help="reference line tooling")
    line_sub = p_line.add_subparsers(dest="raceline_command", required=True)
    p_opt = line_sub.add_parser("optimize", help="write the minimum-curvature raceline")
    p_opt.add_argument("track", help="occupancy grid file or bundled track name")
    p_opt.add_argument("--out", help="output CSV (default <name>_raceline.csv)")
    p_opt.add_argument("--spacing", type=float, default=0.2)
    p_opt.add_argument("--margin", type=float, default=0.3)
    p_opt.set_defaults(func=_cmd_raceline_optimize)

    p_train = sub.add_parser("train", help="train a modification policy")
    p_train.add_argument("--config", required=True)
    p_train.add_argument("--seed", type=int, default=None, help="override train_seed")
    p_train.add_argument("--out", help="run directory (default runs/<digest>)")
    p_train.set_defaults(func=_cmd_train)

    p_eval = sub.add_parser("eval", help="run a benchmark")
    p_eval.add_argument("--benchmark", type=int, choices=(1, 2), required=True)
    p_eval.add_argument("--config", required=True)
    p_eval.add_argument("--out", help="run directory (default runs/<digest>)")
    p_eval.set_defaults(func=_cmd_eval)

    p_plot = sub.add_parser("plot", help="render a trajectory log over its track")
    p_plot.add_argument("log", help="trajectory CSV")
    p_plot.add_argument("track", help="occupancy grid file or bundled track name")
    p_plot.add_argument("--reference", choices=("center", "mincurve"), default="center")
    p_plot.add_argument("--out", help="output SVG (default <log>.svg)")
    p_plot.set_defaults(func=_cmd_plot)

    p_report = sub.add_parser("report", help="print the report in a run directory")
    p_report.add_argument("dir")
    p_report.set_defaults(func=_cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (RaceLabError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
