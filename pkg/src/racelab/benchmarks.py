"""Benchmark orchestration: repeated evaluation laps and file reports.

Benchmark 1 evaluates on the empty track; Benchmark 2 spawns fresh random
obstacles every lap. Per-lap randomness derives from the root seed and the
lap index, so reports are exact functions of their configuration.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass
from statistics import fmean, pstdev
from typing import Callable

import numpy as np

from .config import ExperimentConfig, make_environment
from .errors import SnapshotError
from .mlp import load_snapshot
from .planners import FgmConfig, FgmPlanner, ModificationPlanner, PurePursuitPlanner
from .plots import emit_trajectory_plot
from .rewards import Terminal
from .simenv import Environment, run_episode, save_trajectory
from .track import Track


@dataclass(frozen=True)
class AgentSpec:
    """A named planner factory: env -> planner object."""

    name: str
    factory: Callable[[Environment], object]


@dataclass(frozen=True)
class AgentRow:
    name: str
    laps: int
    completed: int
    crashes: int
    timeouts: int
    avg_lap_time: float  # seconds over completed laps only (nan if none)
    std_lap_time: float

    @property
    def completion_rate(self) -> float:
        return 100.0 * self.completed / self.laps


@dataclass(frozen=True)
class BenchmarkReport:
    benchmark: int
    rows: tuple[AgentRow, ...]
    config_digest: str
    seed: int
    laps: int


def planner_spec(cfg: ExperimentConfig) -> AgentSpec:
    """The agent named by the config's ``planner`` key."""
    if cfg.planner == "pure_pursuit":
        return AgentSpec(
            "pure_pursuit",
            lambda env: PurePursuitPlanner(
                line=env.track.line_for(cfg.pf_reference),
                params=env.params,
                lookahead=cfg.lookahead,
                max_range=env.max_range,
            ),
        )
    if cfg.planner == "fgm":
        fgm = FgmConfig(
            bubble_radius=cfg.fgm_bubble,
            floor_speed=cfg.fgm_floor,
            fov=cfg.fov,
            top_speed=cfg.fgm_top_speed,
            target=cfg.fgm_target,
        )
        return AgentSpec(
            "fgm",
            lambda env: FgmPlanner(
                params=env.params,
                config=fgm,
                max_range=env.max_range,
                crop_beams=cfg.fgm_crop,
            ),
        )
    if not cfg.snapshot:
        raise SnapshotError("modification planner needs an actor snapshot path")
    actor = load_snapshot(cfg.snapshot)
    return AgentSpec(
        "modification",
        lambda env: ModificationPlanner(
            actor=lambda o: float(actor.forward(o)[0]),
            line=env.track.line_for(cfg.pf_reference),
            params=env.params,
            lookahead=cfg.lookahead,
            max_range=env.max_range,
        ),
    )


def evaluate_agent(
    spec: AgentSpec,
    env: Environment,
    cfg: ExperimentConfig,
    laps: int,
    out_dir: str | None = None,
) -> AgentRow:
    """Run ``laps`` episodes; lap ``k`` uses seed ``SeedSequence([seed, k])``."""
    planner = spec.factory(env)
    lap_times = []
    crashes = timeouts = 0
    for lap in range(laps):
        rng = np.random.default_rng(np.random.SeedSequence([cfg.seed, lap]))
        outcome, transitions = run_episode(planner, cfg.reward, env, rng)
        if outcome.terminal is Terminal.LAP_COMPLETE:
            lap_times.append(outcome.lap_time)
        elif outcome.terminal is Terminal.CRASH:
            crashes += 1
        else:
            timeouts += 1
        if lap == 0 and out_dir is not None:
            base = os.path.join(out_dir, f"traj_{spec.name}")
            save_trajectory(base + ".csv", outcome, transitions)
            xy = np.array([(s.x, s.y) for s in outcome.trajectory])
            emit_trajectory_plot(
                xy,
                env.track,
                env.track.line_for(cfg.pf_reference),
                base + ".svg",
                obstacles=list(outcome.obstacles),
            )
    return AgentRow(
        name=spec.name,
        laps=laps,
        completed=len(lap_times),
        crashes=crashes,
        timeouts=timeouts,
        avg_lap_time=fmean(lap_times) if lap_times else float("nan"),
        std_lap_time=pstdev(lap_times) if lap_times else float("nan"),
    )


def _run_benchmark(
    benchmark: int,
    cfg: ExperimentConfig,
    track: Track,
    agents: list[AgentSpec] | None,
    out_dir: str | None,
    digest: str,
) -> BenchmarkReport:
    obstacles = benchmark == 2
    env = dataclasses.replace(make_environment(cfg, track), obstacles_enabled=obstacles)
    if agents is None:
        agents = [planner_spec(cfg)]
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
    rows = tuple(
        evaluate_agent(spec, env, cfg, cfg.laps, out_dir) for spec in agents
    )
    report = BenchmarkReport(
        benchmark=benchmark,
        rows=rows,
        config_digest=digest,
        seed=cfg.seed,
        laps=cfg.laps,
    )
    if out_dir is not None:
        write_report(report, out_dir)
    return report


def run_benchmark1(
    cfg: ExperimentConfig,
    track: Track,
    agents: list[AgentSpec] | None = None,
    out_dir: str | None = None,
    digest: str = "",
) -> BenchmarkReport:
    """Obstacle-free evaluation (lap time focus)."""
    return _run_benchmark(1, cfg, track, agents, out_dir, digest)


def run_benchmark2(
    cfg: ExperimentConfig,
    track: Track,
    agents: list[AgentSpec] | None = None,
    out_dir: str | None = None,
    digest: str = "",
) -> BenchmarkReport:
    """Random-obstacle evaluation (completion focus)."""
    return _run_benchmark(2, cfg, track, agents, out_dir, digest)


def format_report(report: BenchmarkReport) -> str:
    """Aligned plain-text table, Table-III/IV style."""
    title = "no obstacles" if report.benchmark == 1 else "random obstacles"
    lines = [
        f"Benchmark {report.benchmark} ({title})",
        f"laps per agent: {report.laps}    root seed: {report.seed}",
        f"config digest: {report.config_digest or '-'}",
        "",
        f"{'agent':<14} {'laps':>5} {'done':>5} {'crash':>5} {'t/out':>5} "
        f"{'completion':>11} {'avg lap':>9} {'std':>7}",
    ]
    for r in report.rows:
        avg = f"{r.avg_lap_time:.2f} s" if r.completed else "-"
        std = f"{r.std_lap_time:.2f}" if r.completed else "-"
        lines.append(
            f"{r.name:<14} {r.laps:>5} {r.completed:>5} {r.crashes:>5} "
            f"{r.timeouts:>5} {r.completion_rate:>10.1f}% {avg:>9} {std:>7}"
        )
    return "\n".join(lines) + "\n"


def write_report(report: BenchmarkReport, out_dir: str) -> None:
    """``report.txt`` (aligned) and ``report.csv`` (machine-readable)."""
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "report.txt"), "w", encoding="ascii", newline="\n") as f:
        f.write(format_report(report))
    with open(os.path.join(out_dir, "report.csv"), "w", encoding="ascii", newline="\n") as f:
        f.write(
            "name,laps,completed,crashes,timeouts,"
            "completion_rate,avg_lap_time,std_lap_time\n"
        )
        for r in report.rows:
            f.write(
                f"{r.name},{r.laps},{r.completed},{r.crashes},{r.timeouts},"
                f"{r.completion_rate:.9g},{r.avg_lap_time:.9g},{r.std_lap_time:.9g}\n"
            )
