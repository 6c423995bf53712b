"""Benchmark harness: per-lap seeding, report tables, and file outputs."""

from __future__ import annotations

import dataclasses
import math
import os

import numpy as np
import pytest

from racelab import (
    ActionCommand,
    Environment,
    FgmPlanner,
    Mlp,
    PurePursuitPlanner,
    SnapshotError,
    save_snapshot,
)
from racelab.benchmarks import (
    AgentRow,
    AgentSpec,
    BenchmarkReport,
    evaluate_agent,
    format_report,
    planner_spec,
    run_benchmark1,
    run_benchmark2,
    write_report,
)
from racelab.config import ExperimentConfig
from racelab.simenv import Decision


class HardLockPlanner:
    """Steers at full lock from a standstill: crashes within a few meters."""

    def plan(self, state, scan):
        return Decision(ActionCommand(v_ref=7.0, delta_ref=0.4), np.zeros(4), 0.0)


def lock_spec():
    return AgentSpec("lock", lambda env: HardLockPlanner())


def row(name="pp", laps=4, completed=2, crashes=1, timeouts=1, avg=20.0, std=1.0):
    return AgentRow(name, laps, completed, crashes, timeouts, avg, std)


class TestRowsAndFormat:
    def test_completion_rate(self):
        assert row(laps=4, completed=2).completion_rate == 50.0
        assert row(laps=8, completed=8, crashes=0, timeouts=0).completion_rate == 100.0

    def test_table_shows_times_for_completed_agents(self):
        rep = BenchmarkReport(1, (row(avg=21.37, std=0.25),), "abc123", 5, 4)
        text = format_report(rep)
        assert "Benchmark 1 (no obstacles)" in text
        assert "config digest: abc123" in text
        assert "21.37 s" in text and "0.25" in text
        assert "50.0%" in text

    def test_table_dashes_when_nothing_completed(self):
        r = row(completed=0, crashes=4, timeouts=0, avg=float("nan"), std=float("nan"))
        text = format_report(BenchmarkReport(2, (r,), "", 1, 4))
        assert "Benchmark 2 (random obstacles)" in text
        assert "config digest: -" in text
        line = [ln for ln in text.splitlines() if ln.startswith("pp")][0]
        assert line.rstrip().endswith("-") and " - " in line + " "
        assert "nan" not in text

    def test_written_files(self, tmp_path):
        rep = BenchmarkReport(1, (row(),), "deadbeef", 2, 4)
        write_report(rep, str(tmp_path))
        txt = (tmp_path / "report.txt").read_text()
        csv = (tmp_path / "report.csv").read_text().splitlines()
        assert txt == format_report(rep)
        assert csv[0] == (
            "name,laps,completed,crashes,timeouts,"
            "completion_rate,avg_lap_time,std_lap_time"
        )
        assert csv[1] == "pp,4,2,1,1,50,20,1"


class TestPlannerSpec:
    def test_pure_pursuit_factory(self, oval_track):
        cfg = ExperimentConfig(planner="pure_pursuit", lookahead=1.5)
        spec = planner_spec(cfg)
        assert spec.name == "pure_pursuit"
        planner = spec.factory(Environment(oval_track))
        assert isinstance(planner, PurePursuitPlanner)
        assert planner.lookahead == 1.5

    def test_fgm_factory(self, oval_track):
        cfg = ExperimentConfig(planner="fgm", fgm_bubble=0.9, fgm_crop=1)
        planner = planner_spec(cfg).factory(Environment(oval_track))
        assert isinstance(planner, FgmPlanner)
        assert planner.config.bubble_radius == 0.9
        assert planner.crop_beams == 1

    def test_modification_requires_snapshot(self):
        with pytest.raises(SnapshotError):
            planner_spec(ExperimentConfig(planner="modification", snapshot=""))

    def test_modification_loads_actor(self, oval_track, tmp_path):
        net = Mlp.create([14, 8, 1], np.random.default_rng(0), output_tanh=True)
        snap = str(tmp_path / "actor.snapshot")
        save_snapshot(net, snap)
        cfg = ExperimentConfig(planner="modification", snapshot=snap)
        spec = planner_spec(cfg)
        assert spec.name == "modification"
        planner = spec.factory(Environment(oval_track))
        obs = np.zeros(14)
        assert planner.actor(obs) == pytest.approx(float(net.forward(obs)[0]))


class TestEvaluateAgent:
    def test_counts_partition_the_laps(self, oval_track):
        cfg = ExperimentConfig(laps=2, timeout=5.0)
        env = Environment(oval_track, timeout=5.0)
        r = evaluate_agent(lock_spec(), env, cfg, laps=2)
        assert r.laps == 2
        assert r.completed + r.crashes + r.timeouts == 2
        assert r.crashes == 2  # full lock from standstill always hits the wall
        assert math.isnan(r.avg_lap_time) and math.isnan(r.std_lap_time)

    def test_deterministic_per_lap_seeds(self, oval_track):
        cfg = ExperimentConfig(laps=2, seed=9)
        env = Environment(oval_track)
        spec = planner_spec(dataclasses.replace(cfg, planner="pure_pursuit"))
        a = evaluate_agent(spec, env, cfg, laps=2)
        b = evaluate_agent(spec, env, cfg, laps=2)
        assert a == b
        assert a.completed == 2
        assert a.avg_lap_time > 0.0

    def test_first_lap_artifacts_written(self, oval_track, tmp_path):
        cfg = ExperimentConfig(laps=1, timeout=5.0)
        env = Environment(oval_track, timeout=5.0)
        evaluate_agent(lock_spec(), env, cfg, laps=1, out_dir=str(tmp_path))
        assert (tmp_path / "traj_lock.csv").exists()
        assert (tmp_path / "traj_lock.svg").exists()


@pytest.mark.slow
class TestBenchmarks:
    def test_benchmark1_report_and_files(self, oval_track, tmp_path):
        cfg = ExperimentConfig(laps=1)
        rep = run_benchmark1(cfg, oval_track, out_dir=str(tmp_path), digest="cafe")
        assert rep.benchmark == 1 and rep.laps == 1 and rep.config_digest == "cafe"
        assert rep.rows[0].name == "pure_pursuit"
        assert rep.rows[0].completed == 1
        for f in ("report.txt", "report.csv", "traj_pure_pursuit.csv",
                  "traj_pure_pursuit.svg"):
            assert (tmp_path / f).exists()
        assert "cafe" in (tmp_path / "report.txt").read_text()

    def test_benchmark2_spawns_obstacles_and_is_deterministic(self, oval_track):
        cfg = ExperimentConfig(
            planner="fgm", laps=2, seed=3, timeout=40.0, fgm_top_speed=3.0
        )
        a = run_benchmark2(cfg, oval_track)
        b = run_benchmark2(cfg, oval_track)
        assert a.rows == b.rows
        assert a.benchmark == 2
        assert a.rows[0].laps == 2

    def test_agents_override_replaces_config_planner(self, oval_track):
        cfg = ExperimentConfig(laps=1, timeout=5.0)
        rep = run_benchmark1(cfg, oval_track, agents=[lock_spec()])
        assert [r.name for r in rep.rows] == ["lock"]
        assert rep.rows[0].crashes == 1
