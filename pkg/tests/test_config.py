"""Config files: parsing, defaults, digests, and environment construction."""

from __future__ import annotations

import glob
import math

import pytest

from racelab.config import (
    ExperimentConfig,
    config_digest,
    default_config_text,
    load_experiment,
    make_environment,
)


def write(tmp_path, text, name="exp.ini"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


MINIMAL = """\
[track]
asset = oval

[eval]
planner = fgm
laps = 7
"""


class TestDigest:
    def test_sixteen_hex_chars(self):
        d = config_digest(default_config_text())
        assert len(d) == 16
        assert all(c in "0123456789abcdef" for c in d)

    def test_comments_and_whitespace_do_not_matter(self):
        a = "[eval]\nlaps = 5\nseed = 2\n"
        b = "; a run\n[eval]\n\nseed=2   # the rng seed\nlaps   =   5\n"
        assert config_digest(a) == config_digest(b)

    def test_section_and_key_order_do_not_matter(self):
        a = "[track]\nasset = oval\n[eval]\nlaps = 5\nseed = 2\n"
        b = "[eval]\nseed = 2\nlaps = 5\n[track]\nasset = oval\n"
        assert config_digest(a) == config_digest(b)

    def test_every_value_change_matters(self):
        base = "[eval]\nlaps = 5\nseed = 2\n"
        assert config_digest(base) != config_digest("[eval]\nlaps = 6\nseed = 2\n")
        assert config_digest(base) != config_digest("[eval]\nlaps = 5\nseed = 3\n")
        assert config_digest(base) != config_digest("[train]\nlaps = 5\nseed = 2\n")

    def test_file_and_text_agree(self, tmp_path):
        text = default_config_text()
        path = write(tmp_path, text)
        assert config_digest(path) == config_digest(text)


class TestLoadExperiment:
    def test_default_text_round_trips_documented_values(self, tmp_path):
        cfg = load_experiment(write(tmp_path, default_config_text()))
        assert cfg.track_asset == "oval"
        assert cfg.spacing == 0.2 and cfg.margin == 0.3
        assert (cfg.limits.v_max, cfg.limits.a_lat_max, cfg.limits.a_long_max) == (
            7.0,
            8.0,
            6.0,
        )
        assert cfg.vehicle.wheelbase == 0.33 and cfg.vehicle.max_steer == 0.4
        assert cfg.reward.variant == "distance"
        assert cfg.reward.reference == "center"
        assert (
            cfg.reward.beta_distance,
            cfg.reward.beta_heading,
            cfg.reward.beta_cross_track,
            cfg.reward.beta_steering,
        ) == (0.5, 0.04, 0.004, 0.01)
        assert cfg.td3.gamma == 0.99 and cfg.td3.batch == 100
        assert cfg.planner == "pure_pursuit"
        assert cfg.laps == 100 and cfg.obstacles is False
        assert cfg.pf_reference == "center"
        assert cfg.fov == math.pi and cfg.n_beams == 10
        assert cfg.snapshot == ""
        assert cfg.fgm_target == "farthest" and cfg.fgm_crop == 2

    def test_empty_file_gives_all_defaults(self, tmp_path):
        cfg = load_experiment(write(tmp_path, ""))
        assert cfg == ExperimentConfig(reward=cfg.reward, td3=cfg.td3,
                                       vehicle=cfg.vehicle, limits=cfg.limits)
        assert cfg.reward.variant == "none"

    def test_partial_file_keeps_other_defaults(self, tmp_path):
        cfg = load_experiment(write(tmp_path, MINIMAL))
        assert cfg.planner == "fgm" and cfg.laps == 7
        assert cfg.seed == 1 and cfg.dt == 0.01

    def test_bool_spellings(self, tmp_path):
        for raw, expect in [("on", True), ("true", True), ("1", True), ("yes", True),
                            ("off", False), ("false", False), ("0", False), ("no", False)]:
            cfg = load_experiment(write(tmp_path, f"[eval]\nobstacles = {raw}\n"))
            assert cfg.obstacles is expect
        with pytest.raises(ValueError):
            load_experiment(write(tmp_path, "[eval]\nobstacles = maybe\n"))

    def test_blank_value_falls_back_to_default(self, tmp_path):
        cfg = load_experiment(write(tmp_path, "[eval]\nsnapshot =\nlookahead =\n"))
        assert cfg.snapshot == "" and cfg.lookahead == 1.5

    def test_unknown_planner_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            load_experiment(write(tmp_path, "[eval]\nplanner = mpc\n"))

    def test_nonpositive_laps_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            load_experiment(write(tmp_path, "[eval]\nlaps = 0\n"))

    def test_missing_file_raises(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_experiment(str(tmp_path / "nope.ini"))

    def test_bad_reward_variant_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            load_experiment(write(tmp_path, "[reward]\nreward = bonus\n"))

    def test_shipped_configs_parse(self):
        paths = sorted(glob.glob("configs/*.ini"))
        assert paths, "shipped configs are missing"
        for p in paths:
            cfg = load_experiment(p)
            assert cfg.track_asset == "oval"
            assert cfg.pf_reference == "center"
            assert cfg.reward.variant in {"distance", "none"}


class TestMakeEnvironment:
    def test_fields_map_through(self, oval_track, tmp_path):
        text = (
            "[eval]\ntimeout = 12.5\ndt = 0.02\nplanner_period = 5\n"
            "n_beams = 12\nfov = 2.0\nmax_range = 5.0\n"
            "footprint_radius = 0.2\nobstacles = on\n"
        )
        cfg = load_experiment(write(tmp_path, text))
        env = make_environment(cfg, oval_track)
        assert env.track is oval_track
        assert env.params == cfg.vehicle
        assert env.timeout == 12.5 and env.dt == 0.02
        assert env.planner_period == 5 and env.n_beams == 12
        assert env.fov == 2.0 and env.max_range == 5.0
        assert env.footprint_radius == 0.2
        assert env.obstacles_enabled is True
        assert env.spawn == cfg.spawn
