"""The terminal reward and the four racing-reward variants."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from racelab import (
    LineRelation,
    RaceLine,
    RewardConfig,
    StepContext,
    Terminal,
    compute_reward,
)
from racelab.geometry import cumulative_arclength
from racelab.rewards import cth_reward, distance_reward, steering_reward, terminal_reward


def square_line(side=25.0, step=1.0):
    """Closed square loop; side=25 gives s_total = 100 exactly."""
    n = int(side / step)
    pts = []
    for k in range(n):
        pts.append((k * step, 0.0))
    for k in range(n):
        pts.append((side, k * step))
    for k in range(n):
        pts.append((side - k * step, side))
    for k in range(n):
        pts.append((0.0, side - k * step))
    pts = np.array(pts)
    return RaceLine(waypoints=pts, speeds=np.full(len(pts), 5.0),
                    s=cumulative_arclength(pts))


LINE100 = square_line()


def ctx(
    s_prev=0.0,
    s_next=0.0,
    speed=0.0,
    delta_ref=0.0,
    theta=0.0,
    d_c=0.0,
    terminal=None,
    line=LINE100,
    max_speed=7.0,
    max_steer=0.4,
    width_scale=3.2,
    decision_period=0.1,
):
    return StepContext(
        prev_relation=LineRelation(s=s_prev, d_c=d_c, theta=theta, segment_index=0),
        next_relation=LineRelation(s=s_next, d_c=d_c, theta=theta, segment_index=0),
        speed=speed,
        delta_ref=delta_ref,
        terminal=terminal,
        line=line,
        max_speed=max_speed,
        max_steer=max_steer,
        width_scale=width_scale,
        decision_period=decision_period,
    )


class TestTerminalReward:
    def test_crash_is_exactly_minus_one(self):
        assert terminal_reward(Terminal.CRASH) == -1.0

    def test_lap_complete_is_exactly_plus_one(self):
        assert terminal_reward(Terminal.LAP_COMPLETE) == 1.0

    def test_timeout_is_not_a_terminal_reward(self):
        with pytest.raises(ValueError):
            terminal_reward(Terminal.TIMEOUT)


class TestDistanceReward:
    def test_half_metre_on_hundred_metre_lap(self):
        cfg = RewardConfig(variant="distance", beta_distance=0.5)
        r = distance_reward(ctx(s_prev=10.0, s_next=10.5, speed=5.0), cfg)
        assert r == pytest.approx(0.0025, abs=1e-15)

    def test_stationary_vehicle_earns_nothing(self):
        cfg = RewardConfig(variant="distance")
        assert distance_reward(ctx(s_prev=10.0, s_next=10.0), cfg) == 0.0

    def test_start_line_crossing_wraps(self):
        cfg = RewardConfig(variant="distance", beta_distance=0.5)
        r = distance_reward(ctx(s_prev=99.8, s_next=0.2, speed=5.0), cfg)
        assert r == pytest.approx(0.5 * 0.4 / 100.0, abs=1e-15)

    def test_backward_motion_is_penalized(self):
        cfg = RewardConfig(variant="distance", beta_distance=0.5)
        assert distance_reward(ctx(s_prev=10.0, s_next=9.7), cfg) < 0.0

    @settings(max_examples=60)
    @given(
        seed=st.integers(0, 10_000),
        n_steps=st.integers(300, 500),
    )
    def test_telescopes_to_beta_over_a_lap(self, seed, n_steps):
        rng = np.random.default_rng(seed)
        cfg = RewardConfig(variant="distance", beta_distance=0.5)
        # random forward-progress schedule summing to one lap, with every
        # step inside what the vehicle can physically cover in a period
        raw = 0.5 + 0.5 * rng.random(n_steps)
        increments = raw * (100.0 / raw.sum())
        assert increments.max() <= 0.1 * 7.0
        s = rng.uniform(0.0, 100.0)
        total = 0.0
        for inc in increments:
            nxt = (s + inc) % 100.0
            total += distance_reward(ctx(s_prev=s, s_next=nxt, speed=7.0), cfg)
            s = nxt
        assert total == pytest.approx(0.5, abs=1e-9)


class TestCthReward:
    def test_aligned_on_line_at_full_speed(self):
        cfg = RewardConfig(variant="cth")
        r = cth_reward(ctx(speed=7.0, theta=0.0, d_c=0.0), cfg)
        assert r == pytest.approx(0.04, abs=1e-15)

    def test_orthogonal_heading_kills_the_velocity_term(self):
        cfg = RewardConfig(variant="cth")
        r = cth_reward(ctx(speed=7.0, theta=math.pi / 2.0, d_c=0.0), cfg)
        assert abs(r) < 1e-12

    def test_stationary_at_half_width(self):
        cfg = RewardConfig(variant="cth")
        r = cth_reward(ctx(speed=0.0, d_c=0.5 * 3.2), cfg)
        assert r == pytest.approx(-0.002, abs=1e-15)

    def test_monotone_in_speed_and_cross_track(self):
        cfg = RewardConfig(variant="cth")
        speeds = np.linspace(0.0, 7.0, 15)
        rs = [cth_reward(ctx(speed=v, theta=0.3, d_c=0.4), cfg) for v in speeds]
        assert np.all(np.diff(rs) > 0.0)
        dcs = np.linspace(0.0, 1.6, 15)
        rs = [cth_reward(ctx(speed=3.0, theta=0.3, d_c=d), cfg) for d in dcs]
        assert np.all(np.diff(rs) < 0.0)


class TestSteeringReward:
    def test_zero_steering_is_free(self):
        cfg = RewardConfig(variant="steer")
        assert steering_reward(ctx(delta_ref=0.0), cfg) == 0.0

    def test_full_lock_costs_beta(self):
        cfg = RewardConfig(variant="steer")
        assert steering_reward(ctx(delta_ref=0.4), cfg) == pytest.approx(
            -0.01, abs=1e-15
        )
        assert steering_reward(ctx(delta_ref=-0.4), cfg) == pytest.approx(
            -0.01, abs=1e-15
        )

    @settings(max_examples=60)
    @given(delta=st.floats(-0.4, 0.4))
    def test_never_positive(self, delta):
        cfg = RewardConfig(variant="steer")
        assert steering_reward(ctx(delta_ref=delta), cfg) <= 0.0


class TestComputeReward:
    def test_none_variant_is_silent(self):
        cfg = RewardConfig(variant="none")
        assert compute_reward(ctx(s_prev=1.0, s_next=2.0, speed=5.0), cfg) == 0.0

    def test_terminal_dominates_any_variant(self):
        for variant in ("none", "distance", "cth", "steer"):
            cfg = RewardConfig(variant=variant)
            crash = ctx(s_prev=1.0, s_next=2.0, speed=5.0, delta_ref=0.3,
                        terminal=Terminal.CRASH)
            lap = ctx(s_prev=1.0, s_next=2.0, speed=5.0, delta_ref=0.3,
                      terminal=Terminal.LAP_COMPLETE)
            assert compute_reward(crash, cfg) == -1.0
            assert compute_reward(lap, cfg) == 1.0

    def test_dispatch_matches_each_variant(self):
        c = ctx(s_prev=3.0, s_next=3.4, speed=4.0, delta_ref=0.2, theta=0.2, d_c=0.3)
        assert compute_reward(c, RewardConfig(variant="distance")) == distance_reward(
            c, RewardConfig(variant="distance")
        )
        assert compute_reward(c, RewardConfig(variant="cth")) == cth_reward(
            c, RewardConfig(variant="cth")
        )
        assert compute_reward(c, RewardConfig(variant="steer")) == steering_reward(
            c, RewardConfig(variant="steer")
        )

    def test_pure_function(self):
        cfg = RewardConfig(variant="cth")
        c = ctx(speed=3.0, theta=0.1, d_c=0.2)
        assert compute_reward(c, cfg) == compute_reward(c, cfg)


class TestScaleIndependence:
    def test_doubling_vehicle_and_track_leaves_rewards_unchanged(self):
        big_line = square_line(side=50.0)  # s_total = 200
        for variant in ("distance", "cth", "steer"):
            cfg = RewardConfig(variant=variant)
            small = ctx(
                s_prev=10.0, s_next=10.5, speed=3.5, delta_ref=0.2,
                theta=0.25, d_c=0.4,
            )
            big = ctx(
                s_prev=20.0, s_next=21.0, speed=7.0, delta_ref=0.4,
                theta=0.25, d_c=0.8, line=big_line,
                max_speed=14.0, max_steer=0.8, width_scale=6.4,
            )
            assert compute_reward(big, cfg) == pytest.approx(
                compute_reward(small, cfg), abs=1e-9
            )


class TestRewardConfigValidation:
    def test_unknown_variant_rejected(self):
        with pytest.raises(ValueError):
            RewardConfig(variant="speed")

    def test_unknown_reference_rejected(self):
        with pytest.raises(ValueError):
            RewardConfig(variant="distance", reference="outer")

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            RewardConfig(variant="distance", beta_distance=-0.1)

    def test_table_defaults(self):
        cfg = RewardConfig(variant="distance")
        assert (cfg.beta_distance, cfg.beta_heading,
                cfg.beta_cross_track, cfg.beta_steering) == (0.5, 0.04, 0.004, 0.01)
        assert cfg.reference == "center"


class TestBounds:
    @settings(max_examples=80)
    @given(
        s=st.floats(0.0, 99.99),
        progress=st.floats(-0.7, 0.7),
        speed=st.floats(0.0, 7.0),
        delta=st.floats(-0.4, 0.4),
        theta=st.floats(-math.pi, math.pi),
        d_c=st.floats(0.0, 1.6),
    )
    def test_racing_rewards_obey_documented_bounds(
        self, s, progress, speed, delta, theta, d_c
    ):
        c = ctx(
            s_prev=s, s_next=(s + progress) % 100.0, speed=speed,
            delta_ref=delta, theta=theta, d_c=d_c,
        )
        r_d = compute_reward(c, RewardConfig(variant="distance"))
        assert abs(r_d) <= 0.5 * (0.1 * 7.0) / 100.0 + 1e-12
        r_c = compute_reward(c, RewardConfig(variant="cth"))
        assert abs(r_c) <= 0.04 + 0.004 + 1e-12
        r_s = compute_reward(c, RewardConfig(variant="steer"))
        assert -0.01 - 1e-12 <= r_s <= 0.0
