"""Experiment configuration: sectioned key=value files and content digests.

Sections are ``[track] [vehicle] [reward] [td3] [eval]``. The digest hashes
the *parsed* key/value pairs (sorted, canonically formatted), so comments and
whitespace do not change a run's identity, but every semantic value does.
"""

from __future__ import annotations

import configparser
import hashlib
import math
import os
from dataclasses import dataclass, field

from .raceline import SpeedLimits
from .rewards import RewardConfig
from .simenv import Environment, SpawnRules, VehicleParams
from .td3 import Td3Config

PLANNERS = ("pure_pursuit", "fgm", "modification")


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one train/eval run needs, as parsed from one file."""

    track_asset: str = "oval"
    spacing: float = 0.2
    margin: float = 0.3
    limits: SpeedLimits = field(default_factory=SpeedLimits)
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    reward: RewardConfig = field(default_factory=RewardConfig)
    td3: Td3Config = field(default_factory=Td3Config)
    planner: str = "pure_pursuit"
    laps: int = 100
    obstacles: bool = False
    seed: int = 1
    train_seed: int = 1
    lookahead: float = 1.5
    pf_reference: str = "center"
    timeout: float = 60.0
    dt: float = 0.01
    planner_period: int = 10
    n_beams: int = 10
    fov: float = math.pi
    max_range: float = 4.0
    footprint_radius: float = 0.15
    snapshot: str = ""
    fgm_bubble: float = 0.7
    fgm_floor: float = 1.0
    fgm_top_speed: float | None = 3.0
    fgm_target: str = "farthest"
    fgm_crop: int = 2
    spawn: SpawnRules = field(default_factory=SpawnRules)

    def __post_init__(self):
        if self.planner not in PLANNERS:
            raise ValueError(f"planner must be one of {PLANNERS}, got {self.planner!r}")
        if self.laps < 1:
            raise ValueError("laps must be >= 1")


def _parser() -> configparser.ConfigParser:
    return configparser.ConfigParser(inline_comment_prefixes=("#",))


def default_config_text() -> str:
    """A complete, commented config with every default value."""
    return """\
[track]
asset = oval            # bundled track name or path to a .grid file
spacing = 0.2           # centerline resample spacing (m)
margin = 0.3            # raceline wall margin (m)
v_max = 7.0             # speed-profile limits
a_lat_max = 8.0
a_long_max = 6.0

[vehicle]
wheelbase = 0.33
max_steer = 0.4
max_speed = 7.0
max_steer_rate = 3.2
max_accel = 7.0
k_v = 10.0
k_delta = 10.0

[reward]
reward = distance       # none | distance | cth | steer
reference = center      # center | mincurve
beta_distance = 0.5
beta_heading = 0.04
beta_cross_track = 0.004
beta_steering = 0.01

[td3]
gamma = 0.99
tau = 0.005
policy_noise = 0.2
noise_clip = 0.5
policy_delay = 2
exploration_noise = 0.1
batch = 100
total_steps = 100000
warmup = 1000
actor_lr = 0.001
critic_lr = 0.001

[eval]
planner = pure_pursuit  # pure_pursuit | fgm | modification
laps = 100
obstacles = off
seed = 1
train_seed = 1
lookahead = 1.5
pf_reference = center   # line the path follower tracks: center | mincurve
timeout = 60.0
dt = 0.01
planner_period = 10
n_beams = 10
fov = 3.141592653589793
max_range = 4.0
footprint_radius = 0.15
snapshot =              # actor snapshot for the modification planner
fgm_bubble = 0.7        # bubble radius (m) masked around the nearest return
fgm_floor = 1.0         # speed at full steering lock (m/s)
fgm_top_speed = 3.0     # empty = vehicle max speed
fgm_target = farthest   # aim point within the chosen gap: center | farthest
fgm_crop = 2            # beams dropped from each scan end before gap finding
"""


def _items(cp: configparser.ConfigParser) -> list[tuple[str, str, str]]:
    out = []
    for section in sorted(cp.sections()):
        for key in sorted(cp[section]):
            out.append((section, key, cp[section][key].strip()))
    return out


def config_digest(path_or_text: str) -> str:
    """Hex digest of the parsed config's sorted key/value pairs."""
    cp = _parser()
    if os.path.exists(path_or_text):
        cp.read(path_or_text)
    else:
        cp.read_string(path_or_text)
    blob = "\n".join(f"{s}.{k} = {v}" for s, k, v in _items(cp))
    return hashlib.sha256(blob.encode("ascii")).hexdigest()[:16]


def load_experiment(path: str) -> ExperimentConfig:
    cp = _parser()
    with open(path, "r", encoding="ascii") as f:
        cp.read_file(f)

    def get(section, key, conv, default):
        if not cp.has_option(section, key):
            return default
        raw = cp[section][key].strip()
        if raw == "":
            return default
        if conv is bool:
            if raw.lower() in ("1", "on", "true", "yes"):
                return True
            if raw.lower() in ("0", "off", "false", "no"):
                return False
            raise ValueError(f"[{section}] {key}: expected on/off, got {raw!r}")
        return conv(raw)

    limits = SpeedLimits(
        v_max=get("track", "v_max", float, 7.0),
        a_lat_max=get("track", "a_lat_max", float, 8.0),
        a_long_max=get("track", "a_long_max", float, 6.0),
    )
    vehicle = VehicleParams(
        wheelbase=get("vehicle", "wheelbase", float, 0.33),
        max_steer=get("vehicle", "max_steer", float, 0.4),
        max_speed=get("vehicle", "max_speed", float, 7.0),
        max_steer_rate=get("vehicle", "max_steer_rate", float, 3.2),
        max_accel=get("vehicle", "max_accel", float, 7.0),
        k_v=get("vehicle", "k_v", float, 10.0),
        k_delta=get("vehicle", "k_delta", float, 10.0),
    )
    reward = RewardConfig(
        variant=get("reward", "reward", str, "none"),
        reference=get("reward", "reference", str, "center"),
        beta_distance=get("reward", "beta_distance", float, 0.5),
        beta_heading=get("reward", "beta_heading", float, 0.04),
        beta_cross_track=get("reward", "beta_cross_track", float, 0.004),
        beta_steering=get("reward", "beta_steering", float, 0.01),
    )
    td3 = Td3Config(
        gamma=get("td3", "gamma", float, 0.99),
        tau=get("td3", "tau", float, 0.005),
        policy_noise=get("td3", "policy_noise", float, 0.2),
        noise_clip=get("td3", "noise_clip", float, 0.5),
        policy_delay=get("td3", "policy_delay", int, 2),
        exploration_noise=get("td3", "exploration_noise", float, 0.1),
        batch=get("td3", "batch", int, 100),
        total_steps=get("td3", "total_steps", int, 100_000),
        warmup=get("td3", "warmup", int, 1000),
        actor_lr=get("td3", "actor_lr", float, 1e-3),
        critic_lr=get("td3", "critic_lr", float, 1e-3),
    )
    return ExperimentConfig(
        track_asset=get("track", "asset", str, "oval"),
        spacing=get("track", "spacing", float, 0.2),
        margin=get("track", "margin", float, 0.3),
        limits=limits,
        vehicle=vehicle,
        reward=reward,
        td3=td3,
        planner=get("eval", "planner", str, "pure_pursuit"),
        laps=get("eval", "laps", int, 100),
        obstacles=get("eval", "obstacles", bool, False),
        seed=get("eval", "seed", int, 1),
        train_seed=get("eval", "train_seed", int, 1),
        lookahead=get("eval", "lookahead", float, 1.5),
        pf_reference=get("eval", "pf_reference", str, "center"),
        timeout=get("eval", "timeout", float, 60.0),
        dt=get("eval", "dt", float, 0.01),
        planner_period=get("eval", "planner_period", int, 10),
        n_beams=get("eval", "n_beams", int, 10),
        fov=get("eval", "fov", float, math.pi),
        max_range=get("eval", "max_range", float, 4.0),
        footprint_radius=get("eval", "footprint_radius", float, 0.15),
        snapshot=get("eval", "snapshot", str, ""),
        fgm_bubble=get("eval", "fgm_bubble", float, 0.7),
        fgm_floor=get("eval", "fgm_floor", float, 1.0),
        fgm_top_speed=get("eval", "fgm_top_speed", float, 3.0),
        fgm_target=get("eval", "fgm_target", str, "farthest"),
        fgm_crop=get("eval", "fgm_crop", int, 2),
    )


def make_environment(cfg: ExperimentConfig, track) -> Environment:
    """Environment matching the config for an already-built track."""
    return Environment(
        track=track,
        params=cfg.vehicle,
        dt=cfg.dt,
        planner_period=cfg.planner_period,
        timeout=cfg.timeout,
        n_beams=cfg.n_beams,
        fov=cfg.fov,
        max_range=cfg.max_range,
        footprint_radius=cfg.footprint_radius,
        obstacles_enabled=cfg.obstacles,
        spawn=cfg.spawn,
    )
