"""racelab: a desk-scale lab for reward-signal design in autonomous racing.

Occupancy-grid track tooling (centerline, minimum-curvature raceline, speed
profile), a deterministic kinematic-bicycle simulator with lidar and random
obstacles, classical planners, a four-variant racing-reward family, a
from-scratch TD3 learner, and a benchmark harness.
"""

from .centerline import Centerline, extract_centerline
from .errors import (
    GridFormatError,
    GridTruncationError,
    InfeasibleConstraintError,
    RaceLabError,
    SnapshotError,
    SpawnError,
    TrackTopologyError,
)
from .grid import OccupancyGrid, load_grid, save_grid
from .mlp import Mlp, adam_step, load_snapshot, save_snapshot
from .planners import (
    FgmConfig,
    FgmPlanner,
    ModificationPlanner,
    PurePursuitPlanner,
    build_observation,
    follow_the_gap,
    modification_plan,
    pure_pursuit,
)
from .raceline import (
    LineRelation,
    RaceLine,
    SpeedLimits,
    build_raceline,
    centerline_raceline,
    curvature_objective,
    line_relation,
    load_raceline,
    min_curvature_raceline,
    optimize_min_curvature,
    optimize_offsets,
    progress_delta,
    project_progress,
    save_raceline,
    speed_profile,
)
from .rewards import RewardConfig, StepContext, Terminal, compute_reward
from .simenv import (
    ActionCommand,
    Environment,
    EpisodeOutcome,
    Obstacle,
    SpawnRules,
    Transition,
    VehicleParams,
    VehicleState,
    check_collision,
    run_episode,
    scan_lidar,
    spawn_obstacles,
    step_dynamics,
)
from .td3 import ReplayBuffer, Td3Agent, Td3Config, td3_update, train
from .track import Track, build_track, load_track, save_track

__version__ = "0.1.0"

__all__ = [
    "ActionCommand",
    "Centerline",
    "Environment",
    "EpisodeOutcome",
    "FgmConfig",
    "FgmPlanner",
    "GridFormatError",
    "GridTruncationError",
    "InfeasibleConstraintError",
    "LineRelation",
    "Mlp",
    "ModificationPlanner",
    "Obstacle",
    "OccupancyGrid",
    "PurePursuitPlanner",
    "RaceLabError",
    "RaceLine",
    "ReplayBuffer",
    "RewardConfig",
    "SnapshotError",
    "SpawnError",
    "SpawnRules",
    "SpeedLimits",
    "StepContext",
    "Td3Agent",
    "Td3Config",
    "Terminal",
    "Track",
    "TrackTopologyError",
    "Transition",
    "VehicleParams",
    "VehicleState",
    "adam_step",
    "build_observation",
    "build_raceline",
    "build_track",
    "centerline_raceline",
    "check_collision",
    "compute_reward",
    "curvature_objective",
    "extract_centerline",
    "follow_the_gap",
    "line_relation",
    "load_grid",
    "load_raceline",
    "load_snapshot",
    "load_track",
    "min_curvature_raceline",
    "modification_plan",
    "optimize_min_curvature",
    "optimize_offsets",
    "progress_delta",
    "project_progress",
    "pure_pursuit",
    "run_episode",
    "save_grid",
    "save_raceline",
    "save_snapshot",
    "save_track",
    "scan_lidar",
    "spawn_obstacles",
    "speed_profile",
    "step_dynamics",
    "td3_update",
    "train",
]
