"""Exception types shared across the package."""


class RaceLabError(Exception):
    """Base class for all racelab-specific errors."""


class GridFormatError(RaceLabError):
    """Grid file header is malformed or carries illegal values."""


class GridTruncationError(GridFormatError):
    """Grid payload does not match the declared dimensions."""


class TrackTopologyError(RaceLabError):
    """Free space does not form exactly one closed drivable loop."""


class InfeasibleConstraintError(RaceLabError):
    """Optimization box constraints are empty (track too narrow)."""


class SpawnError(RaceLabError):
    """Obstacle spawn constraints could not be satisfied."""


class SnapshotError(RaceLabError):
    """Actor snapshot file is missing or malformed."""
