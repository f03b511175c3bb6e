"""Exception types shared across the package."""


class GraspUQError(Exception):
    """Base class for package errors."""


class EmptyCloud(GraspUQError):
    """An operation that needs at least one point received an empty cloud."""


class TooFewPoints(GraspUQError):
    """Not enough points for the requested neighborhood size."""


class MissingNormals(GraspUQError):
    """The operation requires per-point normals and the cloud has none."""


class UnsupportedFormat(GraspUQError):
    """File format recognized but not supported (e.g. binary PLY)."""


class DataError(GraspUQError):
    """Malformed or inconsistent input data."""


class EmptyShape(GraspUQError):
    """A canonical shape with zero points cannot seed completions."""


class BadEnsembleSize(GraspUQError):
    """Completion ensembles need at least two samples."""


class NoPointsInSlice(GraspUQError):
    """No points of the cloud fall inside the queried grasp slab."""


class NoContact(GraspUQError):
    """Contact estimation found no surface point within reach of a jaw."""


class ConfigError(GraspUQError):
    """Invalid or unknown configuration content."""
