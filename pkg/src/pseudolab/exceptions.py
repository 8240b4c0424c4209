"""
pseudolab exceptions module.

Contains exception classes shared by the numerical subpackages and the
experiment runner, kept here to avoid circular imports.
"""


class LabError(Exception):
    """Base class for all pseudolab errors."""

    pass


class SolverDivergedError(LabError):
    """Raised when an iterative linear solve stagnates above its tolerance."""

    pass


class TrajectoryEscapedError(LabError):
    """Raised when a flow trajectory leaves the configured bounding box.

    The velocity field is defined on all of R^N, so this is a configuration
    guard: a trajectory this far out usually means a mis-scaled velocity.
    """

    pass


class QuadratureError(LabError):
    """Raised when the beam quadrature does not converge before the order cap."""

    pass


class CGStalledError(LabError):
    """Raised by strict HUM solves when CG hits its iteration cap.

    Non-strict solves log a warning and return the last iterate instead,
    since stalling is the expected outcome for uncontrollable configurations.
    """

    pass


class CertificationError(LabError):
    """Raised when a constructed weight fails one of its required properties."""

    pass


class ExperimentError(LabError):
    """Raised when an experiment family cannot be executed."""

    pass
