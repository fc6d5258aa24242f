"""Exception hierarchy.

Every error raised by the library derives from :class:`QuantileMotionError`,
which is itself a ``ValueError`` so callers validating input can catch either.
"""


class QuantileMotionError(ValueError):
    pass


class InvalidInputError(QuantileMotionError):
    """Non-finite position/time, negative time, bad model parameters."""


class BoundaryViolationError(QuantileMotionError):
    """Density is not negligible at a grid boundary."""


class InvalidDensityError(QuantileMotionError):
    """Negative or non-finite density value."""


class FormatError(QuantileMotionError):
    """Malformed density file."""


class ConservationError(QuantileMotionError):
    """Frame mass drifts from the first frame by more than the tolerance."""


class InsufficientDataError(QuantileMotionError):
    pass


class ProbabilityRangeError(QuantileMotionError):
    """Requested quantile or position lies outside the admissible range."""


class CoverageError(QuantileMotionError):
    """Requested quantile exceeds the mass covered by the table."""


class DegenerateStartError(QuantileMotionError):
    """Initial position sits where the density vanishes."""


class DegenerateDensityError(QuantileMotionError):
    """Velocity requested where the density is below the floor."""


class ConfigurationError(QuantileMotionError):
    pass


class AbortedTrajectoryError(QuantileMotionError):
    """Integration hit a degenerate-density region.

    ``partial`` holds the :class:`~quantile_motion.trajectory.Trajectory`
    recorded up to the last completed record time.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial
