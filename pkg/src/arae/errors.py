"""Exception hierarchy shared by the kinematics, estimation and harness layers."""


class AraeError(Exception):
    """Base class for every error raised by this package."""


class NumericError(AraeError):
    """A solver could not produce a valid numeric answer (CLI exit code 3)."""


class ConfigError(AraeError, ValueError):
    """Invalid configuration or input file (CLI exit code 2)."""


# robot_model
class Unreachable(NumericError):
    pass


class BaseSingularity(NumericError):
    pass


class JointLimitViolation(NumericError):
    pass


class FrameMismatch(AraeError, ValueError):
    pass


# human_model
class ElevationSingularity(NumericError):
    pass


class InconsistentLengths(NumericError):
    pass


# pose_estimation
class ZeroElbow(NumericError):
    pass


class NoIntersection(NumericError):
    pass


class LateralOverreach(NumericError):
    pass


class EstimatorFailure(NumericError):
    pass


# harness
class WorkspaceViolation(NumericError):
    pass


class LengthMismatch(AraeError, ValueError):
    pass


class ZeroBaseline(NumericError, ZeroDivisionError):
    pass


class SampleRateTooLow(ConfigError):
    pass


class ParseError(ConfigError):
    pass


class MissingGroundTruth(ConfigError):
    pass


class GimbalDegeneracy(UserWarning):
    """Cuff axis parallel to the q4 axis; q4 is indeterminate and set to 0."""


class DegenerateJacobian(UserWarning):
    """Human Jacobian has rank < 3; support force is the minimum-norm solution."""
