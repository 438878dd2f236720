"""Exception types raised across the simulator and the video evaluator."""


class SimError(Exception):
    """Base class for all simulator errors."""


class SchedulingInPast(SimError):
    pass


class ZeroDistance(SimError):
    pass


class DiscoveryFailed(SimError):
    pass


class NotPerfectSquare(SimError, ValueError):
    pass


class ConfigError(SimError, ValueError):
    pass


class VideoError(Exception):
    """Base class for errors in the video pipeline."""


class TruncatedFile(VideoError):
    pass


class BadDimensions(VideoError, ValueError):
    pass


class InconsistentLogs(VideoError):
    pass


class DimensionMismatch(VideoError, ValueError):
    pass
