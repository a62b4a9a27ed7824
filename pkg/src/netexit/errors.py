"""Exception types raised across the package."""


class ModelError(ValueError):
    """Base class for parameter and domain violations.

    ``param`` names the offending parameter when there is one, so callers
    such as the CLI can point at the right flag.
    """

    def __init__(self, message, param=None):
        super().__init__(message)
        self.param = param


class NonPositiveRate(ModelError):
    pass


class ParameterOutOfRange(ModelError):
    pass


class ThresholdInvalid(ModelError):
    pass


class NegativeMean(ModelError):
    pass


class RatesTooClose(ModelError):
    """lambda, mu and lambda/b are not pairwise distinct enough for the CDF formula."""


class ThresholdTooLargeForCdf(ModelError):
    """The node threshold exceeds the safe range of the crossing-time CDF."""


class OracleScaleExceeded(ModelError):
    pass


class EmptySample(ModelError):
    pass


class NonTermination(RuntimeError):
    """A realization did not exit within the epoch cap."""
