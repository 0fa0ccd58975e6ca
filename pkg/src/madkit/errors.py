"""Exception types raised by madkit.

Everything derives from :class:`MadkitError`, itself a ``ValueError``, so
callers can catch broadly or by kind.
"""


class MadkitError(ValueError):
    """Base class for all madkit errors."""


class DomainError(MadkitError):
    """An argument is outside the mathematical domain of an operation."""


class SampleError(MadkitError):
    """The sample is empty or too small for the requested estimate."""


class FactorRangeError(MadkitError):
    """A correction-factor model was queried outside its valid range."""


class DistributionSpecError(MadkitError):
    """A distribution specification is invalid or unparsable."""


class ConfigError(MadkitError):
    """A simulation configuration is invalid."""


class InternalCheckError(MadkitError):
    """A post-run internal invariant check failed."""
