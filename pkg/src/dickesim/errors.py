"""Exception types shared across the package."""


class DickesimError(Exception):
    """Base class for all package errors."""


class InvalidParam(DickesimError):
    """A parameter violates a precondition (non-positive width, bad dt, ...)."""


class RejectionExhausted(DickesimError):
    """Minimum-separation resampling failed within the retry budget.

    Signals an over-dense request: the exclusion volume is too large for
    the requested atom number and cloud size.
    """


class SingularPair(DickesimError):
    """Two atoms closer than the exclusion distance reached the kernel builder.

    Unreachable for clouds built by ``sample_cloud``; signals corrupted input.
    """


class DimensionMismatch(DickesimError):
    """State vector and kernel matrix have inconsistent sizes."""


class NonFinite(DickesimError):
    """An amplitude became NaN/Inf during integration (dt too large)."""


class SingularSystem(DickesimError):
    """The steady-state linear system is rank deficient."""


class ConfigError(DickesimError):
    """A run configuration is inconsistent or incomplete."""


class RegimeWarning(UserWarning):
    """Total excitation left the weak-drive regime the linear model assumes."""
