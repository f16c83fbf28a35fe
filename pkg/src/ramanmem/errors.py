"""Exception types raised by the simulator."""


class RamanMemError(Exception):
    """Base class for all package errors."""


class ConfigError(RamanMemError):
    """Invalid or malformed run configuration."""


class RamanLimitError(RamanMemError):
    """Degenerate Raman limit (zero one-photon detuning)."""


class ScheduleError(RamanMemError):
    """Ill-formed refractive-index schedule (bad slope, gaps, discontinuity)."""


class ScheduleRangeError(RamanMemError):
    """Time outside the span of the index schedule."""


class PulseBoundaryError(RamanMemError):
    """Pulse grid too short: envelope not negligible at the boundaries."""


class ModeTruncationError(RamanMemError):
    """Spin-wave mode grid too small or over the configured maximum."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class StepSizeError(RamanMemError):
    """Integration step too coarse for the fastest rate, or incommensurate window."""


class EfficiencyUndefinedError(RamanMemError):
    """Efficiency requested for a record with zero input energy."""


class ChannelError(RamanMemError):
    """Invalid multichannel configuration (same channel, or ambiguous overlap)."""


class WeakFieldError(RamanMemError):
    """Atomic excitation left the weak-field regime of the full model."""


class GridMismatchError(RamanMemError):
    """Trajectories on incommensurate time grids cannot be compared directly."""


class NumericsError(RamanMemError):
    """A quadrature or root solve failed to converge."""


class AdiabaticityWarning(UserWarning):
    """Closed-form solution used outside its slow-pulse validity range."""


class BandwidthWarning(UserWarning):
    """Signal bandwidth not small against the carrier wave number."""
