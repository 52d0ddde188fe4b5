"""Exception types raised across the package."""


class TrapIonError(Exception):
    """Base class for all physics/numerics errors raised by trapion."""


class DenominatorSingular(TrapIonError, ValueError):
    """A detuning denominator fell inside the resonance guard band."""

    def __init__(self, term, value, guard):
        self.term = term
        self.value = value
        self.guard = guard
        super().__init__(
            f"denominator {term!r} = {value:.6g} rad/s is within guard band {guard:.3g} rad/s"
        )


class ZeroRabi(TrapIonError, ValueError):
    """Rabi rate too small to define a pi-pulse duration."""


class TruncationError(TrapIonError):
    """Fock-space truncation too small for the requested evolution."""


class StepFailure(TrapIonError):
    """Adaptive integrator step size underflowed."""


class NoMinimum(TrapIonError):
    """Objective has no interior minimum on the search bracket."""


class NoSignChange(TrapIonError):
    """Root finder could not bracket a sign change."""


class NoBracket(TrapIonError):
    """Target value is unreachable on the admissible parameter range."""


class ConfigError(TrapIonError, ValueError):
    """Invalid user configuration or input file."""
