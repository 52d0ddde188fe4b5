"""Trapped-ion Raman coupling budgets, sideband dynamics and geometric
phase gate simulation."""

from .errors import (
    ConfigError,
    DenominatorSingular,
    NoBracket,
    NoMinimum,
    NoSignChange,
    StepFailure,
    TrapIonError,
    TruncationError,
    ZeroRabi,
)
from .ramancoupling import BERYLLIUM_9, IonSpecies, Polarization, RamanBeamPair
from .statespace import FockSpinState

__version__ = "0.1.0"

__all__ = [
    "BERYLLIUM_9",
    "ConfigError",
    "DenominatorSingular",
    "FockSpinState",
    "IonSpecies",
    "NoBracket",
    "NoMinimum",
    "NoSignChange",
    "Polarization",
    "RamanBeamPair",
    "StepFailure",
    "TrapIonError",
    "TruncationError",
    "ZeroRabi",
    "__version__",
]
