"""Closed-form stimulated-Raman couplings for hyperfine ion qubits.

Two level schemes are covered:

* the 9Be+ stretched-state qubit ``|F=2,mF=2> = down``, ``|F=1,mF=1> = up``
  coupled through the 2p fine-structure doublet, with the Clebsch-Gordan
  weights hard-coded per term;
* the generic ``|F=I-1/2,0> <-> |F=I+1/2,0>`` clock transition of an ion
  with half odd-integer nuclear spin, in the ``omega_0 << Delta, omega_F``
  limit.

All rates are angular (rad/s).  The detuning ``Delta`` is measured from the
2P1/2 level, ``omega_F`` is the fine-structure splitting and ``g_b``, ``g_r``
are the resonant single-beam couplings, taken as direct inputs.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from fractions import Fraction

from .errors import DenominatorSingular, ZeroRabi

TWO_PI = 2.0 * math.pi
DEFAULT_GUARD = 1e6  # rad/s
POL_TOL = 1e-12
SQRT2 = math.sqrt(2.0)
DELTA_OPT_FRACTION = SQRT2 - 1.0  # optimal Delta / omega_F


@dataclass(frozen=True)
class IonSpecies:
    """Atomic constants of one ion species (angular frequencies in rad/s)."""

    name: str
    nuclear_spin_I: Fraction
    gamma: float
    omega_F: float
    omega_0: float

    def __post_init__(self):
        spin = Fraction(self.nuclear_spin_I).limit_denominator(16)
        object.__setattr__(self, "nuclear_spin_I", spin)
        if spin < 0 or (2 * spin).denominator != 1:
            raise ValueError(f"{self.name}: nuclear spin must be a non-negative half-integer, got {spin}")
        if not self.gamma > 0:
            raise ValueError(f"{self.name}: gamma must be positive, got {self.gamma!r}")
        if not self.omega_0 > 0:
            raise ValueError(f"{self.name}: omega_0 must be positive, got {self.omega_0!r}")
        if not self.omega_F > self.omega_0:
            raise ValueError(
                f"{self.name}: omega_F ({self.omega_F!r}) must exceed omega_0 ({self.omega_0!r})"
            )

    @property
    def half_odd_integer_spin(self) -> bool:
        return (2 * self.nuclear_spin_I) % 2 == 1

    @classmethod
    def from_hz(cls, name, nuclear_spin_I, gamma_hz, nu_F_hz, nu_0_hz) -> "IonSpecies":
        """Build from ``gamma/2pi``, ``nu_F`` and ``nu_0`` in Hz."""
        return cls(name, Fraction(nuclear_spin_I), TWO_PI * gamma_hz, TWO_PI * nu_F_hz, TWO_PI * nu_0_hz)


BERYLLIUM_9 = IonSpecies.from_hz("9Be+", Fraction(3, 2), 19.4e6, 0.198e12, 1.25e9)


@dataclass(frozen=True)
class Polarization:
    """Spherical components (sigma-, pi, sigma+) of a beam polarization."""

    e_minus: complex = 0.0
    e_zero: complex = 0.0
    e_plus: complex = 0.0

    def __post_init__(self):
        norm = abs(self.e_minus) ** 2 + abs(self.e_zero) ** 2 + abs(self.e_plus) ** 2
        if abs(norm - 1.0) > POL_TOL:
            raise ValueError(f"polarization not normalized: |e-|^2+|e0|^2+|e+|^2 = {norm!r}")

    @classmethod
    def normalized(cls, e_minus=0.0, e_zero=0.0, e_plus=0.0) -> "Polarization":
        norm = math.sqrt(abs(e_minus) ** 2 + abs(e_zero) ** 2 + abs(e_plus) ** 2)
        if norm == 0:
            raise ValueError("polarization vector is zero")
        return cls(e_minus / norm, e_zero / norm, e_plus / norm)

    @classmethod
    def sigma_minus(cls):
        return cls(1.0, 0.0, 0.0)

    @classmethod
    def pi(cls):
        return cls(0.0, 1.0, 0.0)

    @classmethod
    def sigma_plus(cls):
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def linear_perpendicular(cls, angle: float = 0.0) -> "Polarization":
        """Linear polarization perpendicular to B, rotated by ``angle`` (rad)
        relative to the reference axis: ``(1, 0, exp(2i angle)) / sqrt(2)``."""
        return cls(1 / SQRT2, 0.0, cmath.exp(2j * angle) / SQRT2)

    def weights(self) -> tuple[float, float, float]:
        """Intensity fractions ``|e-|^2, |e0|^2, |e+|^2``."""
        return abs(self.e_minus) ** 2, abs(self.e_zero) ** 2, abs(self.e_plus) ** 2


@dataclass(frozen=True)
class RamanBeamPair:
    """Laser settings of a blue/red Raman beam pair."""

    g_b: float
    g_r: float
    pol_b: Polarization
    pol_r: Polarization
    detuning_Delta: float
    phase_diff: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if self.g_b < 0 or self.g_r < 0:
            raise ValueError(f"couplings must be non-negative, got g_b={self.g_b!r}, g_r={self.g_r!r}")

    def scaled(self, factor: float) -> "RamanBeamPair":
        return replace(self, g_b=self.g_b * factor, g_r=self.g_r * factor)

    def with_detuning(self, delta: float) -> "RamanBeamPair":
        return replace(self, detuning_Delta=delta)


@dataclass(frozen=True)
class BudgetReport:
    """Per-ion derived quantities of the spontaneous-emission budget."""

    ion: IonSpecies
    carrier_rabi: float
    stark_shift: float
    se_rate: float
    p_se_pi: float
    stark_over_rabi: float
    optimal_Delta: float


def optimal_carrier_beams(ion: IonSpecies, g: float, delta: float | None = None) -> RamanBeamPair:
    """9Be+ carrier settings minimizing spontaneous emission: pi-polarized blue
    beam, red beam linear perpendicular to B, equal couplings."""
    if delta is None:
        delta = DELTA_OPT_FRACTION * ion.omega_F
    return RamanBeamPair(g, g, Polarization.pi(), Polarization.linear_perpendicular(), delta)


def orthogonal_linear_beams(ion: IonSpecies, g: float, delta: float | None = None) -> RamanBeamPair:
    """Clock-transition settings: orthogonal linear polarizations,
    ``b- = r- = b+ = -r+ = 1/sqrt(2)``, equal couplings."""
    if delta is None:
        delta = DELTA_OPT_FRACTION * ion.omega_F
    return RamanBeamPair(
        g,
        g,
        Polarization.linear_perpendicular(0.0),
        Polarization.linear_perpendicular(math.pi / 2),
        delta,
        kappa=math.pi / 2,
    )


def _guarded(terms: dict[str, float], guard: float) -> None:
    for name, value in terms.items():
        if abs(value) < guard:
            raise DenominatorSingular(name, value, guard)


def _omega_0(ion: IonSpecies, omega_0: float | None) -> float:
    return ion.omega_0 if omega_0 is None else float(omega_0)


def carrier_rabi_be(beams: RamanBeamPair, ion: IonSpecies, guard: float = DEFAULT_GUARD) -> complex:
    """Carrier Raman Rabi rate of the 9Be+ stretched-state qubit."""
    d = beams.detuning_Delta
    _guarded({"Delta": d, "Delta-omega_F": d - ion.omega_F}, guard)
    b, r = beams.pol_b, beams.pol_r
    pol = b.e_zero * r.e_plus + b.e_minus * r.e_zero
    value = beams.g_b * beams.g_r / math.sqrt(6) * pol * ion.omega_F / (d * (d - ion.omega_F))
    return complex(cmath.exp(1j * beams.phase_diff) * value)


def displacement_rabi_be(
    beams: RamanBeamPair, spin: str, ion: IonSpecies, guard: float = DEFAULT_GUARD
) -> complex:
    """Spin-dependent displacement coupling ``Omega(m_S)`` for beams linearly
    polarized perpendicular to B, the red beam rotated by ``beams.kappa``.

    The products ``b = b+ ~ b-`` and ``r = r+ ~ r-`` are taken from the
    sigma- components of the stored polarizations.
    """
    d = beams.detuning_Delta
    _guarded({"Delta": d, "Delta-omega_F": d - ion.omega_F}, guard)
    scale = beams.g_r * beams.g_b * abs(beams.pol_b.e_minus) * abs(beams.pol_r.e_minus)
    rot = cmath.exp(2j * beams.kappa)
    dF = d - ion.omega_F
    if spin in ("down", "d", 0):
        value = (2 / 3) / d + (1 / 3 + rot) / dF
    elif spin in ("up", "u", 1):
        value = (1 / 6 + 0.5 * rot) / d + (5 / 6 + 0.5 * rot) / dF
    else:
        raise ValueError(f"spin must be 'down' or 'up', got {spin!r}")
    return complex(cmath.exp(1j * beams.phase_diff) * scale * value)


def _stark_terms_be(beams: RamanBeamPair, ion: IonSpecies, w0: float):
    """(coefficient, denominator name, denominator) for the eight terms."""
    d, wF = beams.detuning_Delta, ion.omega_F
    bm, b0, bp = beams.pol_b.weights()
    rm, r0, rp = beams.pol_r.weights()
    gb2, gr2 = beams.g_b**2, beams.g_r**2
    return [
        (gb2 * (bm / 6 + b0 / 3 + bp / 2), "Delta+omega_0", d + w0),
        (gb2 * (5 * bm / 6 + 2 * b0 / 3 + bp / 2), "Delta-omega_F+omega_0", d - wF + w0),
        (-gb2 * (2 * bm / 3 + b0 / 3), "Delta", d),
        (-gb2 * (bm / 3 + 2 * b0 / 3 + bp), "Delta-omega_F", d - wF),
        (gr2 * (rm / 6 + r0 / 3 + rp / 2), "Delta", d),
        (gr2 * (5 * rm / 6 + 2 * r0 / 3 + rp / 2), "Delta-omega_F", d - wF),
        (-gr2 * (2 * rm / 3 + r0 / 3), "Delta-omega_0", d - w0),
        (-gr2 * (rm / 3 + 2 * r0 / 3 + rp), "Delta-omega_0-omega_F", d - w0 - wF),
    ]


def stark_shift_be(
    beams: RamanBeamPair, ion: IonSpecies, omega_0: float | None = None, guard: float = DEFAULT_GUARD
) -> float:
    """Differential Stark shift ``delta(up) - delta(down)`` from the full
    eight-term expression.  ``omega_0`` overrides the ion's splitting."""
    terms = _stark_terms_be(beams, ion, _omega_0(ion, omega_0))
    _guarded({name: den for _, name, den in terms}, guard)
    return float(sum(coef / den for coef, _, den in terms))


def stark_shift_be_approx(beams: RamanBeamPair, ion: IonSpecies, guard: float = DEFAULT_GUARD) -> float:
    """Differential Stark shift in the ``omega_0 << Delta, omega_F`` limit."""
    d, wF = beams.detuning_Delta, ion.omega_F
    _guarded({"Delta": d, "Delta-omega_F": d - wF}, guard)
    bm, _, bp = beams.pol_b.weights()
    rm, _, rp = beams.pol_r.weights()
    imbalance = beams.g_b**2 * (bm - bp) + beams.g_r**2 * (rm - rp)
    return float(imbalance * wF / (2 * d * (d - wF)))


def single_beam_stark_scale(beams: RamanBeamPair, ion: IonSpecies) -> float:
    """Magnitude of the shift one fully circular beam would produce; the
    reference scale for Stark nulling."""
    d, wF = beams.detuning_Delta, ion.omega_F
    return max(beams.g_b**2, beams.g_r**2) * abs(wF / (2 * d * (d - wF)))


def se_rate_be(
    beams: RamanBeamPair,
    ion: IonSpecies,
    p_down: float,
    p_up: float,
    omega_0: float | None = None,
    guard: float = DEFAULT_GUARD,
) -> float:
    """Total spontaneous-emission rate out of the 2p levels for ground-state
    populations ``p_down``, ``p_up``."""
    if p_down < 0 or p_up < 0 or abs(p_down + p_up - 1.0) > 1e-12:
        raise ValueError(f"populations must be non-negative and sum to 1, got {p_down}, {p_up}")
    d, wF, w0 = beams.detuning_Delta, ion.omega_F, _omega_0(ion, omega_0)
    bm, b0, bp = beams.pol_b.weights()
    rm, r0, rp = beams.pol_r.weights()
    gb2, gr2 = beams.g_b**2, beams.g_r**2
    down = [
        (gb2 * (2 * bm / 3 + b0 / 3), "Delta", d),
        (gb2 * (bm / 3 + 2 * b0 / 3 + bp), "Delta-omega_F", d - wF),
        (gr2 * (2 * rm / 3 + r0 / 3), "Delta-omega_0", d - w0),
        (gr2 * (rm / 3 + 2 * r0 / 3 + rp), "Delta-omega_0-omega_F", d - w0 - wF),
    ]
    up = [
        (gb2 * (bm / 6 + b0 / 3 + bp / 2), "Delta+omega_0", d + w0),
        (gb2 * (5 * bm / 6 + 2 * b0 / 3 + bp / 2), "Delta-omega_F+omega_0", d - wF + w0),
        (gr2 * (rm / 6 + r0 / 3 + rp / 2), "Delta", d),
        (gr2 * (5 * rm / 6 + 2 * r0 / 3 + rp / 2), "Delta-omega_F", d - wF),
    ]
    _guarded({name: den for _, name, den in down + up}, guard)
    rate_down = sum(c / den**2 for c, _, den in down)
    rate_up = sum(c / den**2 for c, _, den in up)
    return float(ion.gamma * (p_down * rate_down + p_up * rate_up))


def p_se_carrier_pi_be(
    beams: RamanBeamPair,
    ion: IonSpecies,
    omega_0: float | None = None,
    guard: float = DEFAULT_GUARD,
    rabi_guard: float = 1e-12,
) -> float:
    """Spontaneous-emission probability during a carrier pi pulse
    (``|Omega| tau = pi/2``) with both ground states equally populated."""
    rabi = abs(carrier_rabi_be(beams, ion, guard))
    if rabi <= rabi_guard:
        raise ZeroRabi(f"carrier Rabi rate {rabi:.3g} rad/s is too small for a pi pulse")
    tau_pi = math.pi / (2 * rabi)
    return se_rate_be(beams, ion, 0.5, 0.5, omega_0=omega_0, guard=guard) * tau_pi


def clock_rabi(beams: RamanBeamPair, ion: IonSpecies, guard: float = DEFAULT_GUARD) -> complex:
    """Rabi rate of the ``m_F = 0`` clock transition (independent of I)."""
    d = beams.detuning_Delta
    _guarded({"Delta": d, "Delta-omega_F": d - ion.omega_F}, guard)
    b, r = beams.pol_b, beams.pol_r
    pol = b.e_minus * r.e_minus - b.e_plus * r.e_plus
    value = beams.g_b * beams.g_r * ion.omega_F / (3 * d * (d - ion.omega_F)) * pol
    return complex(cmath.exp(1j * beams.phase_diff) * value)


def _clock_bracket(beams: RamanBeamPair, ion: IonSpecies, guard: float) -> float:
    d = beams.detuning_Delta
    _guarded({"Delta": d, "Delta-omega_F": d - ion.omega_F}, guard)
    return (beams.g_b**2 + beams.g_r**2) / 3 * (1 / d**2 + 2 / (d - ion.omega_F) ** 2)


def clock_se_rate(beams: RamanBeamPair, ion: IonSpecies, guard: float = DEFAULT_GUARD) -> float:
    """Spontaneous-emission rate while driving the clock transition."""
    return float(ion.gamma * _clock_bracket(beams, ion, guard))


def clock_stark(beams: RamanBeamPair, ion: IonSpecies, guard: float = DEFAULT_GUARD) -> float:
    """Differential Stark shift of the clock transition; polarization-free."""
    return float(-ion.omega_0 * _clock_bracket(beams, ion, guard))


def p_se_clock_pi(ion: IonSpecies) -> float:
    """Spontaneous-emission probability of an optimally configured clock pi pulse."""
    return 2 * SQRT2 * math.pi * ion.gamma / ion.omega_F


def stark_over_rabi_clock(ion: IonSpecies) -> float:
    """``|delta_00 / Omega_00|`` at the optimal clock settings."""
    return 4 * SQRT2 * ion.omega_0 / ion.omega_F
