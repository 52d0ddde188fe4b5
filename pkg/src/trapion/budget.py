"""Optimization layer over the closed-form couplings: detuning optimum,
Stark-shift nulling and the per-ion spontaneous-emission table."""

from __future__ import annotations

import math
from dataclasses import replace
from typing import Iterable

from scipy.optimize import brentq, minimize_scalar

from .errors import NoMinimum, NoSignChange
from .ramancoupling import (
    TWO_PI,
    BudgetReport,
    IonSpecies,
    Polarization,
    RamanBeamPair,
    clock_rabi,
    clock_se_rate,
    clock_stark,
    optimal_carrier_beams,
    orthogonal_linear_beams,
    p_se_clock_pi,
    p_se_carrier_pi_be,
    single_beam_stark_scale,
    stark_shift_be,
)

OBJECTIVES = ("carrier_be", "clock")
REL_TOL = 1e-8
STARK_NULL_FRACTION = 1e-6
DEFAULT_TABLE_RABI = TWO_PI * 1e6  # reference |Omega_00| for the table's absolute rates


def _objective(ion: IonSpecies, objective: str):
    """Objective as a function of ``x = Delta / omega_F``; couplings drop out."""
    g = ion.omega_F  # keeps |Omega| ~ omega_F, far from the zero-Rabi guard
    if objective == "carrier_be":
        def f(x):
            beams = optimal_carrier_beams(ion, g, x * ion.omega_F)
            return p_se_carrier_pi_be(beams, ion, omega_0=0.0, guard=0.0)
    elif objective == "clock":
        def f(x):
            beams = orthogonal_linear_beams(ion, g, x * ion.omega_F)
            return clock_se_rate(beams, ion, guard=0.0) / abs(clock_rabi(beams, ion, guard=0.0))
    else:
        raise ValueError(f"objective must be one of {OBJECTIVES}, got {objective!r}")
    return f


def objective_value(ion: IonSpecies, objective: str, delta: float) -> float:
    return _objective(ion, objective)(delta / ion.omega_F)


def optimize_detuning(
    ion: IonSpecies, objective: str = "clock", guard: float = 1e6, rel_tol: float = REL_TOL
) -> float:
    """Detuning ``Delta`` in (0, omega_F) minimizing the chosen objective.

    ``carrier_be`` is the 9Be+ carrier pi-pulse emission probability and
    ``clock`` is ``R_SE / |Omega_00|``, both with ``omega_0 -> 0``.
    Returns rad/s.
    """
    f = _objective(ion, objective)
    lo = guard / ion.omega_F
    hi = 1.0 - lo
    res = minimize_scalar(f, bounds=(lo, hi), method="bounded", options={"xatol": rel_tol * 1e-2})
    x = float(res.x)
    # an optimum pinned at the bracket edge means the objective is monotone there
    edge = 1e3 * rel_tol
    if not res.success or x - lo < edge or hi - x < edge:
        raise NoMinimum(f"{objective} objective for {ion.name} has no interior minimum on the bracket")
    # polish: the bounded method stalls near sqrt(eps) on flat minima
    for _ in range(4):
        h = 1e-4 * x
        f0, fp, fm = f(x), f(x + h), f(x - h)
        curv = fp - 2 * f0 + fm
        if curv <= 0:
            break
        step = -0.5 * h * (fp - fm) / curv
        if abs(step) > h:
            break
        x += step
        if abs(step) < rel_tol * 1e-3 * x:
            break
    return x * ion.omega_F


def polarization_imbalance(pol: Polarization) -> float:
    """``x`` in the parameterization ``|e+| : |e-| = (1 + x) : (1 - x)``."""
    p, m = abs(pol.e_plus), abs(pol.e_minus)
    if p + m == 0:
        raise ValueError("polarization has no circular components")
    return (p - m) / (p + m)


def with_imbalance(pol: Polarization, x: float) -> Polarization:
    """Redistribute the circular intensity of ``pol`` to imbalance ``x``,
    keeping its pi component and the phases of the circular components."""
    if not -1.0 < x < 1.0:
        raise ValueError(f"imbalance must lie in (-1, 1), got {x!r}")
    circular = 1.0 - abs(pol.e_zero) ** 2
    s = math.sqrt(circular / (2 + 2 * x * x))
    ph_p = pol.e_plus / abs(pol.e_plus) if pol.e_plus != 0 else 1.0
    ph_m = pol.e_minus / abs(pol.e_minus) if pol.e_minus != 0 else 1.0
    return Polarization(ph_m * (1 - x) * s, pol.e_zero, ph_p * (1 + x) * s)


def stark_null_tune(
    beams: RamanBeamPair,
    ion: IonSpecies,
    knob: str = "r_imbalance",
    omega_0: float | None = None,
) -> RamanBeamPair:
    """Adjust one beam's sigma+/sigma- imbalance so the exact 9Be+ Stark
    shift vanishes.  The residual is below 1e-6 of the single-beam scale."""
    if knob not in ("r_imbalance", "b_imbalance"):
        raise ValueError(f"knob must be 'r_imbalance' or 'b_imbalance', got {knob!r}")
    attr = "pol_r" if knob == "r_imbalance" else "pol_b"
    pol = getattr(beams, attr)

    def shifted(x):
        return replace(beams, **{attr: with_imbalance(pol, x)})

    def f(x):
        return stark_shift_be(shifted(x), ion, omega_0=omega_0)

    threshold = STARK_NULL_FRACTION * single_beam_stark_scale(beams, ion)
    if abs(stark_shift_be(beams, ion, omega_0=omega_0)) < threshold * 1e-3:
        return beams
    lim = 1.0 - 1e-9
    f_lo, f_hi = f(-lim), f(lim)
    if f_lo * f_hi > 0:
        raise NoSignChange(f"Stark shift does not change sign over the {knob} range")
    x = brentq(f, -lim, lim, xtol=1e-15, rtol=1e-15, maxiter=200)
    tuned = shifted(x)
    residual = abs(stark_shift_be(tuned, ion, omega_0=omega_0))
    if residual >= threshold:
        raise NoSignChange(f"root finder stalled with residual {residual:.3g} rad/s")
    return tuned


def table_row(ion: IonSpecies, rabi_ref: float = DEFAULT_TABLE_RABI) -> BudgetReport:
    """Clock-transition budget of one ion at the emission-optimal detuning.

    Couplings are chosen so ``|Omega_00| = rabi_ref``; the probability and
    ratio columns do not depend on that choice.
    """
    delta = optimize_detuning(ion, "clock")
    unit = orthogonal_linear_beams(ion, 1.0, delta)
    g = math.sqrt(rabi_ref / abs(clock_rabi(unit, ion)))
    beams = unit.scaled(g)
    rabi = abs(clock_rabi(beams, ion))
    rate = clock_se_rate(beams, ion)
    stark = clock_stark(beams, ion)
    return BudgetReport(
        ion=ion,
        carrier_rabi=rabi,
        stark_shift=stark,
        se_rate=rate,
        p_se_pi=rate * math.pi / (2 * rabi),
        stark_over_rabi=abs(stark / rabi),
        optimal_Delta=delta,
    )


def generate_table1(ions: Iterable[IonSpecies], rabi_ref: float = DEFAULT_TABLE_RABI) -> list[BudgetReport]:
    return [table_row(ion, rabi_ref) for ion in ions]


def sideband_pse(ion: IonSpecies, eta: float) -> float:
    """Clock pi-pulse emission probability scaled up by ``1/eta`` for a sideband."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta!r}")
    return p_se_clock_pi(ion) / eta
