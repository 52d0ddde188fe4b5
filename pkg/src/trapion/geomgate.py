"""Two-ion geometric phase gate on the axial stretch mode.

A state-dependent optical dipole force, detuned by ``delta`` from the
stretch mode, drives the mode around a closed circle in phase space.  With
equal ion spacing phase the force cancels for aligned spins and adds for
anti-aligned spins, so only ``|down,up>`` and ``|up,down>`` pick up the
enclosed-area phase.

Spin basis order is (dd, du, ud, uu).  Forces are single-ion displacement
rates ``eta * Omega(m_S)`` in rad/s; the stretch-mode drive for spins
``(m1, m2)`` is ``(F(m1) - e^{i spacing_phase} F(m2)) / sqrt(2)``.
The force enters the mode frame as ``F e^{+i delta t}``, so ``delta > 0``
produces positive phases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np
from scipy.optimize import brentq

from . import dynamics
from .errors import NoBracket, TruncationError
from .statespace import FockSpinState

BASIS_LABELS = ("down,down", "down,up", "up,down", "up,up")
SPIN_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))
SQRT3 = math.sqrt(3.0)
METHODS = ("analytic", "numeric")


@dataclass(frozen=True)
class GateSchedule:
    """Gate detuning, polarization angle and loop count.

    ``omega_z`` is the single-ion axial frequency; the stretch mode sits at
    ``sqrt(3) omega_z``.
    """

    delta: float
    omega_z: float
    kappa: float = math.pi / 2
    loop_count: int = 1
    spacing_phase: float = 0.0

    def __post_init__(self):
        if not self.omega_z > 0:
            raise ValueError(f"omega_z must be positive, got {self.omega_z!r}")
        if not 0 < self.delta <= self.omega_z / 10:
            raise ValueError(f"gate detuning must satisfy 0 < delta <= omega_z/10, got {self.delta!r}")
        if int(self.loop_count) != self.loop_count or self.loop_count < 1:
            raise ValueError(f"loop_count must be a positive integer, got {self.loop_count!r}")

    @property
    def stretch_freq(self) -> float:
        return SQRT3 * self.omega_z

    @property
    def duration(self) -> float:
        return self.loop_count * 2 * math.pi / self.delta


@dataclass(frozen=True)
class TwoQubitPhaseReport:
    """Per-basis-state phases (relative to dd, in (-pi, pi]) and motional
    return fidelities after the gate."""

    phases: tuple
    motional_return_fidelity: tuple
    entangling_phase: float
    excitation: tuple = (0.0, 0.0, 0.0, 0.0)
    amplitudes: tuple = ()

    def as_dict(self) -> dict:
        return {
            "phases": list(self.phases),
            "motional_return_fidelity": list(self.motional_return_fidelity),
            "entangling_phase": self.entangling_phase,
            "excitation": list(self.excitation),
        }


class PhaseGate(NamedTuple):
    unitary: np.ndarray
    max_phase_deviation: float


def wrap_phase(phi: float) -> float:
    """Map to (-pi, pi]."""
    wrapped = math.remainder(phi, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


def stretch_mode_force(spin_pair, omega_down: complex, omega_up: complex, spacing_phase: float = 0.0) -> complex:
    """Stretch-mode drive for the spin configuration ``spin_pair``
    (0 = down, 1 = up)."""
    f = (complex(omega_down), complex(omega_up))
    m1, m2 = spin_pair
    return (f[m1] - np.exp(1j * spacing_phase) * f[m2]) / math.sqrt(2)


def pair_forces(forces, spacing_phase: float = 0.0) -> list[complex]:
    down, up = forces
    return [complex(stretch_mode_force(p, down, up, spacing_phase)) for p in SPIN_PAIRS]


def forces_for_amplitude(amplitude: float, ratio: complex = -2.0) -> tuple[complex, complex]:
    """Single-ion forces with ``F(down) = ratio * F(up)`` whose anti-aligned
    stretch drive has magnitude ``amplitude``."""
    up = amplitude * math.sqrt(2) / abs(ratio - 1)
    return complex(ratio * up), complex(up)


def _motional_vacuum_state(n_max: int, coefficients) -> FockSpinState:
    amps = np.zeros(4 * (n_max + 1), dtype=complex)
    for s, c in enumerate(coefficients):
        amps[s * (n_max + 1)] = c
    return FockSpinState(4, n_max, amps)


def _propagate(state, drives, schedule, method, sink, samples, tol):
    T = schedule.duration
    if method == "analytic":
        return dynamics.displace_components(state, drives, schedule.delta, T, sink, samples)
    radius = max(dynamics.loop_radius(f, schedule.delta, T) for f in drives)
    need = dynamics.required_n_max(radius)
    if state.n_max < need:
        raise TruncationError(f"loop radius {radius:.3g} needs n_max >= {need}, got {state.n_max}")
    h = dynamics.displacement_hamiltonian(drives, schedule.delta, state.n_max)
    return dynamics.propagate_numerically(state, h, T, tol=tol, sink=sink, samples=samples)


def simulate_gate(
    schedule: GateSchedule,
    forces,
    n_max: int = 40,
    method: str = "analytic",
    sink: Optional[Callable[[float, np.ndarray], None]] = None,
    samples_per_loop: int = 256,
    tol: float = dynamics.DEFAULT_TOL,
) -> TwoQubitPhaseReport:
    """Run the displacement loop(s) on all four spin basis states at once.

    ``forces`` is ``(F(down), F(up))``.  The initial state is the equal
    superposition of the four spin states with the mode in ``|0>``; since
    the Hamiltonian is block diagonal in spin this yields every diagonal
    element of the gate in one propagation.
    """
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    drives = pair_forces(forces, schedule.spacing_phase)
    state0 = _motional_vacuum_state(n_max, [0.5] * 4)
    samples = samples_per_loop * schedule.loop_count
    final = _propagate(state0, drives, schedule, method, sink, samples, tol)

    diag, fid, excitation = [], [], []
    for s in range(4):
        psi = final.motional(s) / 0.5
        diag.append(complex(psi[0]))
        weight = float(np.vdot(psi, psi).real)
        fid.append(min(1.0, abs(psi[0]) ** 2))
        excitation.append(max(0.0, weight - abs(psi[0]) ** 2))
    ref = np.angle(diag[0])
    phases = tuple(wrap_phase(float(np.angle(d) - ref)) for d in diag)
    ent = wrap_phase(phases[1] + phases[2] - phases[0] - phases[3])
    return TwoQubitPhaseReport(phases, tuple(fid), ent, tuple(excitation), tuple(diag))


def trajectory_recorder(n_max: int, spins: int = 4):
    """Sink that converts sampled gate states into per-basis-state mean
    displacements ``<a>``.  Returns ``(sink, rows)``; ``rows`` fills with
    ``(t, label, re_alpha, im_alpha)``."""
    a = dynamics.ladder_lowering(n_max)
    rows: list[tuple[float, str, float, float]] = []
    labels = BASIS_LABELS if spins == 4 else ("down", "up")

    def sink(t, amps):
        amps = np.asarray(amps).reshape(spins, n_max + 1)
        for s in range(spins):
            psi = amps[s]
            w = float(np.vdot(psi, psi).real)
            alpha = complex(np.vdot(psi, a @ psi) / w) if w > 0 else 0j
            rows.append((float(t), labels[s], alpha.real, alpha.imag))

    return sink, rows


def antialigned_phase(schedule: GateSchedule, amplitude: float, n_max: int = 40, method: str = "numeric") -> float:
    """Phase of ``|down,up>`` relative to ``|down,down>`` for a stretch drive
    of magnitude ``amplitude``, mapped into [0, 2 pi)."""
    rep = simulate_gate(schedule, forces_for_amplitude(amplitude), n_max, method=method)
    raw = rep.phases[1]
    # tiny negative values are rounding noise around zero phase
    return raw + 2 * math.pi if raw < -1e-6 else max(raw, 0.0)


def calibrate_amplitude(
    schedule: GateSchedule,
    target_phase: float = math.pi / 2,
    n_max: int = 40,
    method: str = "numeric",
    xtol: float = 1e-12,
) -> float:
    """Stretch-mode drive amplitude (rad/s) giving ``target_phase`` on the
    anti-aligned states.

    The amplitude is stepped up by sqrt(2) from a small seed until the
    simulated phase passes the target (the phase roughly doubles per step,
    so it never wraps past 2 pi before the bracket closes), then refined by
    Brent's method on the simulated phase.
    """
    if not 0 <= target_phase <= math.pi:
        raise ValueError(f"target_phase must lie in [0, pi], got {target_phase!r}")
    if target_phase == 0:
        return 0.0
    # largest loop radius the truncation allows: (r + 4)^2 <= n_max
    r_max = math.sqrt(n_max) - 4.0
    if r_max <= 0:
        raise NoBracket(f"n_max={n_max} too small for any displacement loop")
    a_max = r_max * schedule.delta * (1 - 1e-12)

    def f(amp):
        return antialigned_phase(schedule, amp, n_max, method) - target_phase

    lo, f_lo = 0.0, -target_phase
    hi = a_max / 2**10
    while True:
        f_hi = f(hi)
        if f_hi >= 0:
            break
        if hi >= a_max:
            raise NoBracket(
                f"target phase {target_phase:.4g} unreachable: loop radius limited to {r_max:.3g} at n_max={n_max}"
            )
        lo, f_lo = hi, f_hi
        hi = min(hi * math.sqrt(2), a_max)
    if f_hi == 0:
        return float(hi)
    return float(brentq(f, lo, hi, xtol=xtol * schedule.delta, rtol=4 * np.finfo(float).eps))


def assemble_pi_phase_gate(report: TwoQubitPhaseReport) -> PhaseGate:
    """Remove the single-qubit ``pi/2`` phases on ``|up>`` from the gate's
    diagonal, leaving ``diag(1, 1, 1, -1)`` when calibrated."""
    correction = np.array([0.0, -math.pi / 2, -math.pi / 2, -math.pi])
    phases = np.asarray(report.phases) + correction
    unitary = np.diag(np.exp(1j * phases))
    ideal = np.array([0.0, 0.0, 0.0, math.pi])
    deviation = max(abs(wrap_phase(p - q)) for p, q in zip(phases, ideal))
    return PhaseGate(unitary, float(deviation))


def concurrence(psi: np.ndarray) -> float:
    """Wootters concurrence ``2|ad - bc|`` of a pure two-qubit state."""
    a, b, c, d = np.asarray(psi, dtype=complex)
    return float(2 * abs(a * d - b * c))
