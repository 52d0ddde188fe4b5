"""Coherent spin-motion dynamics of one trapped-ion qubit and one mode.

Two independent routes are provided:

* analytic propagators for resonant carrier / sideband drives (2x2
  rotations inside each coupled pair of levels) and for spin-dependent
  displacements (closed-form displacement plus geometric phase);
* a brute-force integrator of the time-dependent interaction-frame
  Hamiltonian, which keeps the off-resonant terms the analytic route drops.

Pulse phase convention for the analytic route, per coupled pair
``(down, n) <-> (up, n')`` with coupling ``W`` and phase ``phi``::

    |down,n>  -> cos(W t)|down,n> - i e^{+i phi} sin(W t)|up,n'>
    |up,n'>   -> -i e^{-i phi} sin(W t)|down,n> + cos(W t)|up,n'>

The Lamb-Dicke Hamiltonian carries an extra factor ``i`` on its sideband
terms, so a sideband pulse of phase ``phi`` in the analytic route matches
the integrated Hamiltonian with drive phase ``phi - pi/2``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import solve_ivp
from scipy.special import eval_genlaguerre, gammaln

from .errors import StepFailure, TruncationError
from .statespace import (
    FockSpinState,
    displacement_operator,
    embed,
    ladder_lowering,
    sigma_plus,
)

log = logging.getLogger(__name__)

OVERFLOW_TOL = 1e-8
DEFAULT_TOL = 1e-10

# sink(t, amplitudes) receives trajectory samples
TrajectorySink = Callable[[float, np.ndarray], None]

RESONANT_KINDS = ("carrier", "red_sideband", "blue_sideband")
SEGMENT_KINDS = RESONANT_KINDS + ("displacement_force",)


@dataclass(frozen=True)
class MotionalMode:
    """One normal mode: frequency (rad/s) and Lamb-Dicke parameter."""

    omega_z: float
    eta: float
    z0: Optional[float] = None
    delta_k: Optional[float] = None

    def __post_init__(self):
        if not self.omega_z > 0:
            raise ValueError(f"omega_z must be positive, got {self.omega_z!r}")
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta!r}")
        if self.z0 is not None and self.delta_k is not None:
            expected = self.z0 * self.delta_k
            if abs(expected - self.eta) > 1e-12 * abs(expected):
                raise ValueError(f"eta = {self.eta!r} inconsistent with delta_k * z0 = {expected!r}")

    @classmethod
    def from_geometry(cls, omega_z: float, z0: float, delta_k: float) -> "MotionalMode":
        return cls(omega_z, delta_k * z0, z0, delta_k)


@dataclass(frozen=True)
class PulseSegment:
    """A square drive pulse.

    ``rabi`` is the bare (carrier) coupling; sideband strengths are derived
    from it with ``eta``.  For ``displacement_force`` segments ``rabi`` and
    ``rabi_up`` are the down/up couplings and ``detuning_delta`` the force
    detuning from the mode.
    """

    kind: str
    rabi: complex
    duration: float
    phase: float = 0.0
    eta: float = 0.0
    detuning_delta: float = 0.0
    rabi_up: complex = 0.0

    def __post_init__(self):
        if self.kind not in SEGMENT_KINDS:
            raise ValueError(f"unknown pulse kind {self.kind!r}; expected one of {SEGMENT_KINDS}")
        if self.duration < 0:
            raise ValueError(f"duration must be non-negative, got {self.duration!r}")
        if self.eta < 0:
            raise ValueError(f"eta must be non-negative, got {self.eta!r}")
        if self.kind != "carrier" and self.kind in RESONANT_KINDS and self.eta == 0 and self.rabi != 0:
            log.warning("%s pulse with eta = 0 does nothing", self.kind)


# --- Debye-Waller matrix elements -------------------------------------------


def debye_waller_factor(n: int, n_prime: int, eta: float) -> float:
    """Real coupling factor between Fock levels ``n`` and ``n_prime``.

    Equals ``<n'|exp(i eta (a + a^dag))|n>`` with the ``i^|n-n'|`` phase
    removed: ``exp(-eta^2/2) eta^d sqrt(n_<!/n_>!) L_{n_<}^d(eta^2)``.
    """
    if n < 0 or n_prime < 0:
        raise ValueError(f"Fock levels must be non-negative, got {n}, {n_prime}")
    lo, hi = min(n, n_prime), max(n, n_prime)
    d = hi - lo
    if eta == 0:
        return 1.0 if d == 0 else 0.0
    log_mag = -0.5 * eta * eta + d * math.log(eta) + 0.5 * (gammaln(lo + 1) - gammaln(hi + 1))
    return float(math.exp(log_mag) * eval_genlaguerre(lo, d, eta * eta))


def debye_waller_element(n: int, n_prime: int, eta: float) -> complex:
    """``<n'|exp(i eta (a + a^dag))|n>`` in closed form."""
    return (1j) ** abs(n - n_prime) * debye_waller_factor(n, n_prime, eta)


def rabi_nn(n: int, n_prime: int, eta: float, base_rabi: float, exact: bool = True) -> float:
    """Rabi rate of the ``n -> n_prime`` transition.

    ``exact`` uses the full Debye-Waller matrix element; otherwise the
    Lamb-Dicke form (``base`` on the carrier, ``eta sqrt(n_>) base`` on the
    first sidebands) is returned and only ``|n - n'| <= 1`` is allowed.
    """
    if n < 0 or n_prime < 0:
        raise ValueError(f"Fock levels must be non-negative, got {n}, {n_prime}")
    if exact:
        return abs(base_rabi) * abs(debye_waller_factor(n, n_prime, eta))
    d = abs(n - n_prime)
    if d == 0:
        return abs(base_rabi)
    if d == 1:
        return abs(base_rabi) * eta * math.sqrt(max(n, n_prime))
    raise ValueError("first-order Rabi rate is only defined for |n - n'| <= 1")


def _signed_coupling(n: int, n_prime: int, eta: float, exact: bool) -> float:
    if exact:
        return debye_waller_factor(n, n_prime, eta)
    d = abs(n - n_prime)
    return 1.0 if d == 0 else eta * math.sqrt(max(n, n_prime))


# --- analytic resonant pulses -------------------------------------------------


def _pairs(kind: str, n_max: int):
    if kind == "carrier":
        return [(n, n) for n in range(n_max + 1)]
    if kind == "red_sideband":
        return [(n, n - 1) for n in range(1, n_max + 1)]
    if kind == "blue_sideband":
        return [(n, n + 1) for n in range(n_max)]
    raise ValueError(f"not a resonant pulse kind: {kind!r}")


def resonant_pulse_unitary(seg: PulseSegment, n_max: int, exact_dw: bool = False, duration=None) -> np.ndarray:
    """Single-qubit propagator of a resonant pulse on the truncated space."""
    t = seg.duration if duration is None else duration
    dim = 2 * (n_max + 1)
    u = np.eye(dim, dtype=complex)
    rabi = complex(seg.rabi)
    phi = seg.phase + cmath.phase(rabi)
    eta = 0.0 if seg.kind == "carrier" and not exact_dw else seg.eta
    for n_down, n_up in _pairs(seg.kind, n_max):
        w = abs(rabi) * _signed_coupling(n_down, n_up, eta, exact_dw)
        c, s = math.cos(w * t), math.sin(w * t)
        i_d, i_u = n_down, (n_max + 1) + n_up
        u[i_d, i_d] = c
        u[i_u, i_u] = c
        u[i_u, i_d] = -1j * cmath.exp(1j * phi) * s
        u[i_d, i_u] = -1j * cmath.exp(-1j * phi) * s
    return u


def _check_overflow(state: FockSpinState, seg: PulseSegment) -> None:
    if seg.rabi == 0 or seg.duration == 0 or seg.kind == "carrier":
        return
    if seg.kind == "blue_sideband":
        leak = abs(state.amplitude(0, state.n_max)) ** 2
    else:
        leak = abs(state.amplitude(1, state.n_max)) ** 2
    if leak > OVERFLOW_TOL:
        raise TruncationError(
            f"{seg.kind} would couple population {leak:.3g} at n_max={state.n_max} out of the truncated space"
        )


def apply_resonant_pulse(
    state: FockSpinState,
    seg: PulseSegment,
    exact_dw: bool = False,
    sink: TrajectorySink | None = None,
    samples: int = 256,
) -> FockSpinState:
    """Evolve a one-qubit state under a resonant carrier or sideband pulse.

    Raises :class:`TruncationError` if the pulse would drive more than 1e-8
    of population past ``n_max``.
    """
    if state.spin_dim != 2:
        raise ValueError(f"resonant pulses act on one qubit (spin_dim=2), got spin_dim={state.spin_dim}")
    if seg.kind not in RESONANT_KINDS:
        raise ValueError(f"apply_resonant_pulse needs a carrier or sideband segment, got {seg.kind!r}")
    _check_overflow(state, seg)
    if sink is not None:
        for t in np.linspace(0.0, seg.duration, samples):
            u_t = resonant_pulse_unitary(seg, state.n_max, exact_dw, duration=t)
            sink(float(t), u_t @ state.amplitudes)
    u = resonant_pulse_unitary(seg, state.n_max, exact_dw)
    return state.evolve(u)


def pi_time(seg_kind: str, rabi: float, eta: float = 0.0, n: int = 0) -> float:
    """Duration of a pi pulse (``W t = pi/2``) on the pair starting at
    ``|down, n>`` (red sideband: the pair ``|down, n+1> <-> |up, n>``)."""
    if seg_kind == "carrier":
        w = abs(rabi)
    elif seg_kind == "red_sideband":
        w = rabi_nn(n + 1, n, eta, rabi, exact=False)
    elif seg_kind == "blue_sideband":
        w = rabi_nn(n, n + 1, eta, rabi, exact=False)
    else:
        raise ValueError(f"not a resonant pulse kind: {seg_kind!r}")
    return math.pi / (2 * w)


def mapping_target(alpha: complex, beta: complex, phase: float, n_max: int) -> FockSpinState:
    """Result of the spin-to-motion mapping pulse on ``(alpha|down> + beta|up>)|0>``:
    ``|down>(alpha|0> - i e^{-i phase} beta |1>)``."""
    return FockSpinState.from_components(
        {(0, 0): alpha, (0, 1): -1j * cmath.exp(-1j * phase) * beta}, 2, n_max
    )


# --- interaction-frame Hamiltonian --------------------------------------------


@dataclass(frozen=True)
class SpinFlipDrive:
    """Single-frequency drive of the qubit: ``rabi`` (rad/s, complex),
    ``detuning`` = drive minus qubit frequency (rad/s), phase ``phase``."""

    rabi: complex
    detuning: float
    phase: float = 0.0


@dataclass(frozen=True)
class ForceDrive:
    """Raman pair with difference frequency near the mode frequency; the
    couplings of each spin state produce a state-dependent force."""

    omega_down: complex
    omega_up: complex
    frequency: float


def sideband_resonance(kind: str, rabi: float, omega_z: float, light_shift: bool = True) -> float:
    """Drive detuning (drive minus qubit frequency) that is resonant with a
    sideband of the full Lamb-Dicke Hamiltonian.

    The off-resonant carrier shifts the two levels of each sideband pair by
    ``+-|rabi|^2/omega_z``; ``light_shift`` moves the drive onto the shifted
    resonance.
    """
    shift = 2 * abs(rabi) ** 2 / omega_z if light_shift else 0.0
    if kind == "carrier":
        return 0.0
    if kind == "red_sideband":
        return -omega_z + shift
    if kind == "blue_sideband":
        return omega_z - shift
    raise ValueError(f"not a resonant pulse kind: {kind!r}")


class InteractionHamiltonian:
    """Callable ``H(t)`` (units of hbar, rad/s) in the Lamb-Dicke limit,
    including every term: carrier and both sidebands, resonant or not.

    For two ions the spin-flip drive illuminates both ions equally and
    couples to a common mode with the same ``eta``; a force drive couples
    to the stretch mode with participation ``+-1/sqrt(2)``.
    """

    def __init__(self, drive, mode: MotionalMode, n_max: int, spin_count: int = 1):
        if spin_count not in (1, 2):
            raise ValueError(f"spin_count must be 1 or 2, got {spin_count!r}")
        self.drive = drive
        self.mode = mode
        self.n_max = n_max
        self.spin_count = spin_count
        a = ladder_lowering(n_max)
        eye_m = np.eye(n_max + 1)
        eye_s = np.eye(2)
        self.dim = (2**spin_count) * (n_max + 1)
        if isinstance(drive, SpinFlipDrive):
            sp = sigma_plus()
            ops = [sp] if spin_count == 1 else [np.kron(sp, eye_s), np.kron(eye_s, sp)]
            self._flip = [(embed(s, eye_m), embed(s, a), embed(s, a.conj().T)) for s in ops]
        elif isinstance(drive, ForceDrive):
            proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
            if spin_count == 1:
                self._force = [(p, 1.0) for p in proj]
            else:
                s = 1 / math.sqrt(2)
                self._force = [(np.kron(p, eye_s), s) for p in proj] + [
                    (np.kron(eye_s, p), -s) for p in proj
                ]
            self._eye_m, self._a = eye_m, a
        else:
            raise TypeError(f"unsupported drive type {type(drive).__name__}")

    def __call__(self, t: float) -> np.ndarray:
        eta, wz = self.mode.eta, self.mode.omega_z
        lower = cmath.exp(-1j * wz * t)
        raise_ = cmath.exp(1j * wz * t)
        if isinstance(self.drive, SpinFlipDrive):
            pref = complex(self.drive.rabi) * cmath.exp(1j * self.drive.phase) * cmath.exp(-1j * self.drive.detuning * t)
            m = np.zeros((self.dim, self.dim), dtype=complex)
            for carrier, red, blue in self._flip:
                m += pref * (carrier + 1j * eta * (red * lower + blue * raise_))
        else:
            drv = self.drive
            m = np.zeros((self.dim, self.dim), dtype=complex)
            rot = cmath.exp(-1j * drv.frequency * t)
            for i, (proj, part) in enumerate(self._force):
                rabi = drv.omega_down if i % 2 == 0 else drv.omega_up
                motion = self._eye_m + 1j * eta * part * (self._a * lower + self._a.conj().T * raise_)
                m += rabi * rot * np.kron(proj, motion)
        return m + m.conj().T


def build_interaction_hamiltonian(drive, mode: MotionalMode, n_max: int, t: float, spin_count: int = 1) -> np.ndarray:
    """``H_I(t) / hbar`` on the truncated space."""
    return InteractionHamiltonian(drive, mode, n_max, spin_count)(t)


def displacement_hamiltonian(forces, delta: float, n_max: int) -> Callable[[float], np.ndarray]:
    """Resonant spin-dependent force in the mode's interaction frame.

    ``forces[s]`` is the drive rate ``eta * Omega`` (rad/s) acting on spin
    basis state ``s``; the block for ``s`` is
    ``i (F_s e^{i delta t} a^dag - F_s^* e^{-i delta t} a)``.
    """
    forces = np.asarray(forces, dtype=complex)
    a = ladder_lowering(n_max)
    ad = a.conj().T
    spins = forces.size

    def h(t):
        ph = cmath.exp(1j * delta * t)
        m = np.zeros((spins * (n_max + 1),) * 2, dtype=complex)
        for s, f in enumerate(forces):
            if f == 0:
                continue
            blk = slice(s * (n_max + 1), (s + 1) * (n_max + 1))
            m[blk, blk] = 1j * (f * ph * ad - (f * ph).conjugate() * a)
        return m

    return h


def to_drive_frame(state: FockSpinState, offset: float, t: float) -> FockSpinState:
    """Re-express an interaction-frame state in the frame of a drive that is
    detuned by ``offset`` from the bare transition (e.g. a light-shifted
    sideband resonance): ``|up>`` amplitudes gain ``e^{+i offset t}``.

    Relative spin phases from the oracle are comparable with the analytic
    route only in this frame, because the analytic pulses omit light shifts.
    """
    amps = np.array(state.amplitudes)
    amps[state.n_levels :] *= cmath.exp(1j * offset * t)
    return state.with_amplitudes(amps)


# --- numerical oracle ---------------------------------------------------------


def integrate_schrodinger(
    psi0: np.ndarray,
    hamiltonian_fn: Callable[[float], np.ndarray],
    t_span: tuple[float, float],
    tol: float = DEFAULT_TOL,
    t_eval=None,
):
    """Raw integration of ``i dpsi/dt = H(t) psi``; returns ``(times, states)``
    with states as columns.  No renormalization is applied."""
    if not tol > 0:
        raise ValueError(f"tol must be positive, got {tol!r}")

    def rhs(t, y):
        return -1j * (hamiltonian_fn(t) @ y)

    sol = solve_ivp(
        rhs, t_span, np.asarray(psi0, dtype=complex), method="DOP853",
        rtol=tol, atol=tol * 1e-2, t_eval=t_eval,
    )
    if sol.status != 0:
        raise StepFailure(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")
    return sol.t, sol.y


def propagate_numerically(
    state: FockSpinState,
    hamiltonian_fn: Callable[[float], np.ndarray],
    T: float,
    tol: float = DEFAULT_TOL,
    sink: TrajectorySink | None = None,
    samples: int = 256,
    t0: float = 0.0,
) -> FockSpinState:
    """Propagate ``state`` from ``t0`` to ``t0 + T`` with adaptive
    8th-order Dormand-Prince steps at relative tolerance ``tol``.

    Raises :class:`StepFailure` if the step size underflows.
    """
    if T < 0:
        raise ValueError(f"T must be non-negative, got {T!r}")
    if T == 0:
        if sink is not None:
            sink(t0, np.array(state.amplitudes))
        return state
    t_eval = np.linspace(t0, t0 + T, samples) if sink is not None else None
    times, ys = integrate_schrodinger(state.amplitudes, hamiltonian_fn, (t0, t0 + T), tol, t_eval)
    if sink is not None:
        for k, t in enumerate(times):
            sink(float(t), ys[:, k])
    final = ys[:, -1]
    drift = abs(np.linalg.norm(final) - 1.0)
    if drift > 10 * tol:
        log.warning("norm drift %.3g exceeds 10*tol", drift)
    if drift > 1e-9:
        final = final / np.linalg.norm(final)
    return state.with_amplitudes(final)


# --- spin-dependent displacement ---------------------------------------------


def displacement_amplitude(force: complex, delta: float, t: float) -> complex:
    """Phase-space displacement ``alpha(t)`` driven by ``F e^{i delta t}``."""
    force = complex(force)
    if delta == 0:
        return force * t
    return force * (cmath.exp(1j * delta * t) - 1) / (1j * delta)


def geometric_phase(force: complex, delta: float, t: float) -> float:
    """Phase accumulated along the displacement path up to time ``t``.

    One closed loop (``t = 2 pi / delta``) gives ``2 pi |F/delta|^2``.
    """
    if delta == 0:
        return 0.0
    return abs(force) ** 2 / delta * (t - math.sin(delta * t) / delta)


def loop_radius(force: complex, delta: float, T: float) -> float:
    return abs(force) * T if delta == 0 else abs(force / delta)


def required_n_max(radius: float) -> int:
    """Truncation needed for displacement paths of the given radius."""
    return math.ceil((radius + 4.0) ** 2)


def _motional_displace(psi_m: np.ndarray, force: complex, delta: float, t: float, n_max: int) -> np.ndarray:
    if force == 0:
        return psi_m
    alpha = displacement_amplitude(force, delta, t)
    return cmath.exp(1j * geometric_phase(force, delta, t)) * (displacement_operator(alpha, n_max) @ psi_m)


def displace_components(
    state: FockSpinState,
    forces,
    delta: float,
    T: float,
    sink: TrajectorySink | None = None,
    samples: int = 256,
) -> FockSpinState:
    """Apply the closed-form spin-dependent displacement with per-spin
    drive rates ``forces`` (one entry per spin basis state)."""
    forces = [complex(f) for f in forces]
    if len(forces) != state.spin_dim:
        raise ValueError(f"need {state.spin_dim} forces, got {len(forces)}")
    radius = max(loop_radius(f, delta, T) for f in forces)
    need = required_n_max(radius)
    if state.n_max < need:
        raise TruncationError(f"loop radius {radius:.3g} needs n_max >= {need}, got {state.n_max}")

    def at(t):
        parts = [
            _motional_displace(state.motional(s), f, delta, t, state.n_max) for s, f in enumerate(forces)
        ]
        return np.concatenate(parts)

    if sink is not None:
        for t in np.linspace(0.0, T, samples):
            sink(float(t), at(float(t)))
    return state.with_amplitudes(at(T))


def spin_dependent_displacement(
    state: FockSpinState,
    omega_down: complex,
    omega_up: complex,
    eta: float,
    delta: float,
    T: float,
    sink: TrajectorySink | None = None,
    samples: int = 256,
) -> FockSpinState:
    """Drive the mode of one qubit with the force ``eta * Omega(m_S)``.

    Each spin component's motional state is carried around a circle of
    radius ``|eta Omega(m_S) / delta|`` that closes at ``T = 2 pi / delta``.
    """
    if state.spin_dim != 2:
        raise ValueError(f"expected a single qubit (spin_dim=2), got spin_dim={state.spin_dim}")
    return displace_components(state, [eta * omega_down, eta * omega_up], delta, T, sink, samples)


def apply_segment(state: FockSpinState, seg: PulseSegment, exact_dw: bool = False, **kwargs) -> FockSpinState:
    if seg.kind == "displacement_force":
        return spin_dependent_displacement(
            state, seg.rabi, seg.rabi_up, seg.eta, seg.detuning_delta, seg.duration, **kwargs
        )
    return apply_resonant_pulse(state, seg, exact_dw, **kwargs)


def apply_sequence(state: FockSpinState, segments, exact_dw: bool = False) -> FockSpinState:
    for seg in segments:
        state = apply_segment(state, seg, exact_dw)
    return state
