"""States and operators on a spin space tensored with one truncated oscillator.

Basis ordering is spin-major: index ``s * (n_max + 1) + n`` holds the
amplitude of spin state ``s`` with ``n`` motional quanta.  For one qubit
``s = 0`` is down and ``s = 1`` is up; for two qubits the spin index is
``2 * s1 + s2`` so the order is (dd, du, ud, uu).

Operators are plain complex ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import expm

NORM_TOL = 1e-9

SPIN_LABELS = {
    1: ("",),
    2: ("down", "up"),
    4: ("down,down", "down,up", "up,down", "up,up"),
}


@dataclass(frozen=True)
class FockSpinState:
    """Normalized pure state of ``spin_dim`` spin levels times ``n_max + 1`` Fock levels."""

    spin_dim: int
    n_max: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.spin_dim < 1:
            raise ValueError(f"spin_dim must be positive, got {self.spin_dim}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        amps = np.array(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.dim:
            raise ValueError(
                f"amplitude vector has length {amps.size}, expected {self.dim}"
            )
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |c|^2 = {norm2!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.spin_dim * (self.n_max + 1)

    @property
    def n_levels(self) -> int:
        return self.n_max + 1

    def index(self, spin: int, n: int) -> int:
        if not (0 <= spin < self.spin_dim and 0 <= n <= self.n_max):
            raise IndexError(f"basis state ({spin}, {n}) outside the truncated space")
        return spin * self.n_levels + n

    def amplitude(self, spin: int, n: int) -> complex:
        return complex(self.amplitudes[self.index(spin, n)])

    def motional(self, spin: int) -> np.ndarray:
        """Unnormalized motional amplitudes attached to spin state ``spin``."""
        start = spin * self.n_levels
        return self.amplitudes[start : start + self.n_levels]

    def spin_populations(self) -> np.ndarray:
        probs = np.abs(self.amplitudes.reshape(self.spin_dim, self.n_levels)) ** 2
        return probs.sum(axis=1)

    def evolve(self, unitary: np.ndarray) -> "FockSpinState":
        return self.with_amplitudes(unitary @ self.amplitudes)

    def with_amplitudes(self, amplitudes) -> "FockSpinState":
        return FockSpinState(self.spin_dim, self.n_max, amplitudes)

    @classmethod
    def basis(cls, spin: int, n: int, spin_dim: int = 2, n_max: int = 10) -> "FockSpinState":
        amps = np.zeros(spin_dim * (n_max + 1), dtype=complex)
        amps[spin * (n_max + 1) + n] = 1.0
        return cls(spin_dim, n_max, amps)

    @classmethod
    def from_components(
        cls, components: dict, spin_dim: int = 2, n_max: int = 10, normalize: bool = False
    ) -> "FockSpinState":
        """Build a state from ``{(spin, n): amplitude}``."""
        amps = np.zeros(spin_dim * (n_max + 1), dtype=complex)
        for (spin, n), c in components.items():
            if not (0 <= spin < spin_dim and 0 <= n <= n_max):
                raise IndexError(f"basis state ({spin}, {n}) outside the truncated space")
            amps[spin * (n_max + 1) + n] += c
        if normalize:
            amps = amps / np.linalg.norm(amps)
        return cls(spin_dim, n_max, amps)

    @classmethod
    def product(cls, spin_amplitudes, motional_amplitudes) -> "FockSpinState":
        spin_amplitudes = np.asarray(spin_amplitudes, dtype=complex)
        motional_amplitudes = np.asarray(motional_amplitudes, dtype=complex)
        return cls(
            spin_amplitudes.size,
            motional_amplitudes.size - 1,
            np.kron(spin_amplitudes, motional_amplitudes),
        )

    def labels(self) -> list[tuple[str, int]]:
        names = SPIN_LABELS.get(self.spin_dim) or tuple(str(s) for s in range(self.spin_dim))
        return [(names[s], n) for s in range(self.spin_dim) for n in range(self.n_levels)]


def _check_n_max(n_max: int) -> None:
    if int(n_max) != n_max or n_max < 1:
        raise ValueError(f"n_max must be an integer >= 1, got {n_max!r}")


@lru_cache(maxsize=64)
def _lowering(n_max: int) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)
    a.setflags(write=False)
    return a


def ladder_lowering(n_max: int) -> np.ndarray:
    """Annihilation operator with ``<n-1|a|n> = sqrt(n)`` on levels 0..n_max."""
    _check_n_max(n_max)
    return _lowering(int(n_max)).copy()


def ladder_raising(n_max: int) -> np.ndarray:
    return ladder_lowering(n_max).conj().T


def number_operator(n_max: int) -> np.ndarray:
    _check_n_max(n_max)
    return np.diag(np.arange(n_max + 1, dtype=float)).astype(complex)


def sigma_plus() -> np.ndarray:
    """``|up><down|`` in the (down, up) ordering."""
    return np.array([[0, 0], [1, 0]], dtype=complex)


def sigma_minus() -> np.ndarray:
    return sigma_plus().T.copy()


def embed(spin_op: np.ndarray, motion_op: np.ndarray) -> np.ndarray:
    """Tensor product in the spin-major ordering."""
    return np.kron(spin_op, motion_op)


def displacement_operator(alpha: complex, n_max: int) -> np.ndarray:
    """``exp(alpha a^dag - alpha^* a)`` on the truncated space.

    The result is exactly unitary but only matches the infinite-dimensional
    operator on low-lying columns; see :func:`truncation_interior`.
    """
    _check_n_max(n_max)
    alpha = complex(alpha)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ValueError(f"displacement must be finite, got {alpha!r}")
    if alpha == 0:
        return np.eye(n_max + 1, dtype=complex)
    a = _lowering(int(n_max))
    return expm(alpha * a.conj().T - alpha.conjugate() * a)


@lru_cache(maxsize=256)
def _interior(abs_alpha: float, n_max: int, tol: float) -> int:
    exact = displacement_operator(abs_alpha, 2 * n_max + 20)[: n_max + 1, : n_max + 1]
    err = np.abs(displacement_operator(abs_alpha, n_max) - exact).max(axis=0)
    bad = np.flatnonzero(err >= tol)
    return int(bad[0]) - 1 if bad.size else n_max


def truncation_interior(alpha: complex, n_max: int, tol: float = 1e-10) -> int:
    """Highest Fock level ``k`` such that columns ``0..k`` of the truncated
    displacement agree with the untruncated operator to ``tol``.

    The reference is the same exponential on a space more than twice as
    large.  Returns -1 when even the vacuum column is corrupted.
    """
    _check_n_max(n_max)
    return _interior(round(abs(complex(alpha)), 12), int(n_max), float(tol))


def coherent_state(alpha: complex, n_max: int) -> FockSpinState:
    """Coherent state ``|alpha>`` from the Poisson amplitudes, renormalized
    after truncation (``spin_dim = 1``)."""
    _check_n_max(n_max)
    alpha = complex(alpha)
    if abs(alpha) ** 2 > n_max / 4:
        raise ValueError(
            f"|alpha|^2 = {abs(alpha) ** 2:.4g} exceeds n_max/4 = {n_max / 4:.4g}"
        )
    n = np.arange(n_max + 1)
    # log-space keeps alpha**n / sqrt(n!) finite for large n_max
    log_fact = np.array([math.lgamma(k + 1) for k in n])
    if alpha == 0:
        amps = (n == 0).astype(complex)
    else:
        amps = np.exp(
            -abs(alpha) ** 2 / 2 + n * np.log(abs(alpha)) - 0.5 * log_fact + 1j * n * np.angle(alpha)
        )
    return FockSpinState(1, n_max, amps / np.linalg.norm(amps))


def fidelity(a: FockSpinState, b: FockSpinState) -> float:
    """``|<a|b>|^2``."""
    if (a.spin_dim, a.n_max) != (b.spin_dim, b.n_max):
        raise ValueError(
            f"dimension mismatch: ({a.spin_dim}, {a.n_max}) vs ({b.spin_dim}, {b.n_max})"
        )
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def reduced_motional_population(state: FockSpinState) -> np.ndarray:
    """Probability of each Fock level with the spin traced out."""
    probs = np.abs(state.amplitudes.reshape(state.spin_dim, state.n_levels)) ** 2
    return probs.sum(axis=0)


def unitarity_error(u: np.ndarray, interior: int | None = None) -> float:
    """``max |U^dag U - I|`` restricted to the first ``interior + 1`` columns.

    ``interior`` indexes the whole matrix (for spin-motion operators pass the
    flattened cutoff); ``None`` checks every column.
    """
    u = np.asarray(u)
    cols = u if interior is None else u[:, : interior + 1]
    gram = cols.conj().T @ cols
    return float(np.abs(gram - np.eye(gram.shape[0])).max())


def is_unitary(u: np.ndarray, tol: float = 1e-9, interior: int | None = None) -> bool:
    return unitarity_error(u, interior) < tol


def interior_mask(spin_dim: int, n_max: int, cutoff: int) -> np.ndarray:
    """Boolean mask over the spin-major basis selecting ``n <= cutoff``."""
    return np.tile(np.arange(n_max + 1) <= cutoff, spin_dim)
