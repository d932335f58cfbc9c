"""Driven n-level systems and their reduction to a constant coupling matrix.

A system of n levels (energies E_0 < ... < E_{n-1}, hbar = 1) is driven by one
laser per level pair, n(n-1)/2 fields in total.  Under the rotating-wave
approximation, and when every drive frequency matches the level spacing it
addresses (resonance for adjacent pairs, consistency for the rest), the
rotating-frame Hamiltonian collapses to the real symmetric zero-diagonal
matrix Q of coupling constants, and the state evolves as
U(t) exp(-itQ) psi(0) with U(t) a diagonal phase matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConditionError, InvalidInputError

Pair = tuple[int, int]

_NORM_ATOL = 1e-12


def _level_pairs(n: int) -> list[Pair]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _canonical_pairs(values, n: int, what: str) -> dict[Pair, float]:
    """Normalize a {(i, j): value} map to i < j keys and validate coverage."""
    out: dict[Pair, float] = {}
    for key, value in values.items():
        i, j = int(key[0]), int(key[1])
        if i == j or not (0 <= i < n and 0 <= j < n):
            raise InvalidInputError(f"{what} key {key!r} is not a valid level pair")
        if i > j:
            i, j = j, i
        if (i, j) in out:
            raise InvalidInputError(f"duplicate {what} entry for pair ({i}, {j})")
        v = float(value)
        if not np.isfinite(v):
            raise InvalidInputError(f"{what}[{i},{j}] is not finite")
        out[(i, j)] = v
    return out


@dataclass(frozen=True)
class LevelSystem:
    """Physical scenario: level energies plus one drive per level pair.

    ``couplings`` holds the post-RWA coupling constants g_ij >= 0,
    ``drive_frequencies`` the laser frequencies omega_ij, and ``phases`` the
    optional drive phases phi_ij (radians).  All three are keyed by the level
    pair (i, j) with i < j; couplings and frequencies must cover every pair.
    All quantities share one angular-frequency unit; time is its inverse.
    """

    energies: tuple[float, ...]
    couplings: dict[Pair, float]
    drive_frequencies: dict[Pair, float]
    phases: dict[Pair, float] = field(default_factory=dict)

    def __post_init__(self):
        energies = tuple(float(e) for e in self.energies)
        object.__setattr__(self, "energies", energies)
        n = len(energies)
        if n < 2:
            raise InvalidInputError("a level system needs at least two levels")
        if not all(np.isfinite(energies)):
            raise InvalidInputError("energies must be finite")
        if any(energies[j] <= energies[j - 1] for j in range(1, n)):
            raise InvalidInputError("energies must be strictly increasing")

        pairs = _level_pairs(n)
        couplings = _canonical_pairs(self.couplings, n, "coupling")
        freqs = _canonical_pairs(self.drive_frequencies, n, "drive frequency")
        for name, table in (("couplings", couplings), ("drive_frequencies", freqs)):
            if set(table) != set(pairs):
                raise InvalidInputError(
                    f"{name} must list every pair: expected {len(pairs)} entries, "
                    f"got {len(table)}"
                )
        if any(g < 0.0 for g in couplings.values()):
            raise InvalidInputError("couplings must be non-negative")

        phases = _canonical_pairs(self.phases, n, "phase")
        for pair in pairs:
            phases.setdefault(pair, 0.0)

        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "drive_frequencies", freqs)
        object.__setattr__(self, "phases", phases)

    @property
    def n(self) -> int:
        return len(self.energies)

    @classmethod
    def resonant(cls, energies, couplings, phases=None) -> "LevelSystem":
        """Build a system whose every drive satisfies omega_ij = E_j - E_i.

        Such a system meets both the resonance and the consistency condition
        by construction.
        """
        energies = tuple(float(e) for e in energies)
        freqs = {
            (i, j): energies[j] - energies[i]
            for (i, j) in _level_pairs(len(energies))
        }
        return cls(energies, dict(couplings), freqs, dict(phases or {}))

    def detunings(self) -> np.ndarray:
        """Delta_j = E_j - E_0 for j = 0..n-1 (the constant E_0 is dropped)."""
        e = np.asarray(self.energies)
        return e - e[0]

    def sequential_frequencies(self) -> np.ndarray:
        """The adjacent-pair drive frequencies omega_l = omega_{l-1,l}, l = 1..n-1."""
        return np.array(
            [self.drive_frequencies[(j - 1, j)] for j in range(1, self.n)]
        )

    def max_drive_frequency(self) -> float:
        return max(abs(w) for w in self.drive_frequencies.values())

    def has_phases(self) -> bool:
        return any(p != 0.0 for p in self.phases.values())

    def without_phases(self) -> "LevelSystem":
        if not self.has_phases():
            return self
        return LevelSystem(self.energies, self.couplings, self.drive_frequencies)


@dataclass(frozen=True)
class CouplingMatrix:
    """Real symmetric matrix of coupling constants with exactly zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 2:
            raise InvalidInputError("coupling matrix must be square, n >= 2")
        if not np.isfinite(a).all():
            raise InvalidInputError("coupling matrix entries must be finite")
        if np.any(np.diag(a) != 0.0):
            raise InvalidInputError("coupling matrix diagonal must be exactly zero")
        if np.any(a != a.T):
            raise InvalidInputError("coupling matrix must be exactly symmetric")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a resonance or consistency check.

    ``residuals`` maps a condition label to its absolute frequency mismatch;
    ``worst`` is the largest residual and ``satisfied`` is worst <= tolerance.
    """

    satisfied: bool
    residuals: dict[str, float]
    worst: float
    tolerance: float


@dataclass(frozen=True)
class StateVector:
    """Complex amplitude vector of unit Euclidean norm (within 1e-12)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex)
        if a.ndim != 1 or a.size < 2:
            raise InvalidInputError("state vector must be 1-D with n >= 2")
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > _NORM_ATOL:
            raise InvalidInputError(
                f"state vector norm {norm!r} deviates from 1 by more than {_NORM_ATOL}"
            )
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        return self.amplitudes.size

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        a = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(a)
        if norm == 0.0:
            raise InvalidInputError("cannot normalize the zero vector")
        return cls(a / norm)

    @classmethod
    def basis(cls, n: int, index: int) -> "StateVector":
        a = np.zeros(n, dtype=complex)
        a[index] = 1.0
        return cls(a)

    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def default_condition_tolerance(system: LevelSystem) -> float:
    """1e-9 relative to the largest drive frequency (floored at 1 unit)."""
    return 1e-9 * max(1.0, system.max_drive_frequency())


def build_q(system: LevelSystem) -> CouplingMatrix:
    """Assemble Q: Q[i][j] = g_ij off the diagonal, zeros on it.

    Q depends only on the couplings, not on energies, frequencies or phases.
    """
    n = system.n
    q = np.zeros((n, n))
    for (i, j), g in system.couplings.items():
        q[i, j] = g
        q[j, i] = g
    return CouplingMatrix(q)


def check_resonance(system: LevelSystem, tol: float | None = None) -> ConditionReport:
    """Check omega_{j-1,j} = E_j - E_{j-1} for every adjacent pair."""
    tol = default_condition_tolerance(system) if tol is None else float(tol)
    if tol <= 0.0:
        raise InvalidInputError("tolerance must be positive")
    e = system.energies
    residuals = {
        f"omega[{j - 1},{j}]": abs(
            system.drive_frequencies[(j - 1, j)] - (e[j] - e[j - 1])
        )
        for j in range(1, system.n)
    }
    worst = max(residuals.values())
    return ConditionReport(worst <= tol, residuals, worst, tol)


def check_consistency(system: LevelSystem, tol: float | None = None) -> ConditionReport:
    """Check omega_ij = omega_{i+1} + ... + omega_j for every pair with j - i >= 2.

    The omega_l on the right are the adjacent-pair frequencies; under
    resonance the sum equals E_j - E_i.  Two-level systems satisfy this
    vacuously.
    """
    tol = default_condition_tolerance(system) if tol is None else float(tol)
    if tol <= 0.0:
        raise InvalidInputError("tolerance must be positive")
    seq = system.sequential_frequencies()
    residuals = {}
    for (i, j), w in system.drive_frequencies.items():
        if j - i < 2:
            continue
        residuals[f"epsilon[{i},{j}]"] = abs(w - float(np.sum(seq[i:j])))
    worst = max(residuals.values(), default=0.0)
    return ConditionReport(worst <= tol, residuals, worst, tol)


def frame_matrix(system: LevelSystem, t: float) -> np.ndarray:
    """Diagonal frame transform U(t) = diag(1, e^{-i omega_1 t}, e^{-i(omega_1+omega_2)t}, ...).

    The accumulated phases use the adjacent-pair drive frequencies; U is
    unitary for every t.
    """
    acc = np.concatenate(([0.0], np.cumsum(system.sequential_frequencies())))
    return np.diag(np.exp(-1j * acc * t))


def hamiltonian_rwa(system: LevelSystem, t: float) -> np.ndarray:
    """Lab-frame RWA Hamiltonian H_0 + V(t) at time t.

    H_0 = diag(0, Delta_1, ..., Delta_{n-1}); V carries g_ij e^{i omega_ij t}
    above the diagonal and its conjugate below, so H is Hermitian exactly.
    Drive phases are not representable on this path and are rejected.
    """
    if system.has_phases():
        raise InvalidInputError(
            "the RWA interaction is phase-free; nonzero drive phases are only "
            "supported by hamiltonian_full"
        )
    h = np.diag(system.detunings().astype(complex))
    for (i, j), g in system.couplings.items():
        v = g * np.exp(1j * system.drive_frequencies[(i, j)] * t)
        h[i, j] = v
        h[j, i] = np.conjugate(v)
    return h


def hamiltonian_full(system: LevelSystem, t: float) -> np.ndarray:
    """Cosine-drive Hamiltonian without the rotating-wave approximation.

    Off-diagonal entries are 2 g_ij cos(omega_ij t + phi_ij); the matrix is
    real symmetric at every t, and phases are honored here.  The factor 2
    keeps both Hamiltonians describing the same physical drive: the stored
    couplings follow the rotating-frame convention, where a cosine drive of
    amplitude A contributes A/2 to the co-rotating term that survives the
    approximation.
    """
    h = np.diag(system.detunings().astype(complex))
    for (i, j), g in system.couplings.items():
        v = 2.0 * g * np.cos(
            system.drive_frequencies[(i, j)] * t + system.phases[(i, j)]
        )
        h[i, j] = v
        h[j, i] = v
    return h


def rotating_frame_hamiltonian(system: LevelSystem, t: float) -> np.ndarray:
    """Generator of the rotating-frame dynamics, U(t)^dag H(t) U(t) - diag(accumulated omega).

    Diagonal entries are Delta_j minus the accumulated adjacent frequencies;
    off-diagonal entries are g_ij e^{i epsilon_ij t}.  When the resonance and
    consistency conditions hold this equals Q for all t.
    """
    acc = np.concatenate(([0.0], np.cumsum(system.sequential_frequencies())))
    h = np.diag((system.detunings() - acc).astype(complex))
    for (i, j), g in system.couplings.items():
        eps = system.drive_frequencies[(i, j)] - (acc[j] - acc[i])
        v = g * np.exp(1j * eps * t)
        h[i, j] = v
        h[j, i] = np.conjugate(v)
    return h


def full_solution(
    system: LevelSystem,
    psi0: StateVector,
    t: float,
    method=None,
    tol: float | None = None,
) -> StateVector:
    """Evolve psi0 to time t through the closed-form pipeline U(t) exp(-itQ) psi0.

    Requires the resonance and consistency conditions (checked at ``tol``,
    defaulting to 1e-9 relative to the largest drive frequency) and zero
    phases; raises ConditionError otherwise.  ``method`` optionally forces a
    propagator method.
    """
    from .propagator import propagator  # deferred: propagator builds on these types

    if system.has_phases():
        raise InvalidInputError("closed-form evolution requires zero drive phases")
    resonance = check_resonance(system, tol)
    consistency = check_consistency(system, tol)
    if not (resonance.satisfied and consistency.satisfied):
        raise ConditionError(resonance, consistency)
    if psi0.n != system.n:
        raise InvalidInputError("initial state dimension does not match the system")
    prop = propagator(build_q(system), t, method)
    amplitudes = frame_matrix(system, t) @ (prop.matrix @ psi0.amplitudes)
    return StateVector(amplitudes)
