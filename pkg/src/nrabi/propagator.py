"""Unitary propagators exp(-itQ) for coupling matrices.

Several routes to the same matrix, each valid on its own domain:

* two-level closed form (n = 2),
* Cayley-Hamilton / Lagrange-interpolation polynomial in Q (n = 3, 4,
  non-degenerate spectrum),
* rank-one closed form when all couplings are equal (any n),
* diagonalization, either through the closed-form 3x3 eigenvectors or a
  cyclic Jacobi sweep (any n),
* a scaling-and-squaring reference exponential.

``propagator`` dispatches between them; the individual routes stay exposed so
they can be cross-checked against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DegenerateSpectrumError, InvalidInputError
from .model import CouplingMatrix
from .roots import DEGENERACY_GAP_RTOL, Spectrum, closed_form_spectrum

_EQUAL_COUPLING_RTOL = 1e-12
_EIGENVECTOR_RESIDUAL_RTOL = 1e-8
_DIRECTION_RTOL = 1e-10
_FALLBACK_RTOL = 1e-8


class Method(str, Enum):
    """How a propagator matrix was (or should be) computed."""

    TWO_LEVEL = "two_level"
    LAGRANGE3 = "lagrange3"
    LAGRANGE4 = "lagrange4"
    EQUAL_COUPLING = "equal_coupling"
    CLOSED_EIGEN3 = "closed_eigen3"
    JACOBI = "jacobi"
    REFERENCE = "reference"


@dataclass(frozen=True)
class Propagator:
    """exp(-itQ) as a concrete complex matrix, tagged with its construction."""

    n: int
    matrix: np.ndarray
    t: float
    method: Method

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


@dataclass(frozen=True)
class LagrangeCoeffs:
    """Coefficients f_k with exp(-itQ) = sum_k f_k(t) Q^k.

    ``f[k]`` multiplies Q^k; by construction sum_k f_k lambda_j^k = e^{-it lambda_j}
    for every eigenvalue lambda_j.
    """

    f: np.ndarray
    t: float
    spectrum: Spectrum


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum plus the orthogonal eigenvector matrix (columns) of Q."""

    spectrum: Spectrum
    vectors: np.ndarray


def propagator_two_level(g: float, t: float) -> Propagator:
    """Resonant two-level propagator [[cos gt, -i sin gt], [-i sin gt, cos gt]]."""
    c = math.cos(g * t)
    s = math.sin(g * t)
    matrix = np.array([[c, -1j * s], [-1j * s, c]])
    return Propagator(2, matrix, t, Method.TWO_LEVEL)


def propagator_equal_coupling(n: int, g: float, t: float) -> Propagator:
    """Closed form for Q = g*R with R the all-ones off-diagonal matrix.

    R + I is rank one, so exp(-itQ) = e^{igt} (I + (e^{-ingt} - 1)/n * J) with
    J the all-ones matrix.
    """
    if n < 2:
        raise InvalidInputError("equal-coupling propagator needs n >= 2")
    phase = np.exp(1j * g * t)
    shared = phase * (np.exp(-1j * n * g * t) - 1.0) / n
    matrix = np.full((n, n), shared, dtype=complex)
    np.fill_diagonal(matrix, phase + shared)
    return Propagator(n, matrix, t, Method.EQUAL_COUPLING)


def lagrange_coeffs(spectrum: Spectrum, t: float) -> LagrangeCoeffs:
    """Polynomial coefficients interpolating e^{-it lambda} on the spectrum.

    f is the coefficient vector of sum_j e^{-it lambda_j} l_j(lambda) with
    l_j the Lagrange basis polynomials, i.e. the solution of the Vandermonde
    system sum_k f_k lambda_j^k = e^{-it lambda_j}.  The basis denominators
    contain every eigenvalue gap, so a near-degenerate spectrum is rejected.
    """
    lam = spectrum.eigenvalues
    n = spectrum.n
    if spectrum.degeneracy_gap <= DEGENERACY_GAP_RTOL * spectrum.spectral_radius:
        raise DegenerateSpectrumError(
            f"eigenvalue gap {spectrum.degeneracy_gap:.3e} is below "
            f"{DEGENERACY_GAP_RTOL:.0e} of the spectral radius; "
            "use a diagonalization method"
        )
    f = np.zeros(n, dtype=complex)
    for j in range(n):
        basis = np.array([1.0])  # ascending monomial coefficients of l_j numerator
        denom = 1.0
        for k in range(n):
            if k == j:
                continue
            extended = np.zeros(len(basis) + 1)
            extended[:-1] -= lam[k] * basis  # multiply by (lambda - lambda_k)
            extended[1:] += basis
            basis = extended
            denom *= lam[j] - lam[k]
        f += np.exp(-1j * t * lam[j]) / denom * basis
    return LagrangeCoeffs(f=f, t=t, spectrum=spectrum)


def propagator_lagrange(q: CouplingMatrix, t: float) -> Propagator:
    """exp(-itQ) = f_0 I + f_1 Q + ... + f_{n-1} Q^{n-1} for n = 3, 4.

    The eigenvalues come from the radical solvers; the Q powers are formed by
    repeated symmetric multiplication so this path never diagonalizes.
    """
    if q.n not in (3, 4):
        raise InvalidInputError(
            f"the polynomial expansion is implemented for n = 3, 4, got n = {q.n}"
        )
    spectrum = closed_form_spectrum(q)
    coeffs = lagrange_coeffs(spectrum, t)
    method = Method.LAGRANGE3 if q.n == 3 else Method.LAGRANGE4
    if t == 0.0:
        return Propagator(q.n, np.eye(q.n, dtype=complex), t, method)
    matrix = coeffs.f[0] * np.eye(q.n, dtype=complex)
    power = np.eye(q.n)
    for k in range(1, q.n):
        power = power @ q.entries
        matrix += coeffs.f[k] * power
    return Propagator(q.n, matrix, t, method)


def _unnormalized_eigenvector(
    g1: float, g2: float, g3: float, lam: float
) -> np.ndarray:
    # elimination form of (Q - lam I) x = 0 solved for the third component
    return np.array([lam * g3 + g1 * g2, lam * g2 + g1 * g3, lam * lam - g1 * g1])


def eigenvectors_three_level(q: CouplingMatrix, spectrum: Spectrum) -> EigenDecomposition:
    """Closed-form normalized eigenvectors of a 3x3 coupling matrix.

    Column j has components sqrt((lambda_j^2 - g_{k+1}^2) / D_j) for k = 0..2
    with g_4 = g_1 and D_j = 3 lambda_j^2 - (g1^2 + g2^2 + g3^2).  The square
    roots fix magnitudes only; the sign pattern (first component kept
    non-negative) is chosen by exhaustive search to minimize ||Q x - lambda x||.
    When lambda_j^2 sits within 1e-8 of some g_k^2 the cancellation spoils the
    magnitudes, and the unnormalized elimination form
    (lambda g3 + g1 g2, lambda g2 + g1 g3, lambda^2 - g1^2) is used instead.
    A vanishing D_j means the eigendirection is not isolated: degeneracy error.
    """
    if q.n != 3:
        raise InvalidInputError(f"closed-form eigenvectors need n = 3, got n = {q.n}")
    a = q.entries
    g1, g2, g3 = a[0, 1], a[1, 2], a[0, 2]
    gsq = g1 * g1 + g2 * g2 + g3 * g3
    norm_q = float(np.linalg.norm(a))
    residual_bound = _EIGENVECTOR_RESIDUAL_RTOL * max(norm_q, 1e-30)
    columns = []
    for lam in spectrum.eigenvalues:
        d = 3.0 * lam * lam - gsq
        if abs(d) < _DIRECTION_RTOL * max(norm_q * norm_q, 1e-30):
            raise DegenerateSpectrumError(
                f"normalization denominator {d:.3e} vanishes for eigenvalue "
                f"{lam!r}; use the Jacobi path"
            )
        paired = (g2, g3, g1)
        near_cancel = any(
            abs(lam * lam - g * g) <= _FALLBACK_RTOL * max(1.0, gsq) for g in paired
        )
        column = None
        if not near_cancel:
            mags = np.sqrt(np.maximum([(lam * lam - g * g) / d for g in paired], 0.0))
            best_res = math.inf
            for s1 in (1.0, -1.0):
                for s2 in (1.0, -1.0):
                    x = mags * (1.0, s1, s2)
                    res = float(np.linalg.norm(a @ x - lam * x))
                    if res < best_res:
                        best_res = res
                        column = x
            if best_res > residual_bound:
                column = None  # cancellation worse than predicted; fall back
        if column is None:
            x = _unnormalized_eigenvector(g1, g2, g3, lam)
            nrm = np.linalg.norm(x)
            if nrm <= _DIRECTION_RTOL * max(norm_q * norm_q, 1e-30):
                raise DegenerateSpectrumError(
                    f"eigendirection for {lam!r} is not resolvable in closed form"
                )
            column = x / nrm
            if float(np.linalg.norm(a @ column - lam * column)) > residual_bound:
                raise DegenerateSpectrumError(
                    f"closed-form eigenvector residual exceeds {residual_bound:.1e} "
                    f"for eigenvalue {lam!r}"
                )
        columns.append(column)
    return EigenDecomposition(spectrum, np.column_stack(columns))


def jacobi_eigendecompose(q: CouplingMatrix) -> EigenDecomposition:
    """Cyclic Jacobi diagonalization of a coupling matrix, any n >= 2.

    Sweeps rotate every off-diagonal pair until the off-diagonal Frobenius
    norm falls below 1e-12 of the matrix norm; eigenvalues are returned
    descending with the eigenvector columns permuted to match.
    """
    a = np.array(q.entries, dtype=float)
    n = q.n
    vectors = np.eye(n)
    target = 1e-12 * float(np.linalg.norm(a))
    for _ in range(100):
        off = math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))
        if off <= target:
            break
        for p in range(n - 1):
            for s in range(p + 1, n):
                apq = a[p, s]
                if apq == 0.0:
                    continue
                theta = (a[s, s] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (
                    abs(theta) + math.sqrt(theta * theta + 1.0)
                )
                c = 1.0 / math.sqrt(t * t + 1.0)
                sn = t * c
                tau = sn / (1.0 + c)
                a[p, p] -= t * apq
                a[s, s] += t * apq
                a[p, s] = a[s, p] = 0.0
                others = [i for i in range(n) if i != p and i != s]
                aip = a[others, p].copy()
                ais = a[others, s].copy()
                a[others, p] = a[p, others] = aip - sn * (ais + tau * aip)
                a[others, s] = a[s, others] = ais + sn * (aip - tau * ais)
                vp = vectors[:, p].copy()
                vs = vectors[:, s].copy()
                vectors[:, p] = vp - sn * (vs + tau * vp)
                vectors[:, s] = vs + sn * (vp - tau * vs)
    else:
        raise ConvergenceError("Jacobi sweeps did not converge in 100 passes")
    diag = np.diag(a)
    order = np.argsort(-diag, kind="stable")
    lam = diag[order]
    gap = float(np.min(np.abs(np.diff(lam)))) if n > 1 else math.inf
    spectrum = Spectrum(eigenvalues=lam, degeneracy_gap=gap, n=n)
    return EigenDecomposition(spectrum, vectors[:, order])


def propagator_from_eigen(
    decomp: EigenDecomposition, t: float, method: Method = Method.JACOBI
) -> Propagator:
    """exp(-itQ) = O diag(e^{-it lambda}) O^T from an eigendecomposition."""
    n = decomp.spectrum.n
    if t == 0.0:
        return Propagator(n, np.eye(n, dtype=complex), t, method)
    phases = np.exp(-1j * t * decomp.spectrum.eigenvalues)
    matrix = (decomp.vectors * phases) @ decomp.vectors.T
    return Propagator(n, matrix, t, method)


def equal_coupling_value(q: CouplingMatrix) -> float | None:
    """The shared coupling g when all off-diagonal entries agree within 1e-12 relative."""
    off = q.entries[np.triu_indices(q.n, k=1)]
    largest = float(np.max(np.abs(off)))
    if largest == 0.0:
        return 0.0
    if float(np.max(off) - np.min(off)) <= _EQUAL_COUPLING_RTOL * largest:
        return float(np.mean(off))
    return None


def propagator(q: CouplingMatrix, t: float, method=None) -> Propagator:
    """Compute exp(-itQ), picking the cheapest applicable route unless forced.

    Automatic dispatch: n = 2 goes to the two-level form; an equal-coupling
    pattern goes to the rank-one form (its spectrum is maximally degenerate,
    so the polynomial route would divide by zero); n = 3, 4 use the
    Lagrange expansion when the eigenvalue gaps are safe and Jacobi otherwise;
    larger n always diagonalizes.  Forcing a method applies it as-is and lets
    its own preconditions raise.
    """
    if method is not None and not isinstance(method, Method):
        method = Method(method)

    if method is None:
        if q.n == 2:
            method = Method.TWO_LEVEL
        elif equal_coupling_value(q) is not None:
            method = Method.EQUAL_COUPLING
        elif q.n in (3, 4):
            # a spectrum the radical solvers cannot certify counts as unsafe
            try:
                spectrum = closed_form_spectrum(q)
                safe = (
                    spectrum.degeneracy_gap
                    > DEGENERACY_GAP_RTOL * spectrum.spectral_radius
                )
            except InvalidInputError:
                safe = False
            if safe:
                method = Method.LAGRANGE3 if q.n == 3 else Method.LAGRANGE4
            else:
                method = Method.JACOBI
        else:
            method = Method.JACOBI

    if method is Method.TWO_LEVEL:
        if q.n != 2:
            raise InvalidInputError(f"two-level method needs n = 2, got n = {q.n}")
        return propagator_two_level(q.entries[0, 1], t)
    if method is Method.EQUAL_COUPLING:
        g = equal_coupling_value(q)
        if g is None:
            raise InvalidInputError("couplings are not all equal")
        return propagator_equal_coupling(q.n, g, t)
    if method in (Method.LAGRANGE3, Method.LAGRANGE4):
        expected = 3 if method is Method.LAGRANGE3 else 4
        if q.n != expected:
            raise InvalidInputError(f"{method.value} needs n = {expected}, got n = {q.n}")
        return propagator_lagrange(q, t)
    if method is Method.CLOSED_EIGEN3:
        if q.n != 3:
            raise InvalidInputError(f"closed_eigen3 needs n = 3, got n = {q.n}")
        decomp = eigenvectors_three_level(q, closed_form_spectrum(q))
        return propagator_from_eigen(decomp, t, Method.CLOSED_EIGEN3)
    if method is Method.JACOBI:
        return propagator_from_eigen(jacobi_eigendecompose(q), t, Method.JACOBI)
    if method is Method.REFERENCE:
        from .oracle import reference_expm  # deferred: oracle imports model types

        return Propagator(q.n, reference_expm(-1j * t * q.entries), t, Method.REFERENCE)
    raise InvalidInputError(f"unknown propagator method {method!r}")
