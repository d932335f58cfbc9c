"""Closed-form eigenvalue solvers for 3x3 and 4x4 coupling matrices.

The characteristic polynomial of a zero-diagonal real symmetric Q is a
depressed cubic (n = 3) or a depressed quartic (n = 4) in the couplings, and
its all-real roots come out of the classical radical formulas: Cardano for the
cubic, Euler's resolvent construction for the quartic.  Both are assembled in
complex arithmetic, so branch and sign choices matter; the conventions used
here are spelled out on each solver.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .model import CouplingMatrix

_SIGMA3 = cmath.exp(2j * math.pi / 3)  # primitive cube root of unity

#: relative eigenvalue gap below which the Lagrange coefficient denominators
#: lose too much precision and callers must diagonalize instead
DEGENERACY_GAP_RTOL = 1e-8

_IMAG_RTOL = 1e-10
_RESIDUAL_RTOL = 1e-9


@dataclass(frozen=True)
class CubicCoeffs:
    """Coefficients of the depressed cubic lambda^3 - c1*lambda - c0 = 0."""

    c1: float
    c0: float


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of the depressed quartic lambda^4 + p*lambda^2 + q*lambda + r = 0."""

    p: float
    q: float
    r: float


@dataclass(frozen=True)
class Spectrum:
    """All-real eigenvalues sorted descending, with degeneracy metadata.

    ``degeneracy_gap`` is the minimum pairwise absolute eigenvalue difference;
    it drives the choice between polynomial-coefficient and diagonalization
    propagator paths.
    """

    eigenvalues: np.ndarray
    degeneracy_gap: float
    n: int

    def __post_init__(self):
        values = np.array(self.eigenvalues, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, "eigenvalues", values)

    @property
    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))


def _three_couplings(q: CouplingMatrix) -> tuple[float, float, float]:
    a = q.entries
    return a[0, 1], a[1, 2], a[0, 2]


def _six_couplings(q: CouplingMatrix) -> tuple[float, ...]:
    a = q.entries
    # (g1..g6) = adjacent pairs first, then the skips: 01, 12, 23, 02, 13, 03
    return a[0, 1], a[1, 2], a[2, 3], a[0, 2], a[1, 3], a[0, 3]


def char_poly_3(q: CouplingMatrix) -> CubicCoeffs:
    """Characteristic polynomial of a 3x3 coupling matrix.

    det(lambda I - Q) = lambda^3 - (g1^2+g2^2+g3^2) lambda - 2 g1 g2 g3 with
    (g1, g2, g3) = (Q01, Q12, Q02).
    """
    if q.n != 3:
        raise InvalidInputError(f"char_poly_3 needs n = 3, got n = {q.n}")
    g1, g2, g3 = _three_couplings(q)
    return CubicCoeffs(c1=g1 * g1 + g2 * g2 + g3 * g3, c0=2.0 * g1 * g2 * g3)


def char_poly_4(q: CouplingMatrix) -> QuarticCoeffs:
    """Characteristic polynomial of a 4x4 coupling matrix.

    With (g1..g6) = (Q01, Q12, Q23, Q02, Q13, Q03):
      p = -(g1^2 + ... + g6^2)
      q = -2 (g1 g2 g4 + g1 g5 g6 + g2 g3 g5 + g3 g4 g6)
      r = g1^2 g3^2 + g2^2 g6^2 + g4^2 g5^2
          - 2 g1 g2 g3 g6 - 2 g1 g3 g4 g5 - 2 g2 g4 g5 g6
    """
    if q.n != 4:
        raise InvalidInputError(f"char_poly_4 needs n = 4, got n = {q.n}")
    g1, g2, g3, g4, g5, g6 = _six_couplings(q)
    p = -(g1 * g1 + g2 * g2 + g3 * g3 + g4 * g4 + g5 * g5 + g6 * g6)
    qq = -2.0 * (g1 * g2 * g4 + g1 * g5 * g6 + g2 * g3 * g5 + g3 * g4 * g6)
    r = (
        g1 * g1 * g3 * g3
        + g2 * g2 * g6 * g6
        + g4 * g4 * g5 * g5
        - 2.0 * g1 * g2 * g3 * g6
        - 2.0 * g1 * g3 * g4 * g5
        - 2.0 * g2 * g4 * g5 * g6
    )
    return QuarticCoeffs(p=p, q=qq, r=r)


def _real_roots(values, poly, dpoly) -> np.ndarray:
    """Strip O(eps) imaginary residue, then polish each root with one Newton step.

    Imaginary parts above 1e-10 * max(1, |lambda|) mean the coefficients did
    not come from a real symmetric matrix.  The Newton step is kept only when
    it actually reduces |poly|, which protects multiple roots where the
    derivative vanishes.
    """
    out = np.empty(len(values))
    for k, z in enumerate(values):
        bound = _IMAG_RTOL * max(1.0, abs(z))
        if abs(z.imag) > bound:
            raise InvalidInputError(
                f"root {z!r} has imaginary part above {bound:.1e}; "
                "coefficients are not from a real symmetric matrix"
            )
        x = z.real
        fx = poly(x)
        dfx = dpoly(x)
        if dfx != 0.0:
            candidate = x - fx / dfx
            if abs(poly(candidate)) < abs(fx):
                x = candidate
        out[k] = x
    return out


def _finish_spectrum(values: np.ndarray, poly, degree: int) -> Spectrum:
    order = np.argsort(-values, kind="stable")  # descending, ties keep assembly order
    lam = values[order]
    radius = float(np.max(np.abs(lam)))
    if radius > 0.0 and abs(float(np.sum(lam))) > 1e-9 * radius:
        raise InvalidInputError("root sum deviates from the zero trace")
    for x in lam:
        if abs(poly(x)) > _RESIDUAL_RTOL * max(1.0, abs(x) ** degree):
            raise InvalidInputError(
                f"root {x!r} fails the characteristic polynomial residual bound"
            )
    gap = float(np.min(np.abs(np.diff(lam)))) if len(lam) > 1 else math.inf
    return Spectrum(eigenvalues=lam, degeneracy_gap=gap, n=degree)


def solve_cubic_depressed(coeffs: CubicCoeffs) -> Spectrum:
    """All three real roots of lambda^3 - c1*lambda - c0 = 0 by Cardano's formula.

    The two cube-root terms are paired by Vieta: alpha_plus is a principal
    complex cube root and alpha_minus = (c1/3) / alpha_plus, which keeps
    alpha_plus * alpha_minus = c1/3 without an independent branch choice.  Of
    the two radicand branches c0/2 +/- sqrt((c0/2)^2 - (c1/3)^3) the larger in
    magnitude is used; for three real roots the branches are conjugates of
    equal magnitude, and the choice only matters when roundoff pushes the
    discriminant across zero, where the small branch cancels catastrophically.

    Radical formulas lose precision as roots coalesce: spectra with relative
    gaps around 1e-5 or below can fail the imaginary-residue or residual
    validation and raise InvalidInputError even for legitimate symmetric-matrix
    coefficients.  The propagator dispatcher treats that as a degenerate
    spectrum and diagonalizes instead.
    """
    c1 = float(coeffs.c1)
    c0 = float(coeffs.c0)

    def poly(x: float) -> float:
        return x * (x * x - c1) - c0

    def dpoly(x: float) -> float:
        return 3.0 * x * x - c1

    half = 0.5 * c0
    term = (c1 / 3.0) ** 3
    radicand = half * half - term
    # the subtraction cancels completely at multiple roots; anything below the
    # operands' roundoff floor is noise and must be treated as exactly zero,
    # or its square root injects O(sqrt(eps)) imaginary garbage into the roots
    if abs(radicand) <= 1e-13 * (half * half + abs(term)):
        radicand = 0.0
    root = cmath.sqrt(complex(radicand))
    u = half + root if abs(half + root) >= abs(half - root) else half - root
    if u == 0:
        # only possible with c1 = c0 = 0: triple root at zero
        lam = np.zeros(3)
    else:
        a_plus = u ** (1.0 / 3.0)
        a_minus = (c1 / 3.0) / a_plus
        assembled = (
            a_plus + a_minus,
            _SIGMA3 * _SIGMA3 * a_plus + _SIGMA3 * a_minus,
            _SIGMA3 * a_plus + _SIGMA3 * _SIGMA3 * a_minus,
        )
        lam = _real_roots(assembled, poly, dpoly)
    return _finish_spectrum(lam, poly, 3)


def _biquadratic_roots(p: float, r: float) -> list[float]:
    """Roots of lambda^4 + p*lambda^2 + r = 0 when the odd coefficient vanishes."""
    scale = max(1.0, abs(p), math.sqrt(abs(r)))
    disc = p * p - 4.0 * r
    if disc < 0.0:
        if disc < -1e-9 * scale * scale:
            raise InvalidInputError("biquadratic has complex lambda^2 pairs")
        disc = 0.0
    sq = math.sqrt(disc)
    roots: list[float] = []
    for y in ((-p + sq) / 2.0, (-p - sq) / 2.0):
        if y < 0.0:
            if y < -1e-9 * scale:
                raise InvalidInputError("biquadratic has negative lambda^2")
            y = 0.0
        s = math.sqrt(y)
        roots.extend((s, -s))
    return roots


def solve_quartic(coeffs: QuarticCoeffs) -> Spectrum:
    """All four real roots of lambda^4 + p*lambda^2 + q*lambda + r = 0 by Euler's method.

    The resolvent cubic 64 B^3 + 32 p B^2 - 4 (4r - p^2) B - q^2 = 0 is
    depressed and handed to the Cardano solver; beta = sqrt(B) for its largest
    root B (clamped at zero, rejected below -1e-12).  alpha and gamma come
    from

        alpha^2, gamma^2 = (1/2) { -q/(4 beta) +/- sqrt( (q/(4 beta))^2 - (B + p/2)^2 ) }

    and the roots are alpha+beta+gamma, -i alpha-beta+i gamma,
    -alpha+beta-gamma, i alpha-beta-i gamma.  Only the relative sign of alpha
    and gamma changes the root set (the simultaneous flip permutes it), and
    matching the quadratic coefficient forces alpha*gamma = -(B + p/2)/2; the
    sign assignments are enumerated and scored by the total characteristic
    polynomial residual, which enforces exactly that pairing.  A vanishing q
    makes -q/(4 beta) indeterminate when B = 0, so near-zero q is routed to
    the biquadratic in lambda^2 instead.
    """
    p = float(coeffs.p)
    q = float(coeffs.q)
    r = float(coeffs.r)

    def poly(x):
        return ((x * x + p) * x + q) * x + r

    def dpoly(x: float) -> float:
        return (4.0 * x * x + 2.0 * p) * x + q

    if abs(q) <= 1e-12 * max(1.0, abs(p), math.sqrt(abs(r))):
        lam = _real_roots([complex(x) for x in _biquadratic_roots(p, r)], poly, dpoly)
        return _finish_spectrum(lam, poly, 4)

    # depress the monic resolvent B^3 + (p/2) B^2 + ((p^2-4r)/16) B - q^2/64
    b2 = p / 2.0
    b1 = (p * p - 4.0 * r) / 16.0
    b0 = -q * q / 64.0
    cp = b1 - b2 * b2 / 3.0
    cq = b0 - b1 * b2 / 3.0 + 2.0 * b2 ** 3 / 27.0
    resolvent = solve_cubic_depressed(CubicCoeffs(c1=-cp, c0=-cq))
    big_b = float(np.max(resolvent.eigenvalues)) - b2 / 3.0
    if big_b < -1e-12:
        raise InvalidInputError(
            f"largest resolvent root {big_b!r} is negative; coefficients are "
            "not from a real symmetric matrix"
        )
    big_b = max(big_b, 0.0)
    beta = math.sqrt(big_b)
    if beta == 0.0:
        # all resolvent roots are positive whenever q != 0; reaching zero here
        # means the resolvent solve collapsed
        raise InvalidInputError("resolvent root vanished for a nonzero odd coefficient")
    qb = q / (4.0 * beta)
    inner = cmath.sqrt(complex(qb * qb - (big_b + p / 2.0) ** 2))
    alpha = cmath.sqrt(0.5 * (-qb + inner))
    gamma = cmath.sqrt(0.5 * (-qb - inner))

    best = None
    best_score = math.inf
    for sa in (1.0, -1.0):
        for sg in (1.0, -1.0):
            a, g = sa * alpha, sg * gamma
            candidate = (
                a + beta + g,
                -1j * a - beta + 1j * g,
                -a + beta - g,
                1j * a - beta - 1j * g,
            )
            score = sum(abs(poly(z)) for z in candidate)
            if score < best_score:
                best_score = score
                best = candidate
    lam = _real_roots(best, poly, dpoly)
    return _finish_spectrum(lam, poly, 4)


def closed_form_spectrum(q: CouplingMatrix) -> Spectrum:
    """Spectrum of a 3x3 or 4x4 coupling matrix through the radical formulas."""
    if q.n == 3:
        return solve_cubic_depressed(char_poly_3(q))
    if q.n == 4:
        return solve_quartic(char_poly_4(q))
    raise InvalidInputError(
        f"closed-form spectra exist only for n = 3 or 4, got n = {q.n}"
    )
