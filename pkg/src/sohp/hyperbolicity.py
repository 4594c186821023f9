"""Characteristic cubic of the 1-D flux matrix and hyperbolicity scans."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPS = np.finfo(float).eps
IMAG_TOL = 1e-9
DEFAULT_SCAN = 1001


@dataclass(frozen=True)
class CubicCoefficients:
    """Monic cubic X^3 + p2 X^2 + p1 X + p0."""

    p2: float
    p1: float
    p0: float
    p3: float = 1.0

    def __post_init__(self):
        if self.p3 != 1.0:
            raise ValueError("characteristic cubic must be monic")
        if not np.all(np.isfinite([self.p2, self.p1, self.p0])):
            raise ValueError("cubic coefficients must be finite")

    def __call__(self, x):
        return ((x + self.p2) * x + self.p1) * x + self.p0

    def derivative(self, x):
        return (3.0 * x + 2.0 * self.p2) * x + self.p1

    def companion(self) -> np.ndarray:
        return np.array([[0.0, 0.0, -self.p0],
                         [1.0, 0.0, -self.p1],
                         [0.0, 1.0, -self.p2]])


@dataclass(frozen=True)
class RootClassification:
    roots: np.ndarray
    all_real: bool
    max_imag: float


def char_poly(theta, a, lam, delta) -> CubicCoefficients:
    """Characteristic polynomial of the z-flux matrix at latitude ``theta``."""
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    ct, st = np.cos(theta), np.sin(theta)
    cd = np.cos(delta)
    lam2 = lam * lam
    return CubicCoefficients(
        p2=float(-(1.0 + 2.0 * a * cd) * ct),
        p1=float(a * (a + 2.0 * cd) * ct**2 - lam2 * st**2),
        p0=float(a * (lam2 * cd * st**2 - a * ct**2) * ct),
    )


def discriminant(c: CubicCoefficients):
    """Return ``(disc, rounding_bound)`` for the monic cubic.

    ``rounding_bound`` is a floating-point error bound on ``disc``; values
    within it are treated as zero (a repeated real root).
    """
    b, cc, d = c.p2, c.p1, c.p0
    terms = np.array([18.0 * b * cc * d, -4.0 * b**3 * d, b * b * cc * cc,
                      -4.0 * cc**3, -27.0 * d * d])
    return float(terms.sum()), float(64.0 * EPS * np.abs(terms).sum())


def _polish(c: CubicCoefficients, z: complex, iters: int = 3) -> complex:
    best, fbest = z, abs(c(z))
    for _ in range(iters):
        dp = c.derivative(z)
        if dp == 0:
            break
        z = z - c(z) / dp
        fz = abs(c(z))
        if fz < fbest:
            best, fbest = z, fz
        else:
            break
    return best


def _sort_roots(roots) -> np.ndarray:
    roots = np.asarray(roots, dtype=complex)
    order = np.lexsort((roots.imag, roots.real))
    return roots[order]


def _normalized(c: CubicCoefficients):
    """Rescale X = s Y so the coefficients are O(1); returns (cubic in Y, s)."""
    s = max(abs(c.p2), np.sqrt(abs(c.p1)), np.cbrt(abs(c.p0)))
    if s == 0.0:
        return c, 0.0
    # divide one factor at a time so s**3 cannot underflow
    return CubicCoefficients(c.p2 / s, c.p1 / s / s, c.p0 / s / s / s), s


def _roots_normalized(c: CubicCoefficients):
    """Roots of a cubic with coefficients of size at most 1; flag for repeated roots."""
    b, cc, d = c.p2, c.p1, c.p0
    shift = -b / 3.0
    p = cc - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * cc / 3.0 + d
    disc, bound = discriminant(c)

    if abs(disc) <= bound:
        if abs(p) <= 64.0 * EPS:
            t = np.zeros(3)
        else:
            t = np.array([3.0 * q / p, -1.5 * q / p, -1.5 * q / p])
        return (t + shift).astype(complex), True

    if disc > 0:
        m = 2.0 * np.sqrt(-p / 3.0)
        arg = np.clip(3.0 * q / (p * m), -1.0, 1.0)
        phi = np.arccos(arg) / 3.0
        t = m * np.cos(phi - 2.0 * np.pi * np.arange(3) / 3.0)
        return np.array([_polish(c, complex(r)).real for r in t + shift], dtype=complex), True

    root = np.sqrt(max(q * q / 4.0 + p**3 / 27.0, 0.0))
    big = -np.copysign(np.cbrt(abs(q) / 2.0 + root), q)
    small = -p / (3.0 * big) if big != 0.0 else 0.0
    real = _polish(c, complex(big + small + shift)).real
    # deflate: remaining quadratic X^2 + (b + r) X + (cc + r (b + r))
    bq = b + real
    cq = cc + real * bq
    im = np.sqrt(max(cq - bq * bq / 4.0, 0.0))
    z = _polish(c, complex(-bq / 2.0, im))
    # keep the pair exactly conjugate
    z = z if z.imag >= 0 else np.conj(z)
    return np.array([real, z, np.conj(z)]), False


def solve_cubic(c: CubicCoefficients, tol_im: float = IMAG_TOL) -> RootClassification:
    """Roots of a monic cubic by Cardano's formulas.

    The cubic is first rescaled to unit-size coefficients.  The trigonometric
    form is used when all roots are real, and simple roots are Newton-polished.
    Repeated roots (discriminant within rounding) are returned exactly real.
    """
    scaled, s = _normalized(c)
    if s == 0.0:
        return RootClassification(np.zeros(3, dtype=complex), True, 0.0)
    roots, real_branch = _roots_normalized(scaled)
    roots = _sort_roots(roots * s)
    if real_branch:
        return RootClassification(roots, True, 0.0)
    max_imag = float(np.max(np.abs(roots.imag)))
    all_real = bool(np.all(np.abs(roots.imag) <= tol_im * (1.0 + np.abs(roots.real))))
    return RootClassification(roots, all_real, max_imag)


def companion_roots(c: CubicCoefficients) -> np.ndarray:
    """Eigenvalues of the companion matrix; an independent root finder."""
    return _sort_roots(np.linalg.eigvals(c.companion()))


def is_hyperbolic_discriminant(c: CubicCoefficients) -> bool:
    disc, bound = discriminant(_normalized(c)[0])
    return disc >= -bound


def discriminant_array(theta, a, lam, delta):
    """Vectorized ``discriminant(char_poly(theta, ...))`` over an array of latitudes."""
    theta = np.asarray(theta, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    cd = np.cos(delta)
    lam2 = lam * lam
    b = -(1.0 + 2.0 * a * cd) * ct
    cc = a * (a + 2.0 * cd) * ct**2 - lam2 * st**2
    d = a * (lam2 * cd * st**2 - a * ct**2) * ct
    terms = np.stack([18.0 * b * cc * d, -4.0 * b**3 * d, b * b * cc * cc,
                      -4.0 * cc**3, -27.0 * d * d])
    return terms.sum(axis=0), 64.0 * EPS * np.abs(terms).sum(axis=0)


@dataclass(frozen=True)
class HyperbolicityReport:
    theta_grid: np.ndarray
    roots: np.ndarray  # (n, 3) complex
    flags: np.ndarray  # True where all roots are real
    disc_flags: np.ndarray
    nonhyperbolic_set: list

    @property
    def consistent(self) -> bool:
        """Root-based and discriminant-based classifications agree."""
        return bool(np.array_equal(self.flags, self.disc_flags))


def _intervals(thetas, bad):
    out = []
    start = None
    for i, flag in enumerate(bad):
        if flag and start is None:
            start = i
        if start is not None and (not flag or i == len(bad) - 1):
            stop = i if flag else i - 1
            out.append((float(thetas[start]), float(thetas[stop])))
            start = None
    return out


def scan_hyperbolicity(coeffs=None, thetas=None, *, a=None, lam=None, delta=None
                       ) -> HyperbolicityReport:
    """Classify the characteristic roots over a set of latitudes.

    ``coeffs`` is anything with ``a``, ``lam`` and ``delta`` attributes
    (e.g. ``HydroCoefficients``); the three keywords may be given instead.
    Non-hyperbolic intervals are runs of consecutive flagged samples,
    reported by their first and last sampled latitude.
    """
    if coeffs is not None:
        a, lam, delta = coeffs.a, coeffs.lam, coeffs.delta
    if thetas is None:
        thetas = np.linspace(0.0, np.pi, DEFAULT_SCAN)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if np.any(thetas < 0.0) or np.any(thetas > np.pi):
        raise ValueError("scan latitudes must lie in [0, pi]")
    thetas = np.sort(thetas)
    roots = np.empty((len(thetas), 3), dtype=complex)
    flags = np.empty(len(thetas), dtype=bool)
    disc_flags = np.empty(len(thetas), dtype=bool)
    for i, t in enumerate(thetas):
        cubic = char_poly(t, a, lam, delta)
        rc = solve_cubic(cubic)
        roots[i] = rc.roots
        flags[i] = rc.all_real
        disc_flags[i] = is_hyperbolic_discriminant(cubic)
    return HyperbolicityReport(thetas, roots, flags, disc_flags, _intervals(thetas, ~flags))


def nonhyperbolic_extent(report: HyperbolicityReport) -> float:
    """Largest theta* such that [0, theta*] is flagged, or 0 if theta=0 is hyperbolic."""
    for lo, hi in report.nonhyperbolic_set:
        if lo == report.theta_grid[0] == 0.0:
            return hi
    return 0.0
