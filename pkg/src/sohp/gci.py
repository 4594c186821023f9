"""Generalized collision invariants and the hydrodynamic coefficients.

The azimuthal m=1 part of a collision invariant is ``psi1(theta) cos(varphi)
+ psi2(theta) sin(varphi)``.  Writing ``psi = psi1 + i psi2`` turns the
coupled real system into one complex singular ODE on [0, pi]::

    d e^{-b cos t} / sin t (sin t e^{b cos t} psi')' - d psi / sin^2 t
        + i alpha sin t psi = sin t

(using d * b = 1).  It is discretized in divergence form so the discrete
operator keeps the coercive real part of the continuous one.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded

from .params import ModelParams
from .sphere import ThetaGrid, langevin_c1, vmf_density

DEFAULT_N = 2001
RESIDUAL_TOL = 1e-8
MIN_INTERIOR = 64


class GciSolveError(RuntimeError):
    """The discrete GCI system could not be solved."""


class DegenerateCoefficientsError(RuntimeError):
    """The (a1, a2) integrals vanish, so c2 and delta are undefined."""


@dataclass(frozen=True)
class GciSystem:
    """Complex tridiagonal system in ``scipy.linalg.solve_banded`` layout.

    ``lower[i]`` multiplies psi[i-1] in row i, ``upper[i]`` multiplies psi[i+1].
    """

    grid: ThetaGrid
    beta: float
    alpha: float
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray
    rhs: np.ndarray

    def banded(self) -> np.ndarray:
        ab = np.zeros((3, self.grid.n), dtype=complex)
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[1:]
        return ab

    def dense(self) -> np.ndarray:
        return (np.diag(self.diag) + np.diag(self.lower[1:], -1)
                + np.diag(self.upper[:-1], 1))

    def apply(self, psi) -> np.ndarray:
        psi = np.asarray(psi, dtype=complex)
        out = self.diag * psi
        out[1:] += self.lower[1:] * psi[:-1]
        out[:-1] += self.upper[:-1] * psi[1:]
        return out

    def residual(self, psi) -> np.ndarray:
        return self.apply(psi) - self.rhs

    def residual_norm(self, psi) -> float:
        """Discrete L2 norm of the residual on interior nodes."""
        r = self.residual(psi)[1:-1]
        return float(np.sqrt(self.grid.h * np.sum(np.abs(r) ** 2)))


def assemble_gci_system(beta: float, alpha: float, grid: ThetaGrid) -> GciSystem:
    if not np.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"beta must be finite and > 0, got {beta}")
    if not np.isfinite(alpha):
        raise ValueError("alpha must be finite")
    theta = grid.nodes
    if theta[0] != 0.0 or theta[-1] != np.pi:
        raise ValueError("GCI grid must contain the endpoints 0 and pi")
    if grid.n - 2 < MIN_INTERIOR:
        raise ValueError(f"GCI grid needs >= {MIN_INTERIOR} interior nodes")

    d = 1.0 / beta
    h = grid.h
    n = grid.n
    ti = theta[1:-1]
    half = 0.5 * (theta[:-1] + theta[1:])  # t_{i+1/2}, length n-1
    ci = np.cos(ti)
    si = np.sin(ti)
    # sin(t_{i+-1/2}) e^{b (cos t_{i+-1/2} - cos t_i)}; the shift avoids overflow
    w_minus = np.sin(half[:-1]) * np.exp(beta * (np.cos(half[:-1]) - ci))
    w_plus = np.sin(half[1:]) * np.exp(beta * (np.cos(half[1:]) - ci))
    scale = d / (si * h * h)

    lower = np.zeros(n, dtype=complex)
    upper = np.zeros(n, dtype=complex)
    diag = np.ones(n, dtype=complex)
    rhs = np.zeros(n, dtype=complex)
    lower[1:-1] = scale * w_minus
    upper[1:-1] = scale * w_plus
    diag[1:-1] = -scale * (w_minus + w_plus) - d / si**2 + 1j * alpha * si
    rhs[1:-1] = si
    return GciSystem(grid, float(beta), float(alpha), lower, diag, upper, rhs)


@dataclass(frozen=True)
class GciSolution:
    grid: ThetaGrid
    psi1: np.ndarray
    psi2: np.ndarray
    beta: float
    alpha: float
    residual_norm: float

    @property
    def psi(self) -> np.ndarray:
        return self.psi1 + 1j * self.psi2

    def at(self, theta: float) -> complex:
        return complex(self.psi[self.grid.index_of(theta)])


def solve_gci(beta: float, alpha: float, grid: ThetaGrid | None = None,
              tol: float = RESIDUAL_TOL) -> GciSolution:
    """Solve for ``psi1 + i psi2`` with Dirichlet regularity at both poles."""
    grid = grid or ThetaGrid(DEFAULT_N)
    system = assemble_gci_system(beta, alpha, grid)
    ab = system.banded()
    try:
        psi = solve_banded((1, 1), ab, system.rhs)
        # one sweep of iterative refinement
        psi = psi - solve_banded((1, 1), ab, system.residual(psi))
    except np.linalg.LinAlgError as exc:
        raise GciSolveError(f"tridiagonal solve failed for beta={beta}, alpha={alpha}") from exc
    if not np.all(np.isfinite(psi)):
        raise GciSolveError(f"non-finite GCI solution for beta={beta}, alpha={alpha}")
    psi[0] = psi[-1] = 0.0
    res = system.residual_norm(psi)
    if res > tol:
        raise GciSolveError(f"GCI residual {res:.3e} exceeds tolerance {tol:.1e}")
    return GciSolution(grid, psi.real.copy(), psi.imag.copy(), float(beta), float(alpha), res)


def compute_ab(sol: GciSolution, rule: str = "simpson"):
    """Moments a_k = 1/2 int F psi_k sin^2 and b_k (with an extra cos) on [0, pi]."""
    grid = sol.grid
    if rule == "simpson":
        w = grid.weights
    elif rule == "trapezoid":
        w = grid.trapezoid_weights()
    else:
        raise ValueError(f"unknown quadrature rule {rule!r}")
    theta = grid.nodes
    ct = np.cos(theta)
    kernel = 0.5 * w * vmf_density(np.clip(ct, -1.0, 1.0), sol.beta) * np.sin(theta) ** 2
    a1 = float(np.dot(kernel, sol.psi1))
    a2 = float(np.dot(kernel, sol.psi2))
    b1 = float(np.dot(kernel * ct, sol.psi1))
    b2 = float(np.dot(kernel * ct, sol.psi2))
    vals = (a1, a2, b1, b2)
    if not all(np.isfinite(vals)):
        raise FloatingPointError("non-finite GCI moment")
    return vals


def _wrap_angle(x: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    x = float(np.mod(x + np.pi, 2.0 * np.pi) - np.pi)
    return np.pi if x == -np.pi else x


@dataclass(frozen=True)
class HydroCoefficients:
    d: float
    alpha: float
    c1: float
    c2: float
    delta: float
    a1: float
    a2: float
    b1: float
    b2: float
    rho_a: float
    theta_a: float
    rho_b: float
    theta_b: float
    lam: float
    a: float
    residual_norm: float = 0.0
    grid_n: int = DEFAULT_N
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def beta(self) -> float:
        return 1.0 / self.d

    def row(self) -> dict:
        return {"d": self.d, "alpha": self.alpha, "c1": self.c1, "c2": self.c2,
                "delta": self.delta, "lambda": self.lam, "a": self.a,
                "residual": self.residual_norm}


def coefficients_from_moments(d, alpha, c1, a1, a2, b1, b2, residual_norm=0.0,
                              grid_n=DEFAULT_N) -> HydroCoefficients:
    za = complex(a1, a2)
    zb = complex(b1, b2)
    rho_a, theta_a = abs(za), float(np.angle(za))
    rho_b, theta_b = abs(zb), float(np.angle(zb))
    if rho_a < 1e-14:
        raise DegenerateCoefficientsError(f"|a1 + i a2| = {rho_a:.3e} is degenerate")
    c2 = rho_b / rho_a
    return HydroCoefficients(
        d=float(d), alpha=float(alpha), c1=float(c1), c2=c2,
        delta=_wrap_angle(theta_b - theta_a),
        a1=a1, a2=a2, b1=b1, b2=b2,
        rho_a=rho_a, theta_a=theta_a, rho_b=rho_b, theta_b=theta_b,
        lam=float(np.sqrt(d / c1)), a=c2 / c1,
        residual_norm=float(residual_norm), grid_n=int(grid_n),
    )


def compute_coefficients(params: ModelParams | None = None, grid: ThetaGrid | None = None,
                         *, d: float | None = None, alpha: float | None = None
                         ) -> HydroCoefficients:
    """c1, c2, delta, lambda and a for noise ``d`` and precession ``alpha``.

    Pass either a ``ModelParams`` or the keywords ``d`` and ``alpha``.
    """
    if params is not None:
        d, alpha = params.d, params.alpha
    elif d is None or alpha is None:
        raise TypeError("compute_coefficients needs params or both d and alpha")
    if not d > 0.0:
        raise ValueError(f"noise intensity must satisfy d > 0, got d={d}")
    grid = grid or ThetaGrid(DEFAULT_N)
    beta = 1.0 / d
    sol = solve_gci(beta, alpha, grid)
    a1, a2, b1, b2 = compute_ab(sol)
    c1 = langevin_c1(beta)
    return coefficients_from_moments(d, alpha, c1, a1, a2, b1, b2,
                                     sol.residual_norm, grid.n)


def self_convergence(beta: float, alpha: float, n: int = DEFAULT_N,
                     probes=(np.pi / 4, np.pi / 2, 3 * np.pi / 4)) -> np.ndarray:
    """Richardson error ratios |p_h - p_{h/2}| / |p_{h/2} - p_{h/4}| at probe angles.

    Close to 4 for a second-order scheme.
    """
    grids = [ThetaGrid(n)]
    grids.append(grids[-1].refine())
    grids.append(grids[-1].refine())
    sols = [solve_gci(beta, alpha, g) for g in grids]
    vals = np.array([[s.at(t) for t in probes] for s in sols])
    return np.abs(vals[0] - vals[1]) / np.abs(vals[1] - vals[2])
