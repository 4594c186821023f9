"""Diffusive hydrodynamics and its Landau-Lifschitz-Gilbert special case.

Fields live on periodic 1-D or 2-D uniform grids.  ``omega`` has shape
``grid_shape + (3,)``.  Each grid dimension is attached to a direction of
physical space through ``axes`` (0=x, 1=y, 2=z), so a 1-D field can point
along z and be compared with the first-order solver.

Time stepping is explicit two-stage Runge-Kutta; Omega is renormalized after
every stage.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

PARABOLIC_CFL = 0.2
HYPERBOLIC_CFL = 0.45


class StabilityError(ValueError):
    """The damping coefficient 2d + c2 cos(delta) is negative."""


class CFLError(ValueError):
    pass


@dataclass(frozen=True)
class OrientationField:
    dx: float
    omega: np.ndarray
    rho: np.ndarray | None = None
    time: float = 0.0
    axes: tuple = None
    drift: float = field(default=0.0, compare=False)

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        if omega.shape[-1] != 3 or omega.ndim not in (2, 3):
            raise ValueError("omega must have shape (n, 3) or (nx, ny, 3)")
        object.__setattr__(self, "omega", omega)
        if self.rho is None:
            object.__setattr__(self, "rho", np.ones(omega.shape[:-1]))
        elif np.shape(self.rho) != omega.shape[:-1]:
            raise ValueError("rho must match the grid shape of omega")
        if np.any(self.rho <= 0.0):
            raise ValueError("density must be positive")
        if self.axes is None:
            object.__setattr__(self, "axes", tuple(range(self.dim)))
        if len(self.axes) != self.dim:
            raise ValueError("one physical axis per grid dimension")

    @property
    def dim(self) -> int:
        return self.omega.ndim - 1

    @property
    def shape(self):
        return self.omega.shape[:-1]

    def coordinates(self):
        return [np.arange(n) * self.dx for n in self.shape]

    def mass(self) -> float:
        return float(np.sum(self.rho) * self.dx**self.dim)

    def norm_deviation(self) -> float:
        return float(np.max(np.abs(np.linalg.norm(self.omega, axis=-1) - 1.0)))


def _normalize(v):
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def _tangent(omega, a):
    return a - np.sum(a * omega, axis=-1, keepdims=True) * omega


def _centered(u, k, dx):
    return (np.roll(u, -1, axis=k) - np.roll(u, 1, axis=k)) / (2.0 * dx)


def laplacian(u, dx, dim):
    """Periodic 3-point (1-D) or 5-point (2-D) Laplacian over the first ``dim`` axes."""
    out = -2.0 * dim * u
    for k in range(dim):
        out = out + np.roll(u, 1, axis=k) + np.roll(u, -1, axis=k)
    return out / (dx * dx)


def gradient(fld: OrientationField, u):
    """Centered gradient of a scalar field as physical 3-vectors."""
    g = np.zeros(u.shape + (3,))
    for k, ax in enumerate(fld.axes):
        g[..., ax] = _centered(u, k, fld.dx)
    return g


def jacobian(fld: OrientationField, v):
    """Centered ``J[..., i, j] = d v_i / d x_j`` of a vector field."""
    jac = np.zeros(v.shape + (3,))
    for k, ax in enumerate(fld.axes):
        jac[..., :, ax] = _centered(v, k, fld.dx)
    return jac


def dirichlet_energy(fld: OrientationField) -> float:
    """Half the sum of squared forward differences of Omega, times the cell volume."""
    total = 0.0
    for k in range(fld.dim):
        diff = np.roll(fld.omega, -1, axis=k) - fld.omega
        total += np.sum(diff * diff)
    return 0.5 * total * fld.dx ** (fld.dim - 2)


def ell_term(fld: OrientationField, coeffs, params) -> np.ndarray:
    """``P_{Omega perp}(kappa c1 Lap(rho Omega) - phi_rep grad rho)`` per node."""
    lap = laplacian(fld.rho[..., None] * fld.omega, fld.dx, fld.dim)
    raw = params.kappa * coeffs.c1 * lap - params.phi_rep * gradient(fld, fld.rho)
    ell = _tangent(fld.omega, raw)
    # a second projection removes the rounding left by the first
    return _tangent(fld.omega, ell)


def check_stability(coeffs) -> float:
    """Return 2d + c2 cos(delta), refusing negative values."""
    g = 2.0 * coeffs.d + coeffs.c2 * np.cos(coeffs.delta)
    if g < 0.0:
        raise StabilityError(f"2d + c2 cos(delta) = {g:.4g} < 0: unstable diffusive model")
    return g


def orientation_rate(rho, omega, grad_rho, jac_omega, ell, coeffs, params):
    """Pointwise ``d Omega / dt`` of the diffusive model (physical time).

    ``jac_omega[..., i, j]`` is ``d Omega_i / d x_j`` and ``ell`` the tangent
    alignment correction; pass zeros for ``ell`` to get the first-order model.
    """
    c = params.c
    cd, sd = np.cos(coeffs.delta), np.sin(coeffs.delta)
    rho_ = np.asarray(rho)[..., None]
    conv = np.einsum("...ij,...j->...i", jac_omega, omega)  # (Omega . grad) Omega
    rate = (-c * coeffs.c2 * cd * conv
            - c * coeffs.c2 * sd * np.cross(omega, conv)
            - c * coeffs.d / rho_ * _tangent(omega, grad_rho))
    damping = 2.0 * coeffs.d + coeffs.c2 * cd
    precession = coeffs.c2 * sd - params.alpha
    rate = rate + (damping * ell - precession * np.cross(omega, ell)) / (rho_ * coeffs.c1)
    return rate


def density_rate(rho, omega, grad_rho, jac_omega, coeffs, params):
    """Pointwise ``d rho / dt = -c c1 div(rho Omega)``."""
    div = np.trace(jac_omega, axis1=-2, axis2=-1)
    return -params.c * coeffs.c1 * (np.sum(grad_rho * omega, axis=-1) + rho * div)


def _mass_flux_rate(fld, omega, rho, speed):
    # conservative local Lax-Friedrichs update of rho
    out = np.zeros_like(rho)
    for k, ax in enumerate(fld.axes):
        f = speed * rho * omega[..., ax]
        flux = 0.5 * (f + np.roll(f, -1, axis=k)) - 0.5 * speed * (np.roll(rho, -1, axis=k) - rho)
        out -= (flux - np.roll(flux, 1, axis=k)) / fld.dx
    return out


def diffusive_rhs(fld: OrientationField, coeffs, params):
    """Semi-discrete ``(d rho/dt, d Omega/dt)`` on the grid."""
    grad_rho = gradient(fld, fld.rho)
    jac = jacobian(fld, fld.omega)
    ell = ell_term(fld, coeffs, params)
    omega_t = orientation_rate(fld.rho, fld.omega, grad_rho, jac, ell, coeffs, params)
    rho_t = _mass_flux_rate(fld, fld.omega, fld.rho, params.c * coeffs.c1)
    return rho_t, omega_t


def max_stable_dt_diffusive(fld: OrientationField, coeffs, params,
                            cfl_par: float = PARABOLIC_CFL,
                            cfl_hyp: float = HYPERBOLIC_CFL) -> float:
    damping = check_stability(coeffs)
    precession = abs(coeffs.c2 * np.sin(coeffs.delta) - params.alpha)
    rho_min = float(np.min(fld.rho))
    diff = params.kappa * (damping + precession) * float(np.max(fld.rho)) / rho_min
    diff += params.phi_rep * (damping + precession) / coeffs.c1 / rho_min * fld.dx
    dt = np.inf
    if diff > 0:
        dt = cfl_par * fld.dx**2 / (2.0 * fld.dim * diff)
    speed = params.c * max(coeffs.c1, coeffs.c2, coeffs.d / rho_min, 1e-300)
    if params.c > 0:
        dt = min(dt, cfl_hyp * fld.dx / speed)
    return float(dt)


def _rk2(fld, rate, dt):
    """Heun step with renormalization of Omega after each stage."""
    r1, w1 = rate(fld.rho, fld.omega)
    omega_s = _normalize(fld.omega + dt * w1)
    rho_s = fld.rho + dt * r1
    r2, w2 = rate(rho_s, omega_s)
    pre = fld.omega + 0.5 * dt * (w1 + w2)
    rho_new = fld.rho + 0.5 * dt * (r1 + r2)
    drift = float(np.max(np.abs(np.linalg.norm(pre, axis=-1) - 1.0)))
    if np.any(rho_new <= 0.0):
        raise ValueError("density became non-positive")
    return replace(fld, omega=_normalize(pre), rho=rho_new, time=fld.time + dt, drift=drift)


def step_diffusive(fld: OrientationField, coeffs, params, dt: float) -> OrientationField:
    """Advance density and orientation of the diffusive model by ``dt``."""
    check_stability(coeffs)
    limit = max_stable_dt_diffusive(fld, coeffs, params)
    if dt > limit * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:.4g} exceeds the stable step {limit:.4g}")

    def rate(rho, omega):
        return diffusive_rhs(replace(fld, rho=rho, omega=omega), coeffs, params)

    return _rk2(fld, rate, dt)


@dataclass(frozen=True)
class LlgCoefficients:
    """``d Omega/dt = -damping Omega x (Omega x Lap Omega) - precession Omega x Lap Omega``."""

    damping: float
    precession: float

    def __post_init__(self):
        if not self.damping >= 0.0:
            raise StabilityError(f"LLG damping must be >= 0, got {self.damping}")

    @classmethod
    def from_model(cls, coeffs, params) -> "LlgCoefficients":
        return cls(params.kappa * (2.0 * coeffs.d + coeffs.c2 * np.cos(coeffs.delta)),
                   params.kappa * (coeffs.c2 * np.sin(coeffs.delta) - params.alpha))


def llg_rate(omega, lap, llg: LlgCoefficients):
    return llg.damping * _tangent(omega, lap) - llg.precession * np.cross(omega, lap)


def max_stable_dt_llg(fld: OrientationField, llg: LlgCoefficients,
                      cfl: float = PARABOLIC_CFL) -> float:
    scale = llg.damping + abs(llg.precession)
    if scale == 0:
        return np.inf
    return cfl * fld.dx**2 / (2.0 * fld.dim * scale)


def llg_step(fld: OrientationField, llg: LlgCoefficients, dt: float,
             cfl: float = PARABOLIC_CFL) -> OrientationField:
    limit = max_stable_dt_llg(fld, llg, cfl)
    if dt > limit * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:.4g} exceeds the stable step {limit:.4g}")

    def rate(rho, omega):
        return np.zeros_like(rho), llg_rate(omega, laplacian(omega, fld.dx, fld.dim), llg)

    return _rk2(fld, rate, dt)


def spin_wave(n: int, q: int = 1, tilt: float = np.pi / 2, length: float = 2 * np.pi,
              axis: int = 0) -> OrientationField:
    """1-D field (sin t cos qx, sin t sin qx, cos t) on [0, length)."""
    dx = length / n
    x = np.arange(n) * dx
    k = 2 * np.pi * q / length
    om = np.stack([np.sin(tilt) * np.cos(k * x), np.sin(tilt) * np.sin(k * x),
                   np.full(n, np.cos(tilt))], axis=-1)
    return OrientationField(dx, om, axes=(axis,))


def random_smooth_field(shape, modes: int = 3, seed: int = 0, length: float = 2 * np.pi,
                        amplitude: float = 1.0) -> OrientationField:
    """Normalized sum of a few random Fourier modes plus a constant bias."""
    rng = np.random.Generator(np.random.Philox(seed))
    shape = tuple(shape)
    dx = length / shape[0]
    grids = np.meshgrid(*[np.arange(n) * dx for n in shape], indexing="ij")
    v = np.zeros(shape + (3,))
    v[..., 2] = 1.0
    for _ in range(modes):
        kvec = rng.integers(-2, 3, size=len(shape))
        phase = sum(kk * g for kk, g in zip(kvec, grids)) * (2 * np.pi / length)
        amp = amplitude * rng.normal(size=3)
        v += amp * np.cos(phase + rng.uniform(0, 2 * np.pi))[..., None]
    return OrientationField(dx, _normalize(v))
