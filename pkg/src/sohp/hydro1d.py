"""First-order hydrodynamics in one space dimension.

Unknowns are the density ``rho`` and the orientation angles ``(theta,
varphi)`` of Omega, all depending on z only.  Time is the rescaled time
``t' = c c1 t``.  With ``rho_hat = lam ln(rho)`` and ``U = (rho_hat, theta,
varphi)`` the system reads ``U_t + C(theta) U_z = 0``; the density itself is
advanced in conservative form ``rho_t + (rho cos theta)_z = 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .hyperbolicity import discriminant_array

THETA_MIN = 0.1
CFL = 0.45
TWO_PI = 2.0 * np.pi


class HydroError(RuntimeError):
    """Base class for first-order solver failures.

    ``node`` is the offending grid index (or None) and ``step`` the step
    index when raised from ``run_hydro``.
    """

    def __init__(self, message, node=None, step=None):
        super().__init__(message)
        self.node = node
        self.step = step

    def with_step(self, step):
        err = type(self)(f"step {step}: {self}", self.node, step)
        return err


class ChartSingularityError(HydroError):
    pass


class HyperbolicityError(HydroError):
    pass


class CFLError(HydroError):
    pass


@dataclass(frozen=True)
class FlowParams:
    """The three constants entering the flux matrix: ``a = c2/c1``,
    ``lam = sqrt(d/c1)`` and ``delta``."""

    a: float
    lam: float
    delta: float


@dataclass(frozen=True)
class StateField1D:
    dz: float
    rho: np.ndarray
    theta: np.ndarray
    varphi: np.ndarray
    time: float = 0.0

    def __post_init__(self):
        n = len(self.rho)
        if len(self.theta) != n or len(self.varphi) != n:
            raise ValueError("rho, theta and varphi must have equal length")
        if np.any(self.rho <= 0.0):
            raise ValueError("density must be positive")

    @property
    def n(self) -> int:
        return len(self.rho)

    @property
    def z(self) -> np.ndarray:
        return (np.arange(self.n) + 0.5) * self.dz

    @property
    def length(self) -> float:
        return self.n * self.dz

    def mass(self) -> float:
        return float(np.sum(self.rho) * self.dz)

    def rho_hat(self, lam: float) -> np.ndarray:
        return lam * np.log(self.rho)

    def omega(self) -> np.ndarray:
        from .sphere import unit_from_spherical
        return unit_from_spherical(self.theta, self.varphi)


def physical_time(t_rescaled: float, c: float, c1: float) -> float:
    """Convert rescaled time ``t' = c c1 t`` back to physical time."""
    return t_rescaled / (c * c1)


def flux_matrix(theta, a, lam, delta, theta_min: float = THETA_MIN) -> np.ndarray:
    """The matrix C(U) of ``U_t + C(U) U_z = 0``; it depends on theta only.

    ``theta`` may be a scalar or an array (a stack of matrices is returned).
    """
    theta = np.asarray(theta, dtype=float)
    st = np.sin(theta)
    bad = np.flatnonzero(np.atleast_1d(st) <= theta_min)
    if bad.size:
        raise ChartSingularityError(
            f"sin(theta) <= {theta_min} at node {int(bad[0])}: the varphi chart is singular",
            node=int(bad[0]))
    ct = np.cos(theta)
    cd, sd = np.cos(delta), np.sin(delta)
    m = np.zeros(theta.shape + (3, 3))
    m[..., 0, 0] = ct
    m[..., 0, 1] = -lam * st
    m[..., 1, 0] = -lam * st
    m[..., 1, 1] = a * cd * ct
    m[..., 1, 2] = -a * sd * st * ct
    m[..., 2, 1] = a * sd * ct / st
    m[..., 2, 2] = a * cd * ct
    return m


def spectral_radius(theta, a, lam, delta, theta_min: float = THETA_MIN) -> np.ndarray:
    return np.max(np.abs(np.linalg.eigvals(flux_matrix(theta, a, lam, delta, theta_min))), axis=-1)


def wrap_difference(dphi):
    """Map an angle difference into [-pi, pi)."""
    return np.mod(np.asarray(dphi) + np.pi, TWO_PI) - np.pi


def check_admissible(state: StateField1D, coeffs, theta_min: float = THETA_MIN):
    """Raise unless every node is inside the chart and the hyperbolic region."""
    st = np.sin(state.theta)
    bad = np.flatnonzero(st <= theta_min)
    if bad.size:
        i = int(bad[0])
        raise ChartSingularityError(
            f"sin(theta) = {st[i]:.4g} <= {theta_min} at node {i} (z={state.z[i]:.6g})", node=i)
    disc, bound = discriminant_array(state.theta, coeffs.a, coeffs.lam, coeffs.delta)
    bad = np.flatnonzero(disc < -bound)
    if bad.size:
        i = int(bad[0])
        raise HyperbolicityError(
            f"complex characteristic speeds at node {i} (z={state.z[i]:.6g}, "
            f"theta={state.theta[i]:.6g}, discriminant={disc[i]:.3e}); the first-order "
            f"model is ill-posed there", node=i)


def max_stable_dt(state: StateField1D, coeffs, cfl: float = CFL,
                  theta_min: float = THETA_MIN) -> float:
    s = spectral_radius(state.theta, coeffs.a, coeffs.lam, coeffs.delta, theta_min)
    return cfl * state.dz / float(np.max(s))


def step_hydro(state: StateField1D, coeffs, dt: float, cfl: float = CFL,
               theta_min: float = THETA_MIN) -> StateField1D:
    """One forward-Euler step of the Rusanov scheme on a periodic grid.

    ``coeffs`` is anything with ``a``, ``lam``, ``delta`` attributes.
    The density uses local Lax-Friedrichs fluxes, so mass is conserved to
    rounding.  The angle equations are non-conservative and use a
    frozen-coefficient fluctuation splitting with the same local dissipation.
    """
    a, lam, delta = coeffs.a, coeffs.lam, coeffs.delta
    check_admissible(state, coeffs, theta_min)
    s_node = spectral_radius(state.theta, a, lam, delta, theta_min)
    smax = float(np.max(s_node))
    if dt > cfl * state.dz / smax * (1.0 + 1e-12):
        raise CFLError(f"dt={dt:.4g} exceeds the CFL limit {cfl * state.dz / smax:.4g}",
                       node=int(np.argmax(s_node)))
    nu = dt / state.dz
    rho, theta, varphi = state.rho, state.theta, state.varphi
    s = np.maximum(s_node, np.roll(s_node, -1))  # at interface i+1/2

    # density: conservative local Lax-Friedrichs
    f = rho * np.cos(theta)
    flux = 0.5 * (f + np.roll(f, -1)) - 0.5 * s * (np.roll(rho, -1) - rho)
    rho_new = rho - nu * (flux - np.roll(flux, 1))

    # angles: fluctuations A^-(dU) to the left cell, A^+(dU) to the right cell
    rho_hat = lam * np.log(rho)
    jump = np.stack([np.roll(rho_hat, -1) - rho_hat,
                     np.roll(theta, -1) - theta,
                     wrap_difference(np.roll(varphi, -1) - varphi)], axis=-1)
    theta_bar = theta + 0.5 * jump[:, 1]
    cbar = flux_matrix(theta_bar, a, lam, delta, theta_min)
    cdu = np.einsum("nij,nj->ni", cbar, jump)
    left = 0.5 * (cdu - s[:, None] * jump)
    right = 0.5 * (cdu + s[:, None] * jump)
    incr = left + np.roll(right, 1, axis=0)
    theta_new = theta - nu * incr[:, 1]
    varphi_new = np.mod(varphi - nu * incr[:, 2], TWO_PI)

    if np.any(rho_new <= 0.0):
        i = int(np.argmin(rho_new))
        raise HydroError(f"density became non-positive at node {i}", node=i)
    return replace(state, rho=rho_new, theta=theta_new, varphi=varphi_new,
                   time=state.time + dt)


def angle_rates(rho, theta, rho_z, theta_z, varphi_z, coeffs):
    """Pointwise time derivatives ``(rho_t, theta_t, varphi_t)`` given z-gradients.

    This is ``-C(U) U_z`` for the angles and ``-(rho cos theta)_z`` for rho, in
    rescaled time.
    """
    a, lam, delta = coeffs.a, coeffs.lam, coeffs.delta
    st, ct = np.sin(theta), np.cos(theta)
    rho_hat_z = lam * rho_z / rho
    rho_t = -(rho_z * ct - rho * st * theta_z)
    theta_t = -(-lam * st * rho_hat_z + a * np.cos(delta) * ct * theta_z
                - a * np.sin(delta) * st * ct * varphi_z)
    varphi_t = -(a * np.sin(delta) * ct / st * theta_z + a * np.cos(delta) * ct * varphi_z)
    return rho_t, theta_t, varphi_t


def quasilinear_rhs(state: StateField1D, coeffs):
    """Right-hand side of the semi-discrete system with centered z-differences."""
    def dz(u):
        return (np.roll(u, -1) - np.roll(u, 1)) / (2.0 * state.dz)

    varphi_z = wrap_difference(np.roll(state.varphi, -1) - np.roll(state.varphi, 1)) / (2.0 * state.dz)
    return angle_rates(state.rho, state.theta, dz(state.rho), dz(state.theta), varphi_z, coeffs)


def run_hydro(initial: StateField1D, coeffs, t_final: float, out_dt: float | None = None,
              cfl: float = CFL, theta_min: float = THETA_MIN):
    """Integrate to ``t_final`` and return snapshots every ``out_dt``.

    Snapshots are taken at ``k * out_dt`` for ``k = 0 .. floor(t_final/out_dt)``;
    steps are shortened to land on those times.  Step failures are re-raised
    with the step index attached.
    """
    if t_final < 0:
        raise ValueError("t_final must be >= 0")
    out_dt = out_dt or t_final or 1.0
    n_out = int(np.floor(t_final / out_dt + 1e-12))
    targets = [initial.time + k * out_dt for k in range(1, n_out + 1)]
    snapshots = [initial]
    state = initial
    step = 0
    for target in targets:
        while state.time < target - 1e-14 * max(1.0, target):
            try:
                dt = min(max_stable_dt(state, coeffs, cfl, theta_min), target - state.time)
                state = step_hydro(state, coeffs, dt, cfl, theta_min)
            except HydroError as err:
                raise err.with_step(step) from err
            step += 1
        state = replace(state, time=target)
        snapshots.append(state)
    return snapshots


def initial_state(preset: str, n: int, length: float = 1.0, **kw) -> StateField1D:
    """Build initial data from a named preset.

    uniform          constant (rho0, theta0, varphi0)
    equatorial_wave  sine perturbation of rho, theta, varphi about theta = pi/2
    polar_cap        sine perturbation about theta0 (default 0.3), near the pole
    """
    dz = length / n
    z = (np.arange(n) + 0.5) * dz
    wave = np.sin(TWO_PI * z / length)
    rho0 = kw.get("rho0", 1.0)
    varphi0 = kw.get("varphi0", 0.0)
    if preset == "uniform":
        theta0 = kw.get("theta0", np.pi / 2)
        rho = np.full(n, rho0)
        theta = np.full(n, theta0)
        varphi = np.full(n, varphi0)
    elif preset == "equatorial_wave":
        rho = rho0 * (1.0 + kw.get("amp_rho", 0.1) * wave)
        theta = np.pi / 2 + kw.get("amp_theta", 0.1) * wave
        varphi = varphi0 + kw.get("amp_varphi", 0.1) * wave
    elif preset == "polar_cap":
        rho = rho0 * (1.0 + kw.get("amp_rho", 0.1) * wave)
        theta = kw.get("theta0", 0.3) + kw.get("amp_theta", 0.1) * wave
        varphi = varphi0 + kw.get("amp_varphi", 0.1) * wave
    else:
        raise ValueError(f"unknown initial-data preset {preset!r}")
    return StateField1D(dz, rho, theta, np.mod(varphi, TWO_PI))
