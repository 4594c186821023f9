"""Geometry and measure on the unit sphere S^2.

Everything here is a pure function of its arguments.  Vectors are numpy
arrays whose last axis has length 3, so most helpers broadcast over stacks
of vectors.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

UNIT_TOL = 1e-12
POLE_TOL = 1e-8
SERIES_CUTOFF = 1e-4


def normalize(v):
    """Return ``v / |v|`` along the last axis."""
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def unit_vector(x, y=None, z=None) -> np.ndarray:
    """Build a unit 3-vector, renormalizing the input.

    Accepts either a length-3 sequence or three scalars.
    """
    v = np.asarray(x if y is None else (x, y, z), dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise ValueError("cannot normalize a zero or non-finite vector")
    return v / n


def project_tangent(v, a) -> np.ndarray:
    """Project ``a`` onto the plane orthogonal to the unit vector ``v``.

    Computes ``a - (a.v) v``.  Broadcasts over leading axes.
    """
    v = np.asarray(v, dtype=float)
    a = np.asarray(a, dtype=float)
    return a - np.sum(a * v, axis=-1, keepdims=True) * v


def unit_from_spherical(theta, varphi) -> np.ndarray:
    """Unit vector (sin t cos p, sin t sin p, cos t)."""
    theta = np.asarray(theta, dtype=float)
    varphi = np.asarray(varphi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(varphi), st * np.sin(varphi), np.cos(theta)], axis=-1)


def spherical_from_unit(omega):
    """Return ``(theta, varphi)`` with theta in [0, pi], varphi in [0, 2pi).

    At the poles (sin theta <= 1e-8) varphi is reported as 0.
    """
    omega = np.asarray(omega, dtype=float)
    x, y, z = omega[..., 0], omega[..., 1], omega[..., 2]
    rxy = np.hypot(x, y)
    theta = np.arctan2(rxy, z)
    varphi = np.mod(np.arctan2(y, x), 2.0 * np.pi)
    # mod can return exactly 2pi for tiny negative angles
    varphi = np.where(varphi >= 2.0 * np.pi, 0.0, varphi)
    varphi = np.where(np.sin(theta) <= POLE_TOL, 0.0, varphi)
    if theta.ndim == 0:
        return float(theta), float(varphi)
    return theta, varphi


def spherical_basis(theta, varphi):
    """Return the tangent frame ``(Omega_theta, Omega_varphi)``.

    ``Omega_theta`` has unit length and ``Omega_varphi`` has length sin(theta).
    """
    theta = np.asarray(theta, dtype=float)
    varphi = np.asarray(varphi, dtype=float)
    ct, st = np.cos(theta), np.sin(theta)
    cp, sp = np.cos(varphi), np.sin(varphi)
    d_theta = np.stack([ct * cp, ct * sp, -st], axis=-1)
    d_varphi = np.stack([-st * sp, st * cp, np.zeros_like(st)], axis=-1)
    return d_theta, d_varphi


@dataclass(frozen=True)
class VmfParams:
    """Von Mises-Fisher parameters: concentration ``beta = 1/d`` and mean axis."""

    beta: float
    axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))

    def __post_init__(self):
        _check_beta(self.beta)
        object.__setattr__(self, "axis", unit_vector(self.axis))


def _check_beta(beta):
    if not np.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"concentration beta must be finite and > 0, got {beta}")


def vmf_log_normalizer(beta: float) -> float:
    """log Z(beta) with Z = int_{S^2} exp(beta v.Omega) dv = 4 pi sinh(beta)/beta."""
    _check_beta(beta)
    if beta < SERIES_CUTOFF:
        return np.log(4.0 * np.pi) + np.log1p(beta * beta / 6.0)
    # sinh(b)/b = e^b (1 - e^{-2b}) / (2b)
    return np.log(2.0 * np.pi / beta) + beta + np.log1p(-np.exp(-2.0 * beta))


def vmf_density(u, params: VmfParams | float):
    """VMF density ``exp(beta u) / Z(beta)`` as a function of ``u = v.Omega``."""
    beta = params.beta if isinstance(params, VmfParams) else float(params)
    log_z = vmf_log_normalizer(beta)
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0 + 1e-15):
        raise ValueError("u = v.Omega must lie in [-1, 1]")
    return np.exp(beta * u - log_z)


def vmf_marginal_cdf(u, beta: float):
    """CDF of ``u = v.Omega`` under VMF(beta); beta = 0 gives the uniform law."""
    u = np.clip(np.asarray(u, dtype=float), -1.0, 1.0)
    if beta == 0.0:
        return 0.5 * (u + 1.0)
    _check_beta(beta)
    if beta > 300.0:
        return np.exp(beta * (u - 1.0))
    # (e^{bu} - e^{-b}) / (e^b - e^{-b}), scaled by e^{-b}
    return np.expm1(beta * (u + 1.0)) / np.expm1(2.0 * beta)


@lru_cache(maxsize=16)
def gauss_legendre_u(n: int = 256, panels: int = 8):
    """Composite Gauss-Legendre nodes and weights on u in [-1, 1].

    Integrating in ``u = cos theta`` absorbs the sin(theta) Jacobian.
    """
    if n % panels:
        raise ValueError("node count must be a multiple of the panel count")
    x, w = np.polynomial.legendre.leggauss(n // panels)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def sphere_integral_axial(g, n: int = 256) -> float:
    """Integrate an axially symmetric ``g(u)`` over S^2: ``2 pi int g(u) du``."""
    u, w = gauss_legendre_u(n)
    return 2.0 * np.pi * float(np.dot(w, g(u)))


def langevin_c1(beta: float, n: int = 256) -> float:
    """Mean of ``v.Omega`` under VMF(beta), by quadrature.

    The exponential weight is shifted by ``exp(-beta)`` so large beta does not
    overflow; the shift cancels in the ratio.
    """
    _check_beta(beta)
    u, w = gauss_legendre_u(n)
    e = np.exp(beta * (u - 1.0))
    return float(np.dot(w, e * u) / np.dot(w, e))


def langevin_closed_form(beta: float) -> float:
    """coth(beta) - 1/beta, with its Taylor series for tiny beta."""
    _check_beta(beta)
    if beta < SERIES_CUTOFF:
        return beta / 3.0 - beta**3 / 45.0
    return 1.0 / np.tanh(beta) - 1.0 / beta


@dataclass(frozen=True)
class ThetaGrid:
    """Uniform latitude grid on [0, pi] with composite Simpson weights.

    ``n`` must be odd so Simpson panels tile the interval.
    """

    n: int
    nodes: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        n = int(self.n)
        if n < 3 or n % 2 == 0:
            raise ValueError(f"ThetaGrid needs an odd node count >= 3, got {n}")
        nodes = np.linspace(0.0, np.pi, n)
        h = np.pi / (n - 1)
        w = np.full(n, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        w *= h / 3.0
        nodes.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    @property
    def h(self) -> float:
        return np.pi / (self.n - 1)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.n, self.h)
        w[0] = w[-1] = 0.5 * self.h
        return w

    def refine(self) -> "ThetaGrid":
        """Grid with half the spacing; every old node is kept."""
        return ThetaGrid(2 * self.n - 1)

    def index_of(self, theta: float) -> int:
        i = int(round(theta / self.h))
        if abs(self.nodes[i] - theta) > 1e-12:
            raise ValueError(f"theta={theta} is not a grid node")
        return i
