import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_bvp

from sohp.gci import (DegenerateCoefficientsError, GciSolution, assemble_gci_system,
                      coefficients_from_moments, compute_ab, compute_coefficients,
                      self_convergence, solve_gci)
from sohp.params import ModelParams
from sohp.sphere import ThetaGrid, langevin_closed_form, vmf_density

# d = 1, alpha = 1 at n = 4001, frozen after the convergence study
FIXTURE = {"c1": 0.3130352854993313, "c2": 0.1657614134779997,
           "delta": -0.04331937400158736}


def bvp_oracle(beta, alpha, eps=1e-3):
    """Expanded (non-divergence) form solved by collocation on [eps, pi - eps].

    Regularity at the poles is imposed as psi ~ (distance to pole), i.e.
    psi -+ eps psi' = 0, which is accurate to O(eps^3).
    """
    d = 1.0 / beta

    def rhs(t, y):
        s = np.sin(t)
        k = d * np.cos(t) / s - s
        return np.vstack([y[1], (s - k * y[1] + d * y[0] / s**2 + alpha * s * y[2]) / d,
                          y[3], (-k * y[3] + d * y[2] / s**2 - alpha * s * y[0]) / d])

    def bc(ya, yb):
        return np.array([ya[0] - eps * ya[1], ya[2] - eps * ya[3],
                         yb[0] + eps * yb[1], yb[2] + eps * yb[3]])

    t = np.linspace(eps, np.pi - eps, 2001)
    res = solve_bvp(rhs, bc, t, np.zeros((4, t.size)), tol=1e-10, max_nodes=200_000)
    assert res.status == 0
    return res.sol


def test_alpha_zero_operator_is_real():
    sys = assemble_gci_system(1.3, 0.0, ThetaGrid(201))
    for part in (sys.lower, sys.diag, sys.upper, sys.rhs):
        assert np.all(part.imag == 0.0)


def test_stencil_annihilates_constants():
    g = ThetaGrid(201)
    sys = assemble_gci_system(1.0, 2.0, g)
    t = g.nodes[1:-1]
    zeroth = -1.0 / np.sin(t) ** 2 + 2j * np.sin(t)  # d = 1
    got = (sys.lower + sys.diag + sys.upper)[1:-1]
    np.testing.assert_allclose(got, zeroth, rtol=1e-9, atol=1e-9)


def test_tridiagonal_with_negative_diagonal():
    sys = assemble_gci_system(1.0, 1.0, ThetaGrid(201))
    m = sys.dense()
    assert np.count_nonzero(np.triu(m, 2)) == 0 and np.count_nonzero(np.tril(m, -2)) == 0
    assert np.all(sys.diag[1:-1].real < 0)


def test_assembly_rejects_bad_input():
    with pytest.raises(ValueError):
        assemble_gci_system(0.0, 1.0, ThetaGrid(201))
    with pytest.raises(ValueError):
        assemble_gci_system(1.0, 1.0, ThetaGrid(65))


@pytest.mark.parametrize("beta", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("alpha", [0.0, 1.0, 5.0])
def test_residual_and_boundary(beta, alpha):
    sol = solve_gci(beta, alpha)
    assert sol.residual_norm <= 1e-8
    assert sol.psi1[0] == sol.psi1[-1] == sol.psi2[0] == sol.psi2[-1] == 0.0


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-5.0, 5.0))
def test_residual_over_parameter_box(beta, alpha):
    assert solve_gci(beta, alpha).residual_norm <= 1e-8


@pytest.mark.parametrize("beta, alpha", [(1.0, 1.0), (2.0, 5.0), (0.5, 0.0), (0.3, -2.0)])
def test_matches_collocation_oracle(beta, alpha):
    sol = solve_gci(beta, alpha, ThetaGrid(4001))
    ref = bvp_oracle(beta, alpha)
    t = sol.grid.nodes[200:-200:100]
    y = ref(t)
    np.testing.assert_allclose(sol.psi1[200:-200:100], y[0], atol=2e-7)
    np.testing.assert_allclose(sol.psi2[200:-200:100], y[2], atol=2e-7)


def test_coefficients_match_collocation_oracle():
    beta, alpha = 1.0, 1.0
    ref = bvp_oracle(beta, alpha)

    def moment(k, power):
        f = lambda t: 0.5 * vmf_density(np.cos(t), beta) * ref(t)[k] * np.cos(t) ** power \
            * np.sin(t) ** 2
        return quad(f, 1e-3, np.pi - 1e-3, epsabs=1e-13, limit=200)[0]

    za = complex(moment(0, 0), moment(2, 0))
    zb = complex(moment(0, 1), moment(2, 1))
    c = compute_coefficients(d=1.0, alpha=1.0)
    assert c.c2 == pytest.approx(abs(zb) / abs(za), abs=1e-7)
    assert c.delta == pytest.approx(np.angle(zb / za), abs=1e-7)


def test_alpha_zero_reduction():
    sol = solve_gci(1.0, 0.0)
    assert np.max(np.abs(sol.psi2)) <= 1e-10
    a1, a2, b1, b2 = compute_ab(sol)
    assert abs(a2) <= 1e-10 and abs(b2) <= 1e-10
    c = compute_coefficients(d=1.0, alpha=0.0)
    assert abs(c.delta) <= 1e-8


def test_zero_psi_gives_zero_moments():
    g = ThetaGrid(201)
    z = np.zeros(g.n)
    assert compute_ab(GciSolution(g, z, z, 1.0, 0.0, 0.0)) == (0.0, 0.0, 0.0, 0.0)


def test_two_quadrature_rules_agree():
    sol = solve_gci(1.0, 0.0)
    a1s, _, b1s, _ = compute_ab(sol, "simpson")
    a1t, _, b1t, _ = compute_ab(sol, "trapezoid")
    assert b1s / a1s == pytest.approx(b1t / a1t, abs=1e-8)


@pytest.mark.parametrize("alpha", [0.5, 3.0])
def test_conjugation_symmetry(alpha):
    p = solve_gci(1.5, alpha)
    m = solve_gci(1.5, -alpha)
    np.testing.assert_allclose(m.psi1, p.psi1, atol=1e-10)
    np.testing.assert_allclose(m.psi2, -p.psi2, atol=1e-10)
    cp = compute_coefficients(d=1 / 1.5, alpha=alpha)
    cm = compute_coefficients(d=1 / 1.5, alpha=-alpha)
    assert cm.c2 == pytest.approx(cp.c2, abs=1e-8)
    assert cm.delta == pytest.approx(-cp.delta, abs=1e-8)


def test_self_convergence_second_order():
    ratios = self_convergence(1.0, 1.0, n=501)
    assert np.all((ratios > 3.5) & (ratios < 4.5))


def test_regression_fixture():
    c = compute_coefficients(d=1.0, alpha=1.0, grid=ThetaGrid(4001))
    assert c.c1 == pytest.approx(FIXTURE["c1"], abs=1e-14)
    assert c.c2 == pytest.approx(FIXTURE["c2"], abs=1e-12)
    assert c.delta == pytest.approx(FIXTURE["delta"], abs=1e-12)
    # the default grid sits within the O(h^2) discretization error of the fixture
    c0 = compute_coefficients(d=1.0, alpha=1.0)
    assert c0.c2 == pytest.approx(FIXTURE["c2"], abs=1e-7)


@pytest.mark.parametrize("d, alpha", [(1.0, 1.0), (0.5, -3.0), (2.0, 0.0), (0.2, 4.0)])
def test_coefficient_invariants(d, alpha):
    c = compute_coefficients(ModelParams(d=d, alpha=alpha))
    assert abs(complex(c.a1, c.a2) - c.rho_a * np.exp(1j * c.theta_a)) <= 1e-12
    assert abs(complex(c.b1, c.b2) - c.rho_b * np.exp(1j * c.theta_b)) <= 1e-12
    assert c.c2 == pytest.approx(c.rho_b / c.rho_a) and c.c2 > 0
    assert -np.pi < c.delta <= np.pi
    assert 0 < c.c1 < 1 and c.c1 == pytest.approx(langevin_closed_form(1 / d), abs=1e-10)
    assert c.lam == pytest.approx(np.sqrt(d / c.c1)) and c.a == pytest.approx(c.c2 / c.c1)


def test_alpha_zero_matches_precession_free_model():
    # the same solver with alpha = 0 is the precession-free model; c2 is real-arithmetic
    c = compute_coefficients(d=0.5, alpha=0.0)
    sol = solve_gci(2.0, 0.0)
    a1, _, b1, _ = compute_ab(sol)
    assert c.c2 == pytest.approx(b1 / a1, rel=1e-14) and c.delta == 0.0


def test_degenerate_moments_rejected():
    with pytest.raises(DegenerateCoefficientsError):
        coefficients_from_moments(1.0, 0.0, 0.3, 0.0, 0.0, 1.0, 0.0)


def test_rejects_nonpositive_d():
    with pytest.raises(ValueError):
        compute_coefficients(d=0.0, alpha=1.0)
    with pytest.raises(ValueError):
        ModelParams(d=-1.0)
