import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from sohp.gci import compute_coefficients
from sohp.hyperbolicity import (CubicCoefficients, char_poly, companion_roots, discriminant,
                                discriminant_array, nonhyperbolic_extent, scan_hyperbolicity,
                                solve_cubic)

coef = st.floats(-50, 50, allow_nan=False)


def vieta_ok(c, roots, rtol=1e-9):
    r1, r2, r3 = roots
    checks = [(r1 + r2 + r3, -c.p2), (r1 * r2 + r1 * r3 + r2 * r3, c.p1), (r1 * r2 * r3, -c.p0)]
    scale = 1.0 + np.max(np.abs(roots)) ** 3
    return all(abs(got - want) <= rtol * scale for got, want in checks)


def test_char_poly_examples():
    lam, a, delta = 1.7, 0.6, 0.4
    c = char_poly(np.pi / 2, a, lam, delta)
    assert (c.p2, c.p1, c.p0) == pytest.approx((0.0, -lam**2, 0.0), abs=1e-15)
    c = char_poly(0.0, a, lam, delta)
    cd = np.cos(delta)
    assert (c.p2, c.p1, c.p0) == pytest.approx((-(1 + 2 * a * cd), a * (a + 2 * cd), -a**2))
    t = 0.9
    c = char_poly(t, 0.0, lam, delta)
    assert (c.p2, c.p1, c.p0) == pytest.approx((-np.cos(t), -lam**2 * np.sin(t) ** 2, 0.0))


def test_theta_zero_factorization():
    # (X - 1)((X - a cos d)^2 + a^2 sin^2 d)
    a, lam, delta = 0.8, 2.0, 0.7
    c = char_poly(0.0, a, lam, delta)
    for x in np.linspace(-2, 2, 9):
        want = (x - 1) * ((x - a * np.cos(delta)) ** 2 + a**2 * np.sin(delta) ** 2)
        assert c(x) == pytest.approx(want, abs=1e-13)


def test_solve_cubic_examples():
    r = solve_cubic(CubicCoefficients(0.0, -1.0, 0.0))
    np.testing.assert_allclose(r.roots, [-1, 0, 1], atol=1e-15)
    assert r.all_real
    r = solve_cubic(CubicCoefficients(-3.0, 3.0, -1.0))
    np.testing.assert_allclose(r.roots, [1, 1, 1], atol=1e-12)
    assert r.all_real
    r = solve_cubic(char_poly(0.0, 1.0, 1.0, np.pi / 4))
    expected = [np.exp(-1j * np.pi / 4), np.exp(1j * np.pi / 4), 1.0]
    np.testing.assert_allclose(r.roots, expected, atol=1e-12)
    assert not r.all_real and r.max_imag == pytest.approx(np.sin(np.pi / 4))


def test_double_root_is_real():
    # (X - 2)^2 (X + 1) = X^3 - 3X^2 + 0X + 4
    r = solve_cubic(CubicCoefficients(-3.0, 0.0, 4.0))
    assert r.all_real
    np.testing.assert_allclose(r.roots, [-1, 2, 2], atol=1e-7)


@pytest.mark.parametrize("a, lam, delta", [(1.0, 1.0, np.pi / 6), (0.3, 2.5, -1.0),
                                           (2.0, 0.7, 2.5), (0.59, 0.96, 0.0)])
def test_exact_anchors(a, lam, delta):
    r = solve_cubic(char_poly(np.pi / 2, a, lam, delta)).roots
    np.testing.assert_allclose(r, [-lam, 0.0, lam], atol=1e-12)
    r = solve_cubic(char_poly(0.0, a, lam, delta)).roots
    want = sorted([1.0, a * np.exp(1j * delta), a * np.exp(-1j * delta)],
                  key=lambda z: (z.real, z.imag))
    np.testing.assert_allclose(r, want, atol=1e-12)


@settings(max_examples=500)
@given(coef, coef, coef)
def test_vieta_and_companion_fuzz(p2, p1, p0):
    c = CubicCoefficients(p2, p1, p0)
    rc = solve_cubic(c)
    assert vieta_ok(c, rc.roots)
    assert list(rc.roots) == list(sorted(rc.roots, key=lambda z: (z.real, z.imag)))
    disc, bound = discriminant(c)
    assume(abs(disc) > 1e-6 * (1 + bound))  # simple roots: companion is well conditioned
    ref = companion_roots(c)
    for z in rc.roots:  # matched as sets: near-equal real parts may sort differently
        assert np.min(np.abs(ref - z)) <= 1e-8 * (1 + abs(z))


@settings(max_examples=300)
@given(st.floats(0, np.pi), st.floats(0.01, 5), st.floats(0.01, 5), st.floats(-np.pi, np.pi))
def test_root_and_discriminant_classifications_agree(theta, a, lam, delta):
    c = char_poly(theta, a, lam, delta)
    rc = solve_cubic(c)
    disc, bound = discriminant(c)
    assume(abs(disc) > 1e3 * bound)  # away from the switching surface
    assert rc.all_real == (disc > 0)


def test_delta_zero_scan_is_empty():
    for a, lam in [(0.5, 1.5), (1.0, 1.0), (3.0, 0.2)]:
        rep = scan_hyperbolicity(a=a, lam=lam, delta=0.0)
        assert rep.nonhyperbolic_set == [] and rep.consistent


@pytest.mark.parametrize("d, alpha", [(0.25, 0.0), (1.0, 0.0), (4.0, 0.0)])
def test_delta_zero_from_solver_is_hyperbolic(d, alpha):
    rep = scan_hyperbolicity(compute_coefficients(d=d, alpha=alpha))
    assert np.all(rep.flags)


def test_precession_breaks_hyperbolicity_near_pole():
    rep = scan_hyperbolicity(a=1.0, lam=1.0, delta=np.pi / 6)
    assert rep.consistent
    lo, hi = rep.nonhyperbolic_set[0]
    assert lo == 0.0 and hi > 0.0
    assert nonhyperbolic_extent(rep) == hi
    ivs = rep.nonhyperbolic_set
    for (a0, b0), (a1, _) in zip(ivs, ivs[1:]):
        assert a0 <= b0 < a1
    assert all(0 <= a0 <= b0 <= np.pi for a0, b0 in ivs)


def test_single_equatorial_sample_is_hyperbolic():
    rep = scan_hyperbolicity(thetas=[np.pi / 2], a=1.0, lam=1.0, delta=np.pi / 6)
    assert rep.nonhyperbolic_set == [] and rep.flags.tolist() == [True]


def test_roots_are_continuous_in_theta():
    a, lam, delta = 0.8, 1.3, 0.5
    thetas = np.linspace(0, np.pi, 2001)
    rep = scan_hyperbolicity(thetas=thetas, a=a, lam=lam, delta=delta)
    coeffs = np.array([[c.p2, c.p1, c.p0] for c in (char_poly(t, a, lam, delta) for t in thetas)])
    dcoef = np.max(np.abs(np.diff(coeffs, axis=0)), axis=1)
    for i in range(len(thetas) - 1):
        # match roots greedily; away from collisions they move at O(coefficient change)
        r0, r1 = rep.roots[i], rep.roots[i + 1]
        dist = max(min(abs(z - w) for w in r1) for z in r0)
        disc = abs(discriminant(char_poly(thetas[i], a, lam, delta))[0])
        if disc > 1e-3:
            assert dist <= 10 * dcoef[i] / min(1.0, np.sqrt(disc)) + 1e-12


def test_discriminant_array_matches_scalar():
    t = np.linspace(0, np.pi, 17)
    disc, _ = discriminant_array(t, 0.7, 1.1, 0.3)
    ref = [discriminant(char_poly(x, 0.7, 1.1, 0.3))[0] for x in t]
    np.testing.assert_allclose(disc, ref, rtol=1e-12, atol=1e-15)


def test_scan_rejects_out_of_range():
    with pytest.raises(ValueError):
        scan_hyperbolicity(thetas=[-0.1, 1.0], a=1, lam=1, delta=0)
