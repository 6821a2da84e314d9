import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from defml import analysis
from defml.analysis import (
    NonConvergenceError,
    g_zeros,
    gauss_rule,
    gram_matrix,
    integrate_weighted,
    jacobi_matrix,
    monic_norms,
    orthogonality_matrix,
    phi_values,
    phi_zeros,
    scaled_residual,
    weight_eval,
    weight_moment,
    weight_moment_exact,
)
from defml.families import g_by_recurrence, phi_monic_by_recurrence

HS = [0.5, 1.0, 2.0]


def moment_by_odd_zeta_sum(k: int, h: float) -> float:
    """Oracle: 4 k! ... via mpmath.nsum of sum_j (2j+1)^-s with s = k + 2."""
    if k % 2:
        return 0.0
    s = k + 2
    lam = mpmath.nsum(lambda j: (2 * j + 1) ** (-s), [0, mpmath.inf])
    return float(4 * mpmath.factorial(k + 1) * lam * (h / mpmath.pi) ** s)


def moment_by_mp_quad(k: int, h: float) -> float:
    a = mpmath.pi / h
    f = lambda y: y ** (k + 1) / mpmath.sinh(a * y)
    return float(2 * mpmath.quad(f, [0, mpmath.inf])) if k % 2 == 0 else 0.0


def test_weight_eval():
    assert weight_eval(0.0, math.pi) == pytest.approx(1.0, rel=1e-15)
    assert weight_eval(0.3, 1.0) == pytest.approx(0.3 / math.sinh(0.3 * math.pi), rel=1e-14)
    y = np.array([-2.5, -0.1, 0.1, 2.5])
    np.testing.assert_array_equal(weight_eval(y, 0.7), weight_eval(-y, 0.7))
    for t in (10.0, 50.0, 400.0):
        assert weight_eval(t, 1.0) <= 2.0 * t * math.exp(-math.pi * t)
    assert np.all(np.isfinite(weight_eval(np.array([1e5, -1e5]), 0.1)))
    with pytest.raises(ValueError):
        weight_eval(1.0, 0.0)


def test_moment_examples():
    assert weight_moment(3, 1.0) == 0.0
    assert weight_moment_exact(0, 1) == Fraction(1, 2)
    assert weight_moment_exact(2, 1) == Fraction(1, 4)
    assert weight_moment(0, 2.0) == pytest.approx(2.0)


@pytest.mark.parametrize("k", range(0, 13))
@pytest.mark.parametrize("h", HS)
def test_moments_against_zeta_oracle(k, h):
    assert weight_moment(k, h) == pytest.approx(moment_by_odd_zeta_sum(k, h), rel=1e-14, abs=0)


@pytest.mark.parametrize("k", [0, 2, 6, 10])
def test_moments_against_mp_quadrature(k):
    assert weight_moment(k, 1.3) == pytest.approx(moment_by_mp_quad(k, 1.3), rel=1e-13)


def test_integrate_weighted_examples():
    assert integrate_weighted(lambda y: 1.0, 1.0, 1e-12) == pytest.approx(0.5, rel=1e-12)
    assert abs(integrate_weighted(lambda y: y**3 - y, 1.0, 1e-12)) < 1e-12
    phi0_phi2 = lambda y: 2 * (2.0 / 3.0) * (2 * y * y - 1.0)
    assert abs(integrate_weighted(phi0_phi2, 1.0, 1e-12)) < 1e-12


@pytest.mark.parametrize("h", HS)
def test_integrate_weighted_vs_moments(h):
    ks = np.arange(13)
    vals = integrate_weighted(lambda y: y[None, :] ** ks[:, None], h, 1e-12)
    for k in ks:
        ref = weight_moment(int(k), h)
        assert abs(vals[k] - ref) <= 1e-12 * max(ref, weight_moment(int(k) + (k % 2), h))


def test_integrate_weighted_nonconvergence():
    with pytest.raises(NonConvergenceError) as e:
        integrate_weighted(lambda y: np.cos(40 * y), 1.0, 1e-14, max_level=3)
    assert e.value.estimate is not None


def test_jacobi_matrix():
    J = jacobi_matrix(4, 2.0)
    np.testing.assert_allclose(J.beta, [2.0, 6.0, 12.0])
    assert np.all(J.alpha == 0) and J.mu0 == pytest.approx(2.0)
    d = J.dense()
    assert np.allclose(d, d.T)


def test_phi_zero_examples():
    np.testing.assert_array_equal(phi_zeros(1, 1.0), [0.0])
    np.testing.assert_allclose(phi_zeros(3, 1.0), [-math.sqrt(2), 0, math.sqrt(2)], atol=1e-15)
    for h in (0.3, 1.0, 4.0):
        np.testing.assert_allclose(phi_zeros(2, h), [-h / math.sqrt(2), h / math.sqrt(2)], rtol=1e-14)


@pytest.mark.parametrize("h", HS)
def test_zero_properties(h):
    prev = None
    for n in range(1, 21):
        z = phi_zeros(n, h)
        assert np.all(np.diff(z) > 0)
        np.testing.assert_array_equal(z, -z[::-1])
        assert (0.0 in z) == (n % 2 == 1)
        np.testing.assert_allclose(z, phi_zeros(n, h, method="bisect"), atol=1e-12 * h * n)
        if prev is not None:
            assert np.all(z[:-1] < prev) and np.all(prev < z[1:])
        prev = z


def test_zero_residuals():
    members = phi_monic_by_recurrence(20).members
    for h in HS:
        for n in (5, 13, 20):
            for z in phi_zeros(n, h):
                assert scaled_residual(members[n], float(z), h) < 1e-8


def test_g_zero_examples():
    np.testing.assert_array_equal(g_zeros(1, 1.0), [0j])
    z = g_zeros(3, 1.0)
    np.testing.assert_allclose(z.imag, [-1 / math.sqrt(2), 0, 1 / math.sqrt(2)], atol=1e-15)
    assert np.all(z.real == 0)
    assert list(g_zeros(2, 1.0)) == [0j, 0j]
    g = g_by_recurrence(9)
    for zz in g_zeros(9, 0.5):
        assert scaled_residual(g[9], complex(zz), 0.5) < 1e-8


def test_gauss_examples():
    r1 = gauss_rule(1, 1.0)
    np.testing.assert_allclose(r1.nodes, [0.0])
    np.testing.assert_allclose(r1.weights, [0.5])
    r2 = gauss_rule(2, 1.0)
    np.testing.assert_allclose(r2.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    np.testing.assert_allclose(r2.weights, [0.25, 0.25], rtol=1e-15)
    assert r2.apply(lambda y: y**2) == pytest.approx(0.25, rel=1e-15)
    assert r2.moment(2) == pytest.approx(0.25, rel=1e-15)
    assert r2.moment(3) == 0.0


@pytest.mark.parametrize("h", HS)
def test_gauss_exactness(h):
    for n in range(1, 13):
        rule = gauss_rule(n, h)
        assert np.all(rule.weights > 0)
        for k in range(2 * n):
            got = rule.moment(k)
            ref = weight_moment(k, h)
            if k % 2:
                assert abs(got) <= 1e-12
            else:
                assert got == pytest.approx(ref, rel=1e-10)


def test_gauss_rule_is_not_exact_beyond_degree():
    rule = gauss_rule(3, 1.0)
    assert abs(rule.moment(6) - weight_moment(6, 1.0)) > 1e-3


def test_phi_values_non_monic_scale():
    x = np.array([0.3, -1.1])
    v = phi_values(x, 3, 1.0)
    np.testing.assert_allclose(v[0], 2.0)
    np.testing.assert_allclose(v[2], 2 / 3 * (2 * x * x - 1), rtol=1e-15)


def test_orthogonality_examples():
    G = gram_matrix(1, 1.0)
    assert G[0, 0] == pytest.approx(2.0, rel=1e-12)
    assert G[1, 1] == pytest.approx(1.0, rel=1e-12)
    rep = orthogonality_matrix(0, 2.0)[0][0]
    assert rep.measured == pytest.approx(8.0, rel=1e-12)
    assert rep.passed and rep.matched == "derived"
    assert float(rep.claimed_paper) == 2.0


@pytest.mark.parametrize("h", HS)
def test_norm_consistency(h):
    G = gram_matrix(8, h, monic=True)
    np.testing.assert_allclose(np.diag(G), monic_norms(8, h), rtol=1e-11)


def test_g_orthogonality_integrand_is_phi_product():
    re, im = analysis.g_orthogonality_integrand(3, 3)
    assert im.is_zero()
    from defml.families import phi_by_recurrence
    p = phi_by_recurrence(2)[2]
    assert re == p * p


def test_g_orthogonality_reports():
    reps = analysis.g_orthogonality_reports(4, 2.0, 1e-10)
    assert all(r.passed for r in reps)
    diag = [r for r in reps if r.identity.endswith("diagonal") and r.params["n"] == r.params["m"]]
    assert all(r.matched == "derived" for r in diag)


def test_h_must_be_positive():
    for fn in (lambda: phi_zeros(3, -1.0), lambda: gauss_rule(2, 0.0), lambda: jacobi_matrix(3, -2)):
        with pytest.raises(ValueError):
            fn()
