import math

import mpmath
import numpy as np
import pytest
import sympy
from numpy.testing import assert_allclose
from scipy.special import roots_jacobi

from fracyamabe.special import (JacobiBasis, JacobiParams, QuadratureError, gauss_jacobi,
                                jacobi_deriv, jacobi_eval, jacobi_norm_h, jacobi_table,
                                log_gamma, sphere_area, weight_normalizer)

mpmath.mp.dps = 30

PARAMS = [JacobiParams(0.0, 0.0), JacobiParams(0.0, 0.5), JacobiParams(0.5, 0.0),
          JacobiParams(0.5, 1.5), JacobiParams(1.0, 1.0), JacobiParams(2.0, 0.5)]


def test_log_gamma_trivial_values():
    assert log_gamma(1.0) == 0.0
    assert log_gamma(2.0) == 0.0
    assert_allclose(log_gamma(0.5), 0.5 * math.log(math.pi), rtol=1e-15)


def test_log_gamma_frozen_value():
    # 40 digits from an arbitrary-precision oracle
    ref = 7.052185450738539444925749253133010245418
    assert_allclose(log_gamma(7.25), ref, rtol=1e-15)


def test_log_gamma_against_mpmath():
    x = np.concatenate([np.geomspace(1e-3, 1e6, 400), [0.75, 1.001, 1.999, 2.25, 3.0]])
    got = log_gamma(x)
    ref = np.array([float(mpmath.loggamma(mpmath.mpf(float(v)))) for v in x])
    nz = np.abs(ref) > 1e-3
    assert np.max(np.abs(got[nz] / ref[nz] - 1.0)) < 1e-13
    assert np.max(np.abs(got[~nz] - ref[~nz])) < 1e-15


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5])
def test_log_gamma_domain(bad):
    with pytest.raises(ValueError):
        log_gamma(bad)


def test_jacobi_params_validation():
    with pytest.raises(ValueError):
        JacobiParams(-1.0, 0.0)
    assert JacobiParams.from_dims(2, 3) == JacobiParams(0.0, 0.5)


def test_weight_normalizer_examples():
    assert_allclose(weight_normalizer(JacobiParams(0, 0), 2, 2), math.pi ** 2, rtol=1e-14)
    assert_allclose(weight_normalizer(JacobiParams(0, 0.5), 2, 3),
                    8 * math.pi ** 2 / 2 ** 2.5, rtol=1e-14)
    assert weight_normalizer(JacobiParams(0.5, 0.5), 3, 3) == weight_normalizer(
        JacobiParams(0.5, 0.5), 3, 3)
    with pytest.raises(ValueError):
        weight_normalizer(JacobiParams(0, 0), 2, 3)


def test_sphere_area():
    assert_allclose(sphere_area(2), 2 * math.pi, rtol=1e-15)
    assert_allclose(sphere_area(3), 4 * math.pi, rtol=1e-15)
    assert_allclose(sphere_area(4), 2 * math.pi ** 2, rtol=1e-15)


def test_jacobi_low_degree_examples():
    assert jacobi_eval(JacobiParams(0.3, 1.2), 0, 0.4) == 1.0
    assert_allclose(jacobi_eval(JacobiParams(0, 0), 1, 0.3), 0.3, rtol=1e-15)
    assert_allclose(jacobi_eval(JacobiParams(0, 0.5), 1, -1.0), -1.5, rtol=1e-15)


@pytest.mark.parametrize("p", PARAMS)
def test_jacobi_against_symbolic_closed_forms(p):
    x = sympy.symbols("x")
    a, b = sympy.Rational(str(p.alpha)), sympy.Rational(str(p.beta))
    t = np.linspace(-1, 1, 17)
    for i in range(4):
        expr = sympy.expand(sympy.jacobi(i, a, b, x))
        f = sympy.lambdify(x, expr, "numpy")
        ref = np.broadcast_to(f(t), t.shape)
        assert_allclose(jacobi_eval(p, i, t), ref, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("p", PARAMS)
def test_jacobi_endpoint_normalization(p):
    for i in (0, 5, 40):
        ref = math.exp(math.lgamma(i + p.alpha + 1) - math.lgamma(i + 1) - math.lgamma(p.alpha + 1))
        assert_allclose(jacobi_eval(p, i, 1.0), ref, rtol=1e-12)


def test_jacobi_deriv_examples():
    p = JacobiParams(0, 0)
    assert_allclose(jacobi_deriv(p, 1, np.linspace(-1, 1, 5)), 1.0)
    assert jacobi_deriv(p, 0, 0.2) == 0.0


@pytest.mark.parametrize("p", PARAMS)
def test_jacobi_deriv_finite_differences(p):
    t = np.linspace(-0.95, 0.95, 13)
    h = 1e-6
    for i in (1, 2, 7, 20):
        fd = (jacobi_eval(p, i, t + h) - jacobi_eval(p, i, t - h)) / (2 * h)
        scale = max(1.0, np.max(np.abs(fd)))
        assert np.max(np.abs(jacobi_deriv(p, i, t) - fd)) < 1e-6 * scale


def test_jacobi_norm_examples():
    p = JacobiParams(0, 0)
    C = math.pi ** 2
    assert_allclose(jacobi_norm_h(p, C, 0), math.pi * math.sqrt(2), rtol=1e-14)
    assert_allclose(jacobi_norm_h(p, C, 1), math.sqrt(2 * math.pi ** 2 / 3), rtol=1e-14)


@pytest.mark.parametrize("p", PARAMS)
def test_jacobi_norm_against_mpmath_quadrature(p):
    C = 1.7
    for i in (0, 1, 4, 11):
        f = lambda x: mpmath.jacobi(i, p.alpha, p.beta, x) ** 2 * (1 - x) ** p.alpha * (1 + x) ** p.beta
        ref = math.sqrt(C * float(mpmath.quad(f, [-1, 0, 1])))
        assert_allclose(jacobi_norm_h(p, C, i), ref, rtol=1e-10)


def test_jacobi_stable_at_high_degree():
    p = JacobiParams(0.5, 0.5)
    vals = jacobi_table(p, 2000, np.linspace(-0.9, 0.9, 101))
    assert np.all(np.isfinite(vals))
    # p_2000 stays O(1) in the interior
    norm = jacobi_norm_h(p, 1.0, 2000)
    assert np.max(np.abs(vals[2000])) / norm < 10


def test_gauss_jacobi_examples():
    x, w = gauss_jacobi(JacobiParams(0, 0), math.pi ** 2, 2)
    assert_allclose(x, [-1 / math.sqrt(3), 1 / math.sqrt(3)], rtol=1e-15)
    assert_allclose(np.sum(w), 2 * math.pi ** 2, rtol=1e-14)


@pytest.mark.parametrize("p", PARAMS)
@pytest.mark.parametrize("Q", [1, 5, 64, 300])
def test_gauss_jacobi_nodes_match_scipy(p, Q):
    x, w = gauss_jacobi(p, 1.0, Q)
    ref, _ = roots_jacobi(Q, p.alpha, p.beta)
    assert_allclose(x, ref, atol=1e-13)
    assert np.all(np.diff(x) > 0) and np.all(np.abs(x) < 1) and np.all(w > 0)


@pytest.mark.parametrize("p", PARAMS)
def test_gauss_jacobi_exactness(p):
    Q = 12
    C = 2.3
    x, w = gauss_jacobi(p, C, Q)
    a, b = p.alpha, p.beta
    # moments of (1+t)^k against (1-t)^a (1+t)^b: 2^{a+b+k+1} B(a+1, b+k+1)
    for k in range(2 * Q):
        ref = C * 2 ** (a + b + k + 1) * math.exp(
            math.lgamma(a + 1) + math.lgamma(b + k + 1) - math.lgamma(a + b + k + 2))
        assert_allclose(np.sum(w * (1 + x) ** k), ref, rtol=1e-12)


def test_quadrature_error_carries_index():
    err = QuadratureError("no convergence", 7)
    assert err.index == 7 and "7" in str(err)


@pytest.mark.parametrize("mn", [(2, 2), (2, 3), (3, 4), (4, 2)])
def test_basis_orthonormal(mn):
    b = JacobiBasis.build(*mn, 64)
    G = b.vander.T @ (b.weights[:, None] * b.vander)
    assert np.max(np.abs(G - np.eye(64))) < 1e-10
    assert not b.vander.flags.writeable


def test_basis_eval_matches_vander():
    b = JacobiBasis.build(2, 3, 20, 30)
    assert_allclose(b.eval(b.nodes), b.vander, atol=1e-13)


def test_interior_sup_bounds():
    p = JacobiParams(0.0, 0.0)
    t = np.linspace(-0.9, 0.9, 2001)
    idx = np.arange(2001)
    norms = jacobi_norm_h(p, math.pi ** 2, idx)
    P = jacobi_table(p, 2000, t)
    sup = np.max(np.abs(P), axis=1) / norms
    shifted = JacobiParams(1.0, 1.0)
    D = jacobi_table(shifted, 1999, t)
    dsup = np.array([0.5 * (i + 1) * np.max(np.abs(D[i - 1])) / norms[i] / i for i in (100, 2000)])
    assert sup[2000] < 3 * sup[100]
    assert dsup[1] < 3 * dsup[0]
    assert np.max(sup[100:]) < 3 * sup[100]
