import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracyamabe.bilinear import AccuracyError, QuadSpec, dirichlet_form_direct
from fracyamabe.geometry import ProblemParams
from fracyamabe.special import JacobiBasis
from fracyamabe.spectral import SpectralField, analyze, inner_Hs, spectrum


@pytest.mark.parametrize("mns", [(2, 2, 0.75), (2, 3, 0.6), (3, 2, 0.6), (3, 3, 0.55)])
def test_reproduces_symbol_on_basis(mns):
    p = ProblemParams(*mns)
    K = 3
    b = JacobiBasis.build(p.m, p.n, K)
    phi = spectrum(p, K).phi
    E = np.eye(K)
    G = np.array([[dirichlet_form_direct(p, SpectralField(b, E[i]), SpectralField(b, E[j]))
                   for j in range(K)] for i in range(K)])
    assert_allclose(np.diag(G), phi, rtol=1e-8)
    assert np.max(np.abs(G - np.diag(np.diag(G)))) < 1e-8 * phi[-1]


def test_constant_has_no_singular_part():
    p = ProblemParams(2, 2, 0.75)
    b = JacobiBasis.build(2, 2, 2)
    one = analyze(b, np.ones(b.Q))
    assert_allclose(dirichlet_form_direct(p, one, one), p.A_Ns * 2 * np.pi ** 2, rtol=1e-12)


def test_matches_spectral_inner_product_random():
    p = ProblemParams(2, 2, 0.75)
    b = JacobiBasis.build(2, 2, 4)
    rng = np.random.default_rng(7)
    f = SpectralField(b, rng.standard_normal(4))
    g = SpectralField(b, rng.standard_normal(4))
    tab = spectrum(p, 4)
    assert_allclose(dirichlet_form_direct(p, f, g), inner_Hs(f, g, tab), rtol=1e-8)
    assert_allclose(dirichlet_form_direct(p, f, g), dirichlet_form_direct(p, g, f), rtol=1e-12)


def test_accuracy_error_carries_estimate():
    p = ProblemParams(2, 2, 0.75)
    b = JacobiBasis.build(2, 2, 3)
    e = SpectralField(b, np.eye(3)[2])
    with pytest.raises(AccuracyError) as info:
        dirichlet_form_direct(p, e, e, QuadSpec(rho_start=2, rho_max=4, tol=1e-30))
    assert np.isfinite(info.value.estimate) and info.value.change > 0


def test_basis_mismatch():
    p = ProblemParams(2, 2, 0.75)
    b1 = JacobiBasis.build(2, 2, 3)
    b2 = JacobiBasis.build(2, 3, 3)
    with pytest.raises(ValueError):
        dirichlet_form_direct(p, SpectralField(b1, np.ones(3)), SpectralField(b2, np.ones(3)))
    with pytest.raises(ValueError):
        dirichlet_form_direct(p, SpectralField(b2, np.ones(3)), SpectralField(b2, np.ones(3)))
