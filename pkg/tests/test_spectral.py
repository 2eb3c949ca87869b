import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from fracyamabe.geometry import ProblemParams
from fracyamabe.special import JacobiBasis
from fracyamabe.spectral import (SpectralField, analyze, apply_Ps, holder_series, inner_Hs,
                                 lp_integral, norm_Hs, spectrum, symbol_asymptotics, symbol_phi,
                                 synthesize, write_spectrum_csv)

P3 = ProblemParams(2, 2, 0.75)


@pytest.fixture(scope="module")
def basis():
    return JacobiBasis.build(2, 2, 32)


def test_symbol_at_zero_is_A():
    for N in (3, 4, 5):
        for s in (0.3, 0.55, 0.75, 0.9):
            p = ProblemParams(2, N - 1, s)
            assert_allclose(symbol_phi(p, 0.0), p.A_Ns, rtol=1e-12)


def test_symbol_half_order():
    p = ProblemParams(2, 2, 0.5)
    assert_allclose(symbol_phi(p, 8.0), 3.0, rtol=1e-13)


def test_symbol_frozen_value():
    # N=3, s=0.75 at lambda_5 = 110, from a 40-digit Gamma oracle
    assert_allclose(symbol_phi(P3, 110.0), 34.17327346168017238209871054258238857362, rtol=1e-12)


def test_symbol_against_mpmath():
    mpmath.mp.dps = 30
    p = ProblemParams(3, 3, 0.6)
    lam = spectrum(p, 200).lam
    x = [mpmath.sqrt(mpmath.mpf(float(l)) + mpmath.mpf((p.N - 1) / 2) ** 2) for l in lam]
    ref = [float(mpmath.gamma(0.5 + p.s + v) / mpmath.gamma(0.5 - p.s + v)) for v in x]
    assert_allclose(symbol_phi(p, lam), ref, rtol=1e-12)


def test_symbol_increasing_and_domain():
    lam = np.linspace(0, 1e4, 1000)
    assert np.all(np.diff(symbol_phi(P3, lam)) > 0)
    with pytest.raises(ValueError):
        symbol_phi(P3, -1.0)


def test_spectrum_examples():
    t = spectrum(P3, 4)
    assert_allclose(t.lam, [0, 8, 24, 48])
    assert spectrum(ProblemParams(2, 3, 0.5), 2).lam[1] == 10
    t = spectrum(ProblemParams(3, 4, 0.6), 50)
    assert np.all(np.diff(t.lam) > 0) and np.all(t.phi > 0)
    b_full = np.arange(100) * (np.arange(100) + t.lam[1] / 2 - 1)
    N = 6
    b_full = np.arange(100) * (np.arange(100) + N - 1.0)
    assert_allclose(t.lam, b_full[0:100:2])


def test_analyze_constant(basis):
    f = analyze(basis, np.ones(basis.Q))
    assert_allclose(f.coeffs[0], math.sqrt(basis.mass), rtol=1e-13)
    assert np.max(np.abs(f.coeffs[1:])) < 1e-12


def test_analyze_basis_vector(basis):
    f = analyze(basis, basis.vander[:, 3])
    assert_allclose(f.coeffs, np.eye(basis.K)[3], atol=1e-12)


def test_round_trip_random(basis):
    rng = np.random.default_rng(1)
    c = rng.standard_normal(basis.K)
    f = SpectralField(basis, c)
    assert_allclose(analyze(basis, f.values).coeffs, c, atol=1e-10)
    t = np.linspace(-1, 1, 9)
    assert_allclose(synthesize(f, t), basis.eval(t) @ c, atol=1e-12)
    assert_allclose(f.values, synthesize(f, basis.nodes), atol=1e-10)


def test_shape_errors(basis):
    with pytest.raises(ValueError):
        analyze(basis, np.ones(3))
    with pytest.raises(ValueError):
        SpectralField(basis, np.ones(3))
    other = JacobiBasis.build(2, 3, 32)
    with pytest.raises(ValueError):
        inner_Hs(SpectralField(basis, np.ones(32)), SpectralField(other, np.ones(32)),
                 spectrum(P3, 32))


def test_apply_Ps(basis):
    tab = spectrum(P3, basis.K)
    const = analyze(basis, np.full(basis.Q, 2.0))
    assert_allclose(apply_Ps(const, tab).values, 2.0 * P3.A_Ns, rtol=1e-11)
    e = SpectralField(basis, np.eye(basis.K)[5])
    assert_allclose(apply_Ps(e, tab).coeffs, tab.phi[5] * np.eye(basis.K)[5])
    rng = np.random.default_rng(2)
    f = SpectralField(basis, rng.standard_normal(basis.K))
    g = SpectralField(basis, rng.standard_normal(basis.K))
    assert_allclose(apply_Ps(f + 2.0 * g, tab).coeffs,
                    apply_Ps(f, tab).coeffs + 2.0 * apply_Ps(g, tab).coeffs, rtol=1e-14)
    # self-adjoint in L^2_h
    lhs = np.sum(basis.weights * apply_Ps(f, tab).values * g.values)
    rhs = np.sum(basis.weights * f.values * apply_Ps(g, tab).values)
    assert_allclose(lhs, rhs, rtol=1e-12)


def test_norms(basis):
    tab = spectrum(P3, basis.K)
    one = analyze(basis, np.ones(basis.Q))
    assert_allclose(norm_Hs(one, tab) ** 2, P3.A_Ns * 2 * math.pi ** 2, rtol=1e-12)
    e = SpectralField(basis, np.eye(basis.K)[4])
    assert_allclose(norm_Hs(e, tab) ** 2, tab.phi[4], rtol=1e-14)
    rng = np.random.default_rng(3)
    for _ in range(20):
        f = SpectralField(basis, rng.standard_normal(basis.K))
        g = SpectralField(basis, rng.standard_normal(basis.K))
        assert abs(inner_Hs(f, g, tab)) <= norm_Hs(f, tab) * norm_Hs(g, tab)


def test_lp_integral(basis):
    one = analyze(basis, np.ones(basis.Q))
    for p in (1.0, 2.0, 3.3):
        assert_allclose(lp_integral(one, p), 2 * math.pi ** 2, rtol=1e-12)
    assert_allclose(lp_integral(SpectralField(basis, np.eye(basis.K)[1]), 2), 1.0, rtol=1e-12)
    rng = np.random.default_rng(4)
    f = SpectralField(basis, rng.standard_normal(basis.K))
    assert_allclose(lp_integral(f, 2), np.sum(f.coeffs ** 2), rtol=1e-10)
    with pytest.raises(ValueError):
        lp_integral(f, 0.5)


@pytest.mark.parametrize("mn", [(2, 2), (2, 3), (3, 3), (2, 5), (3, 4)])
def test_weight_mass_equals_sphere_volume(mn):
    b = JacobiBasis.build(*mn, 1, 3)
    N = sum(mn) - 1
    assert_allclose(b.mass, 2 * math.pi ** ((N + 1) / 2) / math.gamma((N + 1) / 2), rtol=1e-10)


def test_norm_equivalence_stable_in_K():
    rng = np.random.default_rng(5)
    ranges = []
    for K in (32, 64, 128):
        tab = spectrum(P3, K)
        r = []
        for _ in range(50):
            c = rng.standard_normal(K) / (1 + np.arange(K)) ** rng.uniform(0, 2)
            r.append(np.sum(tab.phi * c * c) / np.sum(c * c * (1 + tab.lam ** P3.s)))
        ranges.append((min(r), max(r)))
    lo = min(a for a, _ in ranges)
    hi = max(b for _, b in ranges)
    assert 0.1 < lo and hi < 10


def test_symbol_asymptotics():
    p = ProblemParams(2, 2, 0.75)
    r = symbol_asymptotics(p, 10000)
    assert abs(r[-1] - 1) < 0.01
    assert np.all(r > 0) and np.max(r[9:]) / np.min(r[9:]) < 2
    half = ProblemParams(2, 3, 0.5)
    i = np.arange(1, 101)
    b = i * (i + half.N - 1)
    assert_allclose(symbol_asymptotics(half, 100), np.sqrt(1 + ((half.N - 1) / 2) ** 2 / b), rtol=1e-12)
    with pytest.raises(ValueError):
        symbol_asymptotics(p, 5)


def test_holder_series_basic():
    b = JacobiBasis.build(2, 2, 1, 2)
    sums = holder_series(b, 0.75, 0.1, 64)
    assert sums[0] == 0.0
    assert np.all(np.diff(sums) >= 0)
    with pytest.raises(ValueError):
        holder_series(b, 0.4, 0.1, 10)


def test_spectrum_csv(tmp_path):
    import csv
    path = tmp_path / "spectrum.csv"
    p = ProblemParams(2, 2, 0.5)
    write_spectrum_csv(path, p, 10, header="config_hash=abc")
    lines = path.read_text().splitlines()
    assert lines[0] == "# config_hash=abc"
    rows = list(csv.reader(lines[1:]))
    assert rows[0] == ["i", "lambda_i", "b_i", "phi_lambda_i", "ratio_r_i"]
    assert all(len(r) == 5 for r in rows)
    assert float(rows[2][1]) == 8.0 and abs(float(rows[2][3]) - 3.0) < 1e-13
    assert_allclose(float(rows[1][3]), p.A_Ns, rtol=1e-15)
