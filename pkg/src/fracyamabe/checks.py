"""Invariant checks run by ``fracyamabe verify``.

Each check returns ``(measured, threshold)``; it passes when ``measured < threshold``.
"""
from __future__ import annotations

import math

import numpy as np

from .bilinear import dirichlet_form_direct
from .geometry import ProblemParams, stereo, stereo_inv
from .special import JacobiBasis, sphere_area
from .spectral import SpectralField, analyze, spectrum, symbol_asymptotics, symbol_phi
from .solver import (CouplingSpec, SystemState, energy_system, grad_system, nehari_project,
                     nehari_residuals)

__all__ = ["run_checks"]


def _symbol_at_zero(params: ProblemParams):
    return abs(symbol_phi(params, 0.0) / params.A_Ns - 1.0), 1e-12


def _half_order_symbol(params: ProblemParams):
    half = ProblemParams(params.m, params.n, 0.5)
    lam = spectrum(half, 11).lam
    exact = np.sqrt(lam + ((half.N - 1) / 2) ** 2)
    return float(np.max(np.abs(symbol_phi(half, lam) / exact - 1.0))), 1e-10


def _weight_mass(params: ProblemParams):
    b = JacobiBasis.build(params.m, params.n, 1, 4)
    return abs(b.mass / sphere_area(params.N + 1) - 1.0), 1e-10


def _orthonormality(params: ProblemParams):
    b = JacobiBasis.build(params.m, params.n, 128)
    G = b.vander.T @ (b.weights[:, None] * b.vander)
    return float(np.max(np.abs(G - np.eye(128)))), 1e-10


def _parseval(params: ProblemParams, rng):
    b = JacobiBasis.build(params.m, params.n, 64)
    worst = 0.0
    for _ in range(100):
        f = SpectralField(b, rng.standard_normal(64))
        l2 = float(np.sum(b.weights * f.values ** 2))
        worst = max(worst, abs(l2 / np.sum(f.coeffs ** 2) - 1.0))
    return worst, 1e-10


def _asymptotics(params: ProblemParams):
    r = symbol_asymptotics(params, 10000)
    bad = float(np.max(np.maximum(r[9:] - 2.0, 0.5 - r[9:])))
    return max(abs(r[-1] - 1.0) / 0.01, bad + 1.0 if bad > 0 else 0.0), 1.0


def _stereo(params: ProblemParams, rng):
    x = rng.standard_normal((1000, params.N))
    z = stereo_inv(x)
    err = np.max(np.abs(stereo(z) - x) / (1.0 + np.linalg.norm(x, axis=1, keepdims=True)))
    rhs = 2.0 / (1.0 + z[:, -1])
    err = max(err, np.max(np.abs(1.0 + np.sum(x * x, axis=1) - rhs) / rhs))
    return float(err), 1e-12


def _constants(params: ProblemParams):
    return abs(params.p_Ns / params.kappa_Ns / (4 ** params.s * params.A_Ns) - 1.0), 1e-12


def _gradient(params: ProblemParams, rng):
    b = JacobiBasis.build(params.m, params.n, 24)
    worst = 0.0
    h = 1e-4
    for ell in (1, 2, 3):
        for eta in (-1.0, -100.0):
            cp = CouplingSpec.uniform(ell, eta, params.two_star)
            C = rng.standard_normal((ell, 24)) / (1.0 + np.arange(24))
            st = SystemState(params, [SpectralField(b, c) for c in C], cp)
            g = grad_system(st)
            for _ in range(20):
                d = rng.standard_normal(C.shape)
                f = [energy_system(st.with_coeffs(C + k * h * d)) for k in (-2, -1, 1, 2)]
                fd = (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)
                worst = max(worst, abs(fd - np.sum(g * d)) / max(abs(fd), 1e-12))
    return worst, 1e-6


def _nehari(params: ProblemParams):
    b = JacobiBasis.build(params.m, params.n, 16)
    cp = CouplingSpec.uniform(2, -10.0, params.two_star)
    theta = np.arccos(b.nodes)
    fields = [analyze(b, np.exp(-((theta - c) / 0.4) ** 2)) for c in (0.8, 2.3)]
    _, st = nehari_project(SystemState(params, fields, cp))
    return float(np.max(np.abs(nehari_residuals(st)))), 1e-10


def _bilinear(params: ProblemParams):
    b = JacobiBasis.build(params.m, params.n, 3)
    phi = spectrum(params, 3).phi
    worst = 0.0
    for i in range(3):
        for j in range(i, 3):
            e = np.eye(3)
            val = dirichlet_form_direct(params, SpectralField(b, e[i]), SpectralField(b, e[j]))
            err = abs(val / phi[i] - 1.0) if i == j else abs(val) / phi[2]
            worst = max(worst, err)
    return worst, 0.02


def run_checks(params: ProblemParams, seed: int = 0, deep: bool = False) -> list:
    """Run the checks; returns a list of dicts ``{name, passed, measured, threshold}``."""
    rng = np.random.default_rng(seed)
    suite = [
        ("symbol_at_zero", lambda: _symbol_at_zero(params)),
        ("half_order_symbol", lambda: _half_order_symbol(params)),
        ("weight_mass", lambda: _weight_mass(params)),
        ("orthonormality", lambda: _orthonormality(params)),
        ("parseval", lambda: _parseval(params, rng)),
        ("symbol_asymptotics", lambda: _asymptotics(params)),
        ("stereographic_identities", lambda: _stereo(params, rng)),
        ("kernel_constants", lambda: _constants(params)),
        ("gradient_vs_finite_differences", lambda: _gradient(params, rng)),
        ("nehari_residuals", lambda: _nehari(params)),
    ]
    if deep:
        suite.append(("bilinear_form_direct", lambda: _bilinear(params)))
    report = []
    for name, fn in suite:
        measured, threshold = fn()
        report.append({
            "name": name,
            "passed": bool(measured < threshold and math.isfinite(measured)),
            "measured": float(measured),
            "threshold": float(threshold),
        })
    return report
