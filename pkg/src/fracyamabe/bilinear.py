"""Direct evaluation of the H^s bilinear form from its singular-integral definition.

    E(u1, u2) = c_{N,s}/2 int int (u1(z) - u1(zeta)) (u2(z) - u2(zeta)) / |z - zeta|^{N+2s}
                + A_{N,s} int u1 u2

for G-invariant ``u_k = w_k(T)``. By invariance the outer integral reduces to
one over the orbit coordinate ``t`` against ``h``. The inner integral is taken
in geodesic polar coordinates ``zeta = cos(rho) z + sin(rho) omega`` around a
representative ``z``; then

    sin^{N-1}(rho) / |z - zeta|^{N+2s} = cos^{N-1}(rho/2) (2 sin(rho/2))^{-1-2s}

and the integrand is ``rho^{1-2s}`` times an analytic function of ``rho``, which
Gauss-Jacobi quadrature in ``rho`` handles at spectral accuracy. The direction
``omega`` splits into the angle ``psi`` to the orbit tangent and the angle
``chi`` between the remaining x- and y-directions; the integrand is a
polynomial in ``cos(psi)`` and ``cos(2 chi)``, so those rules are exact.

The orbit coordinate consistent with the weight ``h`` is ``|z_y|^2 - |z_x|^2``:
its pushforward of the volume has exponent ``m/2 - 1`` at ``t = 1``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import ProblemParams
from .special import JacobiParams, gauss_jacobi, sphere_area
from .spectral import SpectralField

__all__ = ["QuadSpec", "AccuracyError", "dirichlet_form_direct"]


class AccuracyError(RuntimeError):
    """Refinement stopped before reaching the requested tolerance."""

    def __init__(self, message: str, estimate: float, change: float):
        super().__init__(message)
        self.estimate = estimate
        self.change = change


@dataclass(frozen=True)
class QuadSpec:
    """Node counts for the reduced integral.

    ``n_t``, ``n_psi`` and ``n_chi`` default to values that make those rules
    exact for the given profiles. ``n_rho`` is doubled from ``rho_start``
    until the relative change drops below ``tol`` or exceeds ``rho_max``.
    """

    n_t: int | None = None
    n_psi: int | None = None
    n_chi: int | None = None
    rho_start: int = 16
    rho_max: int = 1024
    tol: float = 1e-6


def _rule(alpha: float, beta: float, Q: int):
    return gauss_jacobi(JacobiParams(alpha, beta), 1.0, Q)


def _double_integral(params, f1, f2, n_t, n_psi, n_chi, n_rho):
    m, n, N, s = params.m, params.n, params.N, params.s
    basis = f1.basis
    # outer: orbit coordinate against h
    t, wt = _rule(basis.params.alpha, basis.params.beta, n_t)
    wt = wt * basis.C
    # rho in [0, pi] against rho^{1-2s}
    x, wx = _rule(0.0, 1.0 - 2.0 * s, n_rho)
    rho = 0.5 * math.pi * (1.0 + x)
    w_rho = wx * (0.5 * math.pi) ** (2.0 - 2.0 * s)
    half = 0.5 * rho
    w_rho = w_rho * np.cos(half) ** (N - 1) * (rho / (2.0 * np.sin(half))) ** (1.0 + 2.0 * s) / rho ** 2
    # psi in [0, pi] against sin^{N-2}: c = cos(psi)
    c, wc = _rule((N - 3) / 2.0, (N - 3) / 2.0, n_psi)
    # chi in [0, pi/2] against cos^{m-2} sin^{n-2}: v = cos(2 chi)
    v, wv = _rule((n - 3) / 2.0, (m - 3) / 2.0, n_chi)
    wv = wv * 0.25 * 2.0 ** (-(m + n - 6) / 2.0)
    pref = sphere_area(m - 1) * sphere_area(n - 1)

    ry = np.sqrt((1.0 + t) / 2.0)[:, None, None, None]
    rx = np.sqrt((1.0 - t) / 2.0)[:, None, None, None]
    cr = np.cos(rho)[None, :, None, None]
    sr = np.sin(rho)[None, :, None, None]
    cp = c[None, None, :, None]
    sp2 = (1.0 - c * c)[None, None, :, None]
    cx2 = ((1.0 + v) / 2.0)[None, None, None, :]
    zx2 = (cr * rx - sr * cp * ry) ** 2 + sr * sr * sp2 * cx2
    zy2 = (cr * ry + sr * cp * rx) ** 2 + sr * sr * sp2 * (1.0 - cx2)
    T = np.clip(zy2 - zx2, -1.0, 1.0)
    shape = T.shape

    def diff(f):
        inner = (basis.eval(T.ravel(), f.basis.K) @ f.coeffs).reshape(shape)
        outer = basis.eval(t, f.basis.K) @ f.coeffs
        return outer[:, None, None, None] - inner

    D = diff(f1) * diff(f2)
    W = (wt[:, None, None, None] * w_rho[None, :, None, None]
         * wc[None, None, :, None] * wv[None, None, None, :])
    return pref * float(np.sum(W * D)), pref * float(np.sum(W * np.abs(D)))


def dirichlet_form_direct(params: ProblemParams, w1: SpectralField, w2: SpectralField,
                          quad_spec: QuadSpec | None = None) -> float:
    """``E(u1, u2)`` by direct quadrature of the singular double integral.

    Raises :class:`AccuracyError` if refining the radial rule up to
    ``quad_spec.rho_max`` nodes does not settle the value to ``quad_spec.tol``.
    """
    if w1.basis.K != w2.basis.K or w1.basis.params != w2.basis.params:
        raise ValueError("profiles must share a basis")
    bp = w1.basis.params
    if (bp.alpha, bp.beta) != (params.m / 2 - 1, params.n / 2 - 1):
        raise ValueError("basis does not match the problem dimensions")
    qs = quad_spec or QuadSpec()
    deg = 2 * (w1.basis.K - 1)
    n_t = qs.n_t or deg + 2
    n_psi = qs.n_psi or deg + 2
    n_chi = qs.n_chi or deg // 2 + 2
    l2 = float(np.sum(w1.basis.weights * w1.values * w2.values))
    const = 0.5 * params.c_Ns
    n_rho = qs.rho_start
    prev, _ = _double_integral(params, w1, w2, n_t, n_psi, n_chi, n_rho)
    change = math.inf
    while n_rho < qs.rho_max:
        n_rho *= 2
        cur, scale = _double_integral(params, w1, w2, n_t, n_psi, n_chi, n_rho)
        change = abs(cur - prev) / max(scale, 1e-300)
        prev = cur
        if change < qs.tol:
            return const * cur + params.A_Ns * l2
    raise AccuracyError(f"radial rule not converged at {n_rho} nodes (change {change:.2e})",
                        const * prev + params.A_Ns * l2, change)
