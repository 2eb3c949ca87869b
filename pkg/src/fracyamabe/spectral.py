"""The reduced space H^s_h([-1, 1]) of G-invariant functions.

A G-invariant ``u`` on S^N is stored as its profile ``w`` on [-1, 1], expanded
in the orthonormal Jacobi basis: ``w = sum_i c_i p_i``. The conformal
fractional Laplacian is diagonal in this basis with eigenvalue
``phi(lambda_i)``, ``lambda_i = 2i(2i + N - 1)``.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .geometry import ProblemParams
from .special import JacobiBasis, jacobi_table, jacobi_norm_h, log_gamma

__all__ = [
    "SpectrumTable",
    "SpectralField",
    "symbol_phi",
    "spectrum",
    "analyze",
    "synthesize",
    "apply_Ps",
    "norm_Hs",
    "inner_Hs",
    "lp_integral",
    "holder_series",
    "symbol_asymptotics",
    "write_spectrum_csv",
]


def symbol_phi(params: ProblemParams, lam):
    """Eigenvalue of the conformal fractional Laplacian on the ``-Delta`` eigenspace ``lam``.

    ``Gamma(1/2 + s + x) / Gamma(1/2 - s + x)`` with ``x = sqrt(lam + ((N-1)/2)^2)``.
    """
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise ValueError("lambda must be non-negative")
    s = params.s
    x = np.sqrt(lam + ((params.N - 1) / 2.0) ** 2)
    assert np.all(0.5 - s + x > 0)
    out = np.exp(log_gamma(0.5 + s + x) - log_gamma(0.5 - s + x))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectrumTable:
    lam: np.ndarray
    b: np.ndarray
    phi: np.ndarray

    def __len__(self) -> int:
        return len(self.lam)


def spectrum(params: ProblemParams, K: int) -> SpectrumTable:
    """G-invariant eigenvalues ``lambda_i = b_{2i}`` and their symbols, ``i < K``."""
    if K < 1:
        raise ValueError("K must be >= 1")
    i = np.arange(K, dtype=float)
    N = params.N
    lam = 2.0 * i * (2.0 * i + N - 1.0)
    b = i * (i + N - 1.0)
    return SpectrumTable(lam=lam, b=b, phi=symbol_phi(params, lam))


class SpectralField:
    """Profile ``w = sum_i coeffs[i] p_i`` of one G-invariant function."""

    __slots__ = ("basis", "coeffs", "__dict__")

    def __init__(self, basis: JacobiBasis, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (basis.K,):
            raise ValueError(f"expected {basis.K} coefficients, got shape {coeffs.shape}")
        self.basis = basis
        self.coeffs = coeffs

    @cached_property
    def values(self) -> np.ndarray:
        """Profile at the quadrature nodes."""
        return self.basis.vander @ self.coeffs

    def __add__(self, other: "SpectralField") -> "SpectralField":
        _check_same(self, other)
        return SpectralField(self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        _check_same(self, other)
        return SpectralField(self.basis, self.coeffs - other.coeffs)

    def __mul__(self, c: float) -> "SpectralField":
        return SpectralField(self.basis, c * self.coeffs)

    __rmul__ = __mul__

    def __neg__(self) -> "SpectralField":
        return SpectralField(self.basis, -self.coeffs)


def _check_same(f1: SpectralField, f2: SpectralField) -> None:
    if f1.basis is not f2.basis and (
        f1.basis.K != f2.basis.K or f1.basis.params != f2.basis.params
        or f1.basis.Q != f2.basis.Q
    ):
        raise ValueError("fields live on different bases")


def analyze(basis: JacobiBasis, values) -> SpectralField:
    """Coefficients ``c_i = sum_q w_q v_q p_i(t_q)`` from values at the nodes."""
    values = np.asarray(values, dtype=float)
    if values.shape != (basis.Q,):
        raise ValueError(f"expected {basis.Q} nodal values, got shape {values.shape}")
    return SpectralField(basis, basis.vander.T @ (basis.weights * values))


def synthesize(field: SpectralField, t):
    """Evaluate the profile at arbitrary ``t`` in [-1, 1]."""
    t = np.asarray(t, dtype=float)
    out = field.basis.eval(t.ravel()) @ field.coeffs
    return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)


def apply_Ps(field: SpectralField, table: SpectrumTable) -> SpectralField:
    if field.basis.K > len(table):
        raise ValueError("spectrum table shorter than the basis")
    return SpectralField(field.basis, table.phi[: field.basis.K] * field.coeffs)


def inner_Hs(f1: SpectralField, f2: SpectralField, table: SpectrumTable) -> float:
    _check_same(f1, f2)
    K = f1.basis.K
    return float(np.sum(table.phi[:K] * f1.coeffs * f2.coeffs))


def norm_Hs(field: SpectralField, table: SpectrumTable) -> float:
    return math.sqrt(inner_Hs(field, field, table))


def lp_integral(field: SpectralField, p: float) -> float:
    """``int_{S^N} |u|^p dV``, by quadrature of the profile against ``h``."""
    if p < 1:
        raise ValueError("p must be >= 1")
    return float(np.sum(field.basis.weights * np.abs(field.values) ** p))


def holder_series(basis: JacobiBasis, s: float, epsilon: float, I_max: int,
                  n_grid: int = 1001) -> np.ndarray:
    """Partial sums of ``[p_i]^2 (1 + i^2)^{-s}`` for ``i = 0..I_max``.

    ``[p_i]`` is the C^{0, s-1/2} seminorm on ``[-1+epsilon, 1-epsilon]``,
    estimated by maximizing over all pairs of an ``n_grid``-point grid. The
    grid estimate is a lower bound for the true seminorm.
    """
    if not 0.5 < s < 1.0:
        raise ValueError("need s in (1/2, 1)")
    if not 0.0 < epsilon < 1.0:
        raise ValueError("need epsilon in (0, 1)")
    gam = s - 0.5
    t = np.linspace(-1.0 + epsilon, 1.0 - epsilon, n_grid)
    norms = jacobi_norm_h(basis.params, basis.C, np.arange(I_max + 1))
    P = jacobi_table(basis.params, I_max, t) / norms[:, None]
    iu = np.triu_indices(n_grid, k=1)
    inv_dist = np.abs(t[iu[1]] - t[iu[0]]) ** (-gam)
    semi = np.empty(I_max + 1)
    for i in range(I_max + 1):
        p = P[i]
        semi[i] = np.max(np.abs(p[iu[1]] - p[iu[0]]) * inv_dist)
    i = np.arange(I_max + 1, dtype=float)
    return np.cumsum(semi ** 2 * (1.0 + i * i) ** (-s))


def symbol_asymptotics(params: ProblemParams, i_max: int) -> np.ndarray:
    """``phi(b_i) / b_i^s`` for ``i = 1..i_max``, with ``b_i = i(i + N - 1)``."""
    if i_max < 10:
        raise ValueError("i_max must be >= 10")
    i = np.arange(1, i_max + 1, dtype=float)
    b = i * (i + params.N - 1.0)
    return symbol_phi(params, b) / b ** params.s


def write_spectrum_csv(path, params: ProblemParams, K: int, header: str | None = None) -> None:
    """Write ``i, lambda_i, b_i, phi_lambda_i, ratio_r_i`` rows (ratio is nan at i=0)."""
    table = spectrum(params, K)
    i = np.arange(K, dtype=float)
    b = table.b
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(b > 0, symbol_phi(params, b) / b ** params.s, np.nan)
    with open(path, "w", newline="") as fh:
        if header:
            fh.write(f"# {header}\n")
        w = csv.writer(fh)
        w.writerow(["i", "lambda_i", "b_i", "phi_lambda_i", "ratio_r_i"])
        for k in range(K):
            w.writerow([int(i[k]), repr(float(table.lam[k])), repr(float(b[k])),
                        repr(float(table.phi[k])), repr(float(ratio[k]))])
