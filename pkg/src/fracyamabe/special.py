"""Gamma function, Jacobi polynomials and Gauss-Jacobi quadrature.

Jacobi polynomials use Szego's normalization ``P_i(1) = binom(i + alpha, i)``.
The normalized polynomials ``p_i = P_i / ||P_i||_h`` do not depend on that
choice (up to a positive factor), so nothing downstream sees it.

The weight on [-1, 1] is ``h(t) = C(alpha, beta) (1 - t)^alpha (1 + t)^beta``
with ``C(alpha, beta) = |S^{m-1}| |S^{n-1}| / 2^{(m+n)/2}``; integrating
against ``h`` is integrating a G-invariant function over S^N.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import zeta

__all__ = [
    "log_gamma",
    "gamma_ratio",
    "sphere_area",
    "JacobiParams",
    "weight_normalizer",
    "jacobi_eval",
    "jacobi_table",
    "jacobi_deriv",
    "jacobi_norm_h",
    "gauss_jacobi",
    "QuadratureError",
    "JacobiBasis",
]


class QuadratureError(RuntimeError):
    """Root finding for Gauss-Jacobi nodes failed."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (root index {index})")
        self.index = index


# Lanczos approximation, g = 607/128, 15 terms (Godfrey).
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061

# log Gamma(1 + e) = -gamma e + sum_{k>=2} (-1)^k zeta(k) e^k / k, |e| <= 1/4
_TAYLOR_TERMS = 30
_TAYLOR_COEF = np.array(
    [0.0, -_EULER_GAMMA]
    + [(-1.0) ** k * zeta(k) / k for k in range(2, _TAYLOR_TERMS + 1)]
)
_TAYLOR_RADIUS = 0.25


def _lanczos_log_gamma(x: np.ndarray) -> np.ndarray:
    # valid for x >= 0.5
    z = x - 1.0
    series = np.full_like(z, _LANCZOS_COEF[0])
    for k in range(1, len(_LANCZOS_COEF)):
        series = series + _LANCZOS_COEF[k] / (z + k)
    tmp = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(tmp) - tmp + np.log(series)


def _taylor_log_gamma_1p(eps: np.ndarray) -> np.ndarray:
    out = np.zeros_like(eps)
    for c in _TAYLOR_COEF[::-1]:
        out = out * eps + c
    return out


def log_gamma(x):
    """Natural log of the Gamma function for positive real ``x``.

    Lanczos sum for ``x >= 0.5`` and the shift ``lnG(x) = lnG(x+1) - ln x``
    below that. Around the zeros at 1 and 2 a Taylor series is used so that
    the *relative* error stays near machine precision.

    Raises
    ------
    ValueError
        If any ``x <= 0``.
    """
    arr = np.asarray(x, dtype=float)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    if np.any(~(arr > 0)):
        raise ValueError("log_gamma is only defined here for x > 0")
    out = np.empty_like(arr)

    near1 = np.abs(arr - 1.0) <= _TAYLOR_RADIUS
    near2 = np.abs(arr - 2.0) <= _TAYLOR_RADIUS
    small = (arr < 0.5) & ~near1
    rest = ~(near1 | near2 | small)

    out[near1] = _taylor_log_gamma_1p(arr[near1] - 1.0)
    e2 = arr[near2] - 2.0
    out[near2] = np.log1p(e2) + _taylor_log_gamma_1p(e2)
    xs = arr[small]
    out[small] = _lanczos_log_gamma(xs + 1.0) - np.log(xs)
    out[rest] = _lanczos_log_gamma(arr[rest])
    return float(out[0]) if scalar else out


def gamma_ratio(num, den):
    """``prod Gamma(num) / prod Gamma(den)`` evaluated in log space."""
    lg = sum(log_gamma(a) for a in num) - sum(log_gamma(b) for b in den)
    return np.exp(lg)


def sphere_area(k: int) -> float:
    """Surface measure of the unit sphere S^{k-1} in R^k."""
    return 2.0 * math.pi ** (k / 2.0) / math.exp(log_gamma(k / 2.0))


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"need alpha, beta > -1, got {self.alpha}, {self.beta}")

    @classmethod
    def from_dims(cls, m: int, n: int) -> "JacobiParams":
        if m < 2 or n < 2:
            raise ValueError("m and n must be >= 2")
        return cls(m / 2.0 - 1.0, n / 2.0 - 1.0)


def weight_normalizer(params: JacobiParams, m: int, n: int) -> float:
    """The constant ``C(alpha, beta) = |S^{m-1}||S^{n-1}| / 2^{(m+n)/2}``."""
    if m < 2 or n < 2:
        raise ValueError("m and n must be >= 2")
    if abs(params.alpha - (m / 2 - 1)) > 1e-14 or abs(params.beta - (n / 2 - 1)) > 1e-14:
        raise ValueError(f"{params} is inconsistent with m={m}, n={n}")
    return sphere_area(m) * sphere_area(n) / 2.0 ** ((m + n) / 2.0)


def jacobi_table(params: JacobiParams, degree: int, t) -> np.ndarray:
    """Rows ``P_0(t), ..., P_degree(t)`` from the three-term recurrence.

    Returns an array of shape ``(degree + 1,) + np.shape(t)``.
    """
    a, b = params.alpha, params.beta
    t = np.asarray(t, dtype=float)
    out = np.empty((degree + 1,) + t.shape)
    out[0] = 1.0
    if degree == 0:
        return out
    out[1] = 0.5 * ((a + b + 2.0) * t + (a - b))
    ab = a + b
    for k in range(2, degree + 1):
        c = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        out[k] = ((a2 + a3 * t) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def jacobi_eval(params: JacobiParams, i: int, t):
    """``P_i^{(alpha, beta)}(t)`` (Szego normalization)."""
    if i < 0:
        raise ValueError("degree must be non-negative")
    val = jacobi_table(params, i, t)[i]
    return float(val) if val.ndim == 0 else val


def jacobi_deriv(params: JacobiParams, i: int, t):
    """Derivative ``P_i'(t) = (i + alpha + beta + 1)/2 * P_{i-1}^{(alpha+1, beta+1)}(t)``."""
    if i == 0:
        z = np.zeros_like(np.asarray(t, dtype=float))
        return float(z) if z.ndim == 0 else z
    shifted = JacobiParams(params.alpha + 1.0, params.beta + 1.0)
    return 0.5 * (i + params.alpha + params.beta + 1.0) * jacobi_eval(shifted, i - 1, t)


def jacobi_norm_h(params: JacobiParams, C: float, i):
    """``||P_i||_h`` from the closed form, with the Gamma ratio taken in log space."""
    a, b = params.alpha, params.beta
    i = np.asarray(i, dtype=float)
    # 1/Gamma(i+a+b+1) written as (i+a+b+1)/Gamma(i+a+b+2)
    lg = (
        log_gamma(i + a + 1.0)
        + log_gamma(i + b + 1.0)
        - log_gamma(i + a + b + 2.0)
        - log_gamma(i + 1.0)
    )
    sq = C * 2.0 ** (a + b + 1.0) * (i + a + b + 1.0) / (2.0 * i + a + b + 1.0) * np.exp(lg)
    out = np.sqrt(sq)
    return float(out) if out.ndim == 0 else out


def _gauss_jacobi_nodes(params: JacobiParams, Q: int, tol: float = 1e-14,
                        max_iter: int = 100) -> np.ndarray:
    """Roots of P_Q by simultaneous Newton with Aberth deflation."""
    if Q == 1:
        a, b = params.alpha, params.beta
        return np.array([(b - a) / (a + b + 2.0)])
    k = np.arange(Q)
    x = -np.cos((2.0 * k + 1.0) * np.pi / (2.0 * Q))
    converged = np.zeros(Q, dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            f = jacobi_eval(params, Q, x)
            fp = jacobi_deriv(params, Q, x)
            ratio = f / fp
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            step = ratio / (1.0 - ratio * s)
            step[converged] = 0.0
            x = np.clip(x - step, -1.0, 1.0)
            converged |= np.abs(step) <= tol
            if converged.all():
                break
    x = np.sort(x)
    bad = ~converged
    if np.any(np.diff(x) <= 0) or np.any(np.abs(x) >= 1):
        bad[:] = True
    if bad.any():
        x = _bisect_roots(params, Q)
    return x


def _bisect_roots(params: JacobiParams, Q: int) -> np.ndarray:
    """Fallback: bracket every sign change on a fine grid and bisect."""
    grid = -np.cos(np.linspace(0.0, np.pi, 16 * Q + 1))
    vals = jacobi_eval(params, Q, grid)
    idx = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) < 0)[0]
    if len(idx) != Q:
        raise QuadratureError(f"found {len(idx)} sign changes, expected {Q}", int(len(idx)))
    lo, hi = grid[idx].copy(), grid[idx + 1].copy()
    flo = vals[idx]
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = jacobi_eval(params, Q, mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
        if np.all(hi - lo <= 1e-15):
            break
    return 0.5 * (lo + hi)


def gauss_jacobi(params: JacobiParams, C: float, Q: int):
    """Gauss quadrature for the weight ``C (1 - t)^alpha (1 + t)^beta``.

    Returns ``(nodes, weights)`` with nodes increasing in (-1, 1). The rule is
    exact for polynomials of degree ``<= 2Q - 1``.
    """
    if Q < 1:
        raise ValueError("Q must be >= 1")
    a, b = params.alpha, params.beta
    x = _gauss_jacobi_nodes(params, Q)
    dp = jacobi_deriv(params, Q, x)
    shape = 1.0 / ((1.0 - x * x) * dp * dp)
    # The usual Gamma-ratio prefactor loses ~1e-12 in log space for large Q;
    # the rule integrates 1 exactly, so fix the constant by the total mass.
    mass = C * 2.0 ** (a + b + 1.0) * np.exp(
        log_gamma(a + 1.0) + log_gamma(b + 1.0) - log_gamma(a + b + 2.0))
    w = shape * (mass / math.fsum(shape))
    return x, w


@dataclass(frozen=True)
class JacobiBasis:
    """Orthonormal Jacobi basis ``p_0..p_{K-1}`` together with a Q-point rule.

    ``vander[q, i] = p_i(nodes[q])``.
    """

    params: JacobiParams
    C: float
    K: int
    Q: int
    norm_h: np.ndarray = field(repr=False)
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    vander: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, m: int, n: int, K: int, Q: int | None = None) -> "JacobiBasis":
        if Q is None:
            Q = 2 * K
        if Q < K:
            raise ValueError(f"need Q >= K, got Q={Q}, K={K}")
        params = JacobiParams.from_dims(m, n)
        C = weight_normalizer(params, m, n)
        nodes, weights = gauss_jacobi(params, C, Q)
        norms = jacobi_norm_h(params, C, np.arange(K))
        vander = (jacobi_table(params, K - 1, nodes) / norms[:, None]).T
        for arr in (norms, nodes, weights, vander):
            arr.setflags(write=False)
        return cls(params, C, K, Q, norms, nodes, weights, vander)

    def eval(self, t, K: int | None = None) -> np.ndarray:
        """Normalized polynomials at ``t``; shape ``(len(t), K)``."""
        K = self.K if K is None else K
        t = np.atleast_1d(np.asarray(t, dtype=float))
        norms = jacobi_norm_h(self.params, self.C, np.arange(K))
        return (jacobi_table(self.params, K - 1, t) / norms[:, None]).T

    @property
    def mass(self) -> float:
        """Total weight, equal to the volume of S^N."""
        return float(np.sum(self.weights))
