"""Problem constants, stereographic projection and the G-orbit maps.

Points of S^N live in R^{N+1} = R^m x R^n; ``z[:m]`` is the x-block and
``z[m:]`` the y-block.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .special import log_gamma

__all__ = [
    "ProblemParams",
    "PoleError",
    "stereo",
    "stereo_inv",
    "conformal_factor",
    "orbit_t",
    "orbit_angle",
    "orbit_point",
]

POLE_TOL = 1e-10


class PoleError(ValueError):
    """Stereographic projection requested at (or next to) the south pole."""


@dataclass(frozen=True)
class ProblemParams:
    """Dimensions ``m, n``, order ``s`` and every constant derived from them."""

    m: int
    n: int
    s: float

    def __post_init__(self):
        if self.m < 2 or self.n < 2:
            raise ValueError(f"m, n must be >= 2, got m={self.m}, n={self.n}")
        if not 0.0 < self.s < 1.0:
            raise ValueError(f"s must lie in (0, 1), got {self.s}")

    @property
    def N(self) -> int:
        return self.m + self.n - 1

    @property
    def two_star(self) -> float:
        N = self.N
        return 2.0 * N / (N - 2.0 * self.s)

    @property
    def regular(self) -> bool:
        """True when s > 1/2, where G-invariant H^s functions are continuous off the singular orbits."""
        return self.s > 0.5

    @property
    def c_Ns(self) -> float:
        N, s = self.N, self.s
        lg = log_gamma(N / 2 + s) - log_gamma(2 - s)
        return 4.0 ** s * math.pi ** (-N / 2) * math.exp(lg) * s * (1 - s)

    @property
    def A_Ns(self) -> float:
        N, s = self.N, self.s
        return math.exp(log_gamma(N / 2 + s) - log_gamma(N / 2 - s))

    @property
    def kappa_Ns(self) -> float:
        N, s = self.N, self.s
        return math.exp(log_gamma(N / 2 - s) - log_gamma(s)) / (4.0 ** s * math.pi ** (N / 2))

    @property
    def p_Ns(self) -> float:
        N, s = self.N, self.s
        return math.exp(log_gamma(N / 2 + s) - log_gamma(s)) / math.pi ** (N / 2)

    @property
    def sphere_volume(self) -> float:
        """|S^N| = 2 pi^{(N+1)/2} / Gamma((N+1)/2)."""
        N = self.N
        return 2.0 * math.pi ** ((N + 1) / 2) / math.exp(log_gamma((N + 1) / 2))


def stereo(z) -> np.ndarray:
    """Stereographic projection from the south pole, ``z' / (1 + z_{N+1})``."""
    z = np.asarray(z, dtype=float)
    denom = 1.0 + z[..., -1]
    if np.any(denom < POLE_TOL):
        raise PoleError("point within 1e-10 of the south pole")
    return z[..., :-1] / denom[..., None]


def stereo_inv(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1, keepdims=True)
    return np.concatenate([2.0 * x / (1.0 + r2), (1.0 - r2) / (1.0 + r2)], axis=-1)


def conformal_factor(params: ProblemParams, x) -> np.ndarray:
    """``psi_s(x) = (2 / (1 + |x|^2))^{(N - 2s)/2}``."""
    x = np.asarray(x, dtype=float)
    r2 = np.sum(x * x, axis=-1)
    return (2.0 / (1.0 + r2)) ** ((params.N - 2.0 * params.s) / 2.0)


def orbit_t(z, m: int) -> np.ndarray:
    """``|z_x|^2 - |z_y|^2`` for points split after the first ``m`` coordinates."""
    z = np.asarray(z, dtype=float)
    return np.sum(z[..., :m] ** 2, axis=-1) - np.sum(z[..., m:] ** 2, axis=-1)


def orbit_angle(z, m: int) -> np.ndarray:
    return np.arccos(np.clip(orbit_t(z, m), -1.0, 1.0))


def orbit_point(theta: float, m: int, n: int) -> np.ndarray:
    """Representative ``(cos(theta/2) e_1, sin(theta/2) e_1)`` of the orbit at angle ``theta``."""
    z = np.zeros(m + n)
    z[0] = math.cos(theta / 2)
    z[m] = math.sin(theta / 2)
    return z
