"""Energies, Nehari projection and least-energy solvers for the reduced system.

A state is ``ell`` profiles in a common Jacobi basis. The system energy is

    J(u) = 1/2 sum_i ||u_i||^2 - 1/p sum_i int |u_i|^p
           - 1/2 sum_{i != j} eta_ij int |u_j|^{a_ij} |u_i|^{b_ij}

with ``p = 2*_s`` and every integral taken by Gauss-Jacobi quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import linalg, optimize

from .geometry import ProblemParams
from .special import JacobiBasis
from .spectral import SpectralField, SpectrumTable, analyze, spectrum, synthesize

__all__ = [
    "SolverError",
    "ProjectionError",
    "CollapseError",
    "SegregationError",
    "ResolutionError",
    "SupportError",
    "CouplingSpec",
    "SystemState",
    "Partition",
    "SolverOptions",
    "basis_for",
    "bump_fields",
    "energy_J",
    "energy_system",
    "grad_system",
    "nehari_residuals",
    "nehari_project",
    "minimize_system",
    "solve_dirichlet_interval",
    "continuation_segregate",
    "extract_partition",
    "partition_sweep",
    "sweep_grid",
    "coupling_integral",
    "sign_change_obstruction",
]


class SolverError(RuntimeError):
    exit_code = 1


class ProjectionError(SolverError):
    """The Nehari scaling does not exist (or Newton failed to find it)."""

    exit_code = 2


class CollapseError(SolverError):
    exit_code = 3

    def __init__(self, message: str, component: int):
        super().__init__(message)
        self.component = component


class SegregationError(SolverError):
    exit_code = 4

    def __init__(self, message: str, crossings=()):
        super().__init__(message)
        self.crossings = list(crossings)


class ResolutionError(SolverError):
    exit_code = 5


class SupportError(ValueError):
    """A masked field does not vanish outside its mask."""


# ---------------------------------------------------------------- data types


@dataclass(frozen=True)
class CouplingSpec:
    """Coupling matrix ``eta`` and exponent matrices ``a``, ``b`` of the system."""

    ell: int
    eta: np.ndarray
    a_exp: np.ndarray
    b_exp: np.ndarray

    def __post_init__(self):
        ell = self.ell
        if ell < 1:
            raise ValueError("ell must be >= 1")
        for name in ("eta", "a_exp", "b_exp"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.shape != (ell, ell):
                raise ValueError(f"{name} must be {ell}x{ell}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        eta, a, b = self.eta, self.a_exp, self.b_exp
        off = ~np.eye(ell, dtype=bool)
        if np.any(np.diag(eta) != 0.0):
            raise ValueError("eta must have zero diagonal")
        if not np.array_equal(eta, eta.T):
            raise ValueError("eta must be symmetric")
        if np.any(eta[off] >= 0.0):
            raise ValueError("off-diagonal couplings must be negative")
        if np.any(a[off] <= 1.0) or np.any(b[off] <= 1.0):
            raise ValueError("exponents must exceed 1")
        if not np.allclose(a[off], b.T[off], rtol=0, atol=1e-12):
            raise ValueError("need a_ij = b_ji")
        sums = (a + b)[off]
        if sums.size and np.ptp(sums) > 1e-12:
            raise ValueError("a_ij + b_ij must be the same for all pairs")

    @classmethod
    def uniform(cls, ell: int, eta: float, two_star: float, a_exp: float | None = None
                ) -> "CouplingSpec":
        """All pairs coupled by ``eta``; ``a_ij = a_exp`` for ``i < j`` (default ``2*/2``)."""
        a_val = two_star / 2.0 if a_exp is None else float(a_exp)
        if not 1.0 < a_val < two_star - 1.0:
            raise ValueError(f"a_exp must lie in (1, {two_star - 1.0}), got {a_val}")
        E = np.full((ell, ell), float(eta))
        np.fill_diagonal(E, 0.0)
        upper = np.triu(np.ones((ell, ell), dtype=bool), k=1)
        A = np.where(upper, a_val, two_star - a_val)
        np.fill_diagonal(A, two_star / 2.0)
        return cls(ell, E, A, A.T.copy())

    def check_exponents(self, two_star: float) -> None:
        off = ~np.eye(self.ell, dtype=bool)
        if np.any(np.abs((self.a_exp + self.b_exp)[off] - two_star) > 1e-12):
            raise ValueError("need a_ij + b_ij = 2*_s")


@dataclass
class SystemState:
    params: ProblemParams
    fields: list
    coupling: CouplingSpec
    energy: float = math.nan
    residual: float = math.nan

    def __post_init__(self):
        if len(self.fields) != self.coupling.ell:
            raise ValueError("number of fields does not match the coupling")
        b0 = self.fields[0].basis
        for f in self.fields[1:]:
            if f.basis is not b0:
                raise ValueError("all fields must share one basis")

    @property
    def basis(self) -> JacobiBasis:
        return self.fields[0].basis

    @property
    def coeffs(self) -> np.ndarray:
        return np.array([f.coeffs for f in self.fields])

    def with_coeffs(self, C) -> "SystemState":
        return SystemState(self.params, [SpectralField(self.basis, c) for c in C],
                           self.coupling)


@dataclass(frozen=True)
class Partition:
    angles: np.ndarray
    cell_energies: np.ndarray
    total: float

    def __post_init__(self):
        angles = np.asarray(self.angles, dtype=float)
        if np.any(np.diff(angles) <= 0) or np.any(angles <= 0) or np.any(angles >= math.pi):
            raise ValueError("angles must be increasing and inside (0, pi)")
        if len(self.cell_energies) != len(angles) + 1:
            raise ValueError("need one cell energy per cell")
        object.__setattr__(self, "angles", angles)
        object.__setattr__(self, "cell_energies", np.asarray(self.cell_energies, dtype=float))


@dataclass
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 20000
    restarts: int = 3
    d0_floor: float = 1e-6
    merge_tol: float = 0.01
    n_theta: int = 4096
    seed: int = 0
    noise: float = 0.05


# ---------------------------------------------------------------- helpers


@lru_cache(maxsize=16)
def basis_for(m: int, n: int, K: int, Q: int | None = None) -> JacobiBasis:
    return JacobiBasis.build(m, n, K, Q)


@lru_cache(maxsize=16)
def _table(params: ProblemParams, K: int) -> SpectrumTable:
    return spectrum(params, K)


def bump_fields(basis: JacobiBasis, ell: int, rng=None, noise: float = 0.0) -> list:
    """Bumps ``exp(-((theta - theta_i)/sigma)^2)``, ``theta_i = (i - 1/2) pi / ell``.

    With ``rng`` given, centres and widths are jittered by ``noise`` (relative).
    """
    theta = np.arccos(basis.nodes)
    sigma = math.pi / (4.0 * ell)
    out = []
    for i in range(ell):
        c = (i + 0.5) * math.pi / ell
        sg = sigma
        if rng is not None and noise > 0:
            c += noise * sigma * rng.standard_normal()
            sg *= 1.0 + noise * rng.standard_normal()
        out.append(analyze(basis, np.exp(-(((theta - c) / sg) ** 2))))
    return out


def _pairs(coupling: CouplingSpec):
    ell = coupling.ell
    return [(i, j) for i in range(ell) for j in range(ell) if i != j]


def _integrals(U: np.ndarray, w: np.ndarray, p: float, coupling: CouplingSpec):
    """``A_i = int |u_i|^p`` and ``B_ij = int |u_j|^{a_ij} |u_i|^{b_ij}``."""
    absU = np.abs(U)
    A = (absU ** p) @ w
    ell = coupling.ell
    B = np.zeros((ell, ell))
    for i, j in _pairs(coupling):
        B[i, j] = w @ (absU[j] ** coupling.a_exp[i, j] * absU[i] ** coupling.b_exp[i, j])
    return A, B


def _energy(params, phi, C, U, w, coupling) -> float:
    p = params.two_star
    A, B = _integrals(U, w, p, coupling)
    quad = 0.5 * np.sum(phi * C * C)
    return float(quad - np.sum(A) / p - 0.5 * np.sum(coupling.eta * B))


def _gradient(params, phi, basis, C, U, coupling) -> np.ndarray:
    p = params.two_star
    w = basis.weights
    absU = np.abs(U)
    NL = absU ** (p - 2.0) * U
    for i, j in _pairs(coupling):
        b = coupling.b_exp[i, j]
        NL[i] += coupling.eta[i, j] * b * absU[j] ** coupling.a_exp[i, j] * absU[i] ** (b - 2.0) * U[i]
    return phi * C - (NL * w) @ basis.vander


def _nodal(basis: JacobiBasis, C: np.ndarray) -> np.ndarray:
    return C @ basis.vander.T


# ---------------------------------------------------------------- energies


def energy_J(field: SpectralField, params: ProblemParams, mask=None,
             zero_tol: float = 1e-10) -> float:
    """Single-equation energy ``1/2 ||u||^2 - 1/p int |u|^p``.

    ``mask`` is an interval ``(t_lo, t_hi)``; the field must vanish (up to
    ``zero_tol`` relative to its maximum) at every node outside it.
    """
    basis = field.basis
    vals = field.values
    if mask is not None:
        lo, hi = mask
        outside = (basis.nodes <= lo) | (basis.nodes >= hi)
        scale = max(np.max(np.abs(vals)), 1.0)
        if np.any(np.abs(vals[outside]) > zero_tol * scale):
            raise SupportError("field does not vanish outside the mask")
    phi = _table(params, basis.K).phi
    p = params.two_star
    return float(0.5 * np.sum(phi * field.coeffs ** 2) - np.sum(basis.weights * np.abs(vals) ** p) / p)


def energy_system(state: SystemState) -> float:
    basis = state.basis
    C = state.coeffs
    phi = _table(state.params, basis.K).phi
    return _energy(state.params, phi, C, _nodal(basis, C), basis.weights, state.coupling)


def grad_system(state: SystemState) -> np.ndarray:
    """Gradient of the system energy with respect to the coefficients, shape ``(ell, K)``."""
    basis = state.basis
    C = state.coeffs
    phi = _table(state.params, basis.K).phi
    return _gradient(state.params, phi, basis, C, _nodal(basis, C), state.coupling)


# ---------------------------------------------------------------- Nehari


def _nehari_rhs(x, n, A, B, coupling, p):
    t = np.exp(x)
    eta, a, b = coupling.eta, coupling.a_exp, coupling.b_exp
    with np.errstate(over="ignore", invalid="ignore"):
        T = eta * b * t[None, :] ** a * t[:, None] ** (b - 2.0) * B
    np.fill_diagonal(T, 0.0)
    Ap = t ** (p - 2.0) * A
    R = n - Ap - T.sum(axis=1)
    return R, T, Ap


def _nehari_scalings(n, A, B, coupling: CouplingSpec, p: float, tol: float = 1e-13,
                     max_iter: int = 200) -> np.ndarray:
    """Solve ``n_i = t_i^{p-2} A_i + sum_j eta_ij b_ij t_j^a t_i^{b-2} B_ij`` by damped Newton on log t."""
    if np.any(n <= 0) or np.any(A <= 0):
        raise ProjectionError("a component vanishes")
    x = np.log(n / A) / (p - 2.0)
    if coupling.ell == 1 or not np.any(B):
        return np.exp(x)
    a, b = coupling.a_exp, coupling.b_exp
    R, T, Ap = _nehari_rhs(x, n, A, B, coupling, p)
    err = np.max(np.abs(R / n))
    for _ in range(max_iter):
        if err <= tol:
            return np.exp(x)
        Jm = -a * T
        np.fill_diagonal(Jm, -(p - 2.0) * Ap - np.sum((b - 2.0) * T, axis=1))
        try:
            dx = np.linalg.solve(Jm, -R)
        except np.linalg.LinAlgError:
            raise ProjectionError("singular Newton matrix") from None
        big = np.max(np.abs(dx))
        if big > 2.0:
            dx *= 2.0 / big
        lam = 1.0
        for _ in range(50):
            xn = x + lam * dx
            Rn, Tn, Apn = _nehari_rhs(xn, n, A, B, coupling, p)
            en = np.max(np.abs(Rn / n))
            if np.isfinite(en) and en < (1.0 - 1e-4 * lam) * err:
                break
            lam *= 0.5
        else:
            raise ProjectionError("Newton line search failed")
        x, R, T, Ap, err = xn, Rn, Tn, Apn, en
        if np.max(x) > 60.0:
            raise ProjectionError("Nehari scaling diverges")
    if err <= 1e3 * tol:
        return np.exp(x)
    raise ProjectionError(f"Newton did not converge (residual {err:.3e})")


def nehari_residuals(state: SystemState) -> np.ndarray:
    """``d_i J(u) u_i / ||u_i||^2`` for each component."""
    C = state.coeffs
    g = grad_system(state)
    phi = _table(state.params, state.basis.K).phi
    return np.sum(g * C, axis=1) / np.sum(phi * C * C, axis=1)


def nehari_project(state: SystemState, zero_tol: float = 1e-14):
    """Scalings ``t`` putting ``t u`` on the Nehari set, and the projected state.

    Raises :class:`ProjectionError` when no positive scaling exists.
    """
    basis = state.basis
    C = state.coeffs
    phi = _table(state.params, basis.K).phi
    n = np.sum(phi * C * C, axis=1)
    if np.any(n <= zero_tol):
        raise ProjectionError("a component is zero")
    A, B = _integrals(_nodal(basis, C), basis.weights, state.params.two_star, state.coupling)
    t = _nehari_scalings(n, A, B, state.coupling, state.params.two_star)
    out = state.with_coeffs(t[:, None] * C)
    out.energy = state.params.s / state.params.N * float(np.sum(t * t * n))
    return t, out


# ---------------------------------------------------------------- minimization


class _Psi:
    """``Psi(y) = J(t(y) y)`` in scaled coordinates ``y_i = Phi^{1/2} c_i``."""

    def __init__(self, params, basis, coupling):
        self.params = params
        self.basis = basis
        self.coupling = coupling
        self.phi = _table(params, basis.K).phi
        self.rphi = np.sqrt(self.phi)
        self.p = params.two_star

    def evaluate(self, Y):
        C = Y / self.rphi
        U = _nodal(self.basis, C)
        n = np.sum(Y * Y, axis=1)
        A, B = _integrals(U, self.basis.weights, self.p, self.coupling)
        t = _nehari_scalings(n, A, B, self.coupling, self.p)
        Ct = t[:, None] * C
        g = _gradient(self.params, self.phi, self.basis, Ct, t[:, None] * U, self.coupling)
        G = t[:, None] * g / self.rphi
        G -= np.sum(G * Y, axis=1, keepdims=True) / n[:, None] * Y
        psi = self.params.s / self.params.N * float(np.sum(t * t * n))
        res = math.sqrt(float(np.sum((g / self.rphi) ** 2)) / float(np.sum(t * t * n)))
        return psi, G, t, res


def _descend(psi: _Psi, Y, opts: SolverOptions, memory: int = 10):
    """Projected gradient descent with Barzilai-Borwein steps.

    Steps are accepted by a nonmonotone Armijo test against the largest of the
    last ``memory`` values, which lets the iteration continue once energy
    differences reach rounding level.
    """
    Y = Y / np.linalg.norm(Y, axis=1, keepdims=True)
    val, G, t, res = psi.evaluate(Y)
    history = [val]
    tau = 1.0
    Y_old = G_old = None
    it = 0
    for it in range(opts.max_iter):
        if res < opts.tol:
            break
        if np.min(t) < opts.d0_floor:
            i = int(np.argmin(t))
            raise CollapseError(f"component {i + 1} collapsed (norm {t[i]:.3e})", i)
        if G_old is not None:
            dY, dG = Y - Y_old, G - G_old
            sy = float(np.sum(dY * dG))
            tau = float(np.sum(dY * dY)) / sy if sy > 0 else 10.0 * tau
            tau = min(max(tau, 1e-10), 1e6)
        g2 = float(np.sum(G * G))
        ref = max(history[-memory:])
        for _ in range(60):
            Yn = Y - tau * G
            Yn /= np.linalg.norm(Yn, axis=1, keepdims=True)
            try:
                vn, Gn, tn, rn = psi.evaluate(Yn)
            except ProjectionError:
                tau *= 0.5
                continue
            if vn <= ref - 1e-4 * tau * g2:
                break
            tau *= 0.5
        else:
            break
        Y_old, G_old = Y, G
        Y, val, G, t, res = Yn, vn, Gn, tn, rn
        history.append(val)
    return Y, val, t, res, it


def _finish(psi: _Psi, params, coupling, Y, t, val, res) -> SystemState:
    C = t[:, None] * Y / psi.rphi
    signs = np.sign(C @ (psi.basis.vander.T @ psi.basis.weights))
    signs[signs == 0] = 1.0
    C = signs[:, None] * C
    st = SystemState(params, [SpectralField(psi.basis, c) for c in C], coupling)
    st.energy = val
    st.residual = res
    return st


def _dominant_part(fields) -> np.ndarray:
    """Each profile zeroed wherever another one is larger in modulus, re-analyzed."""
    basis = fields[0].basis
    U = np.array([f.values for f in fields])
    dom = np.argmax(np.abs(U), axis=0)
    out = []
    for i, u in enumerate(U):
        out.append(analyze(basis, np.where(dom == i, u, 0.0)).coeffs)
    return np.array(out)


def minimize_system(params: ProblemParams, coupling: CouplingSpec, init=None,
                    opts: SolverOptions | None = None, basis: JacobiBasis | None = None
                    ) -> SystemState:
    """Least-energy state of the system by descent on ``Psi``.

    ``init`` is a list of SpectralFields (default: bumps on ``basis``). If
    ``init`` cannot be projected, its dominant parts are tried, then the
    default bumps, then up to ``opts.restarts`` jittered bumps drawn from a
    generator seeded with ``opts.seed``.
    """
    opts = opts or SolverOptions()
    coupling.check_exponents(params.two_star)
    if init is None and basis is None:
        raise ValueError("need init or basis")
    basis = init[0].basis if init is not None else basis
    psi = _Psi(params, basis, coupling)
    rng = np.random.default_rng(opts.seed)

    def candidates():
        if init is not None:
            yield np.array([f.coeffs for f in init])
            if coupling.ell > 1:
                yield _dominant_part(init)
        yield np.array([f.coeffs for f in bump_fields(basis, coupling.ell)])
        for k in range(1, opts.restarts + 1):
            fresh = bump_fields(basis, coupling.ell, rng=rng, noise=opts.noise * k)
            yield np.array([f.coeffs for f in fresh])

    last = None
    for C0 in candidates():
        try:
            Y, val, t, res, _ = _descend(psi, C0 * psi.rphi, opts)
        except ProjectionError as exc:
            last = exc
            continue
        return _finish(psi, params, coupling, Y, t, val, res)
    raise ProjectionError(f"projection failed after {opts.restarts} restarts: {last}")


# ---------------------------------------------------------------- Dirichlet cells


@lru_cache(maxsize=8)
def _square_operator(params: ProblemParams, K: int):
    basis = basis_for(params.m, params.n, K, K)
    phi = _table(params, K).phi
    WV = basis.weights[:, None] * basis.vander
    H = (WV * phi) @ WV.T
    return basis, H


def solve_dirichlet_interval(params: ProblemParams, theta_interval, K: int = 256,
                             tol: float = 1e-10):
    """Least-energy positive solution vanishing outside the angular cell ``(a, b)``.

    The unknowns are the values at the ``K`` Gauss-Jacobi nodes inside the
    cell; the norm is that of the degree ``K - 1`` interpolant of the masked
    values. Returns ``(field, c_U)`` with ``c_U = s/N int |u|^p``.
    """
    a, b = map(float, theta_interval)
    if not 0.0 <= a < b <= math.pi:
        raise ValueError(f"need 0 <= a < b <= pi, got ({a}, {b})")
    basis, H = _square_operator(params, K)
    lo, hi = math.cos(b), math.cos(a)
    inside = np.flatnonzero((basis.nodes > lo) & (basis.nodes < hi))
    if inside.size < 8:
        raise ResolutionError(f"cell ({a:.4f}, {b:.4f}) holds {inside.size} nodes, need 8")
    p = params.two_star
    w = basis.weights[inside]
    L = linalg.cholesky(H[np.ix_(inside, inside)], lower=True)
    x = basis.nodes[inside]
    v0 = ((x - lo) * (hi - x)) ** params.s
    y0 = L.T @ v0

    def fun(y):
        v = linalg.solve_triangular(L, y, lower=True, trans="T")
        S = float(w @ np.abs(v) ** p)
        yy = float(y @ y)
        dv = p * w * np.abs(v) ** (p - 2.0) * v / S
        grad = 2.0 * y / yy - (2.0 / p) * linalg.solve_triangular(L, dv, lower=True)
        return math.log(yy) - (2.0 / p) * math.log(S), grad

    y0 /= np.linalg.norm(y0)
    res = optimize.minimize(fun, y0, jac=True, method="L-BFGS-B",
                            options={"maxiter": 20000, "maxcor": 20, "ftol": 1e-15, "gtol": tol})
    v = linalg.solve_triangular(L, res.x, lower=True, trans="T")
    if np.sum(w * v) < 0:
        v = -v
    u = np.zeros(basis.Q)
    u[inside] = v
    norm2 = float(u @ H @ u)
    S = float(basis.weights @ np.abs(u) ** p)
    u *= (norm2 / S) ** (1.0 / (p - 2.0))
    field = analyze(basis, u)
    c_U = params.s / params.N * float(basis.weights @ np.abs(u) ** p)
    return field, c_U


# ---------------------------------------------------------------- segregation


def _crossings(theta, prof, merge_tol):
    """Interfaces where the dominant component changes, merged within ``merge_tol``."""
    dom = np.argmax(prof, axis=0)
    idx = np.flatnonzero(dom[1:] != dom[:-1])
    raw = []
    for k in idx:
        i, j = dom[k], dom[k + 1]
        d0 = prof[i, k] - prof[j, k]
        d1 = prof[i, k + 1] - prof[j, k + 1]
        frac = d0 / (d0 - d1) if d0 != d1 else 0.5
        raw.append((theta[k] + frac * (theta[k + 1] - theta[k]), int(dom[k]), int(dom[k + 1])))
    clusters = []
    for c in raw:
        if clusters and c[0] - clusters[-1][-1][0] < merge_tol:
            clusters[-1].append(c)
        else:
            clusters.append([c])
    out = []
    for cl in clusters:
        left, right = cl[0][1], cl[-1][2]
        if left == right:
            continue
        mid = 0.5 * (cl[0][0] + cl[-1][0])
        best = min((c for c in cl if c[1] == left or c[2] == right), key=lambda c: abs(c[0] - mid))
        out.append((best[0], left, right))
    return out


def extract_partition(state: SystemState, opts: SolverOptions | None = None, K_cell: int = 256,
                      cell_energies: bool = True) -> Partition:
    """Interfaces of a (near-)segregated state, plus Dirichlet energies of the cells."""
    opts = opts or SolverOptions()
    ell = state.coupling.ell
    theta = np.linspace(0.0, math.pi, opts.n_theta)
    prof = np.abs(np.array([synthesize(f, np.cos(theta)) for f in state.fields]))
    cross = _crossings(theta, prof, opts.merge_tol)
    order = [cross[0][1]] + [c[2] for c in cross] if cross else []
    if len(cross) != ell - 1 or sorted(order) != list(range(ell)):
        raise SegregationError(f"found {len(cross)} interfaces, expected {ell - 1}",
                               [c[0] for c in cross])
    angles = np.array([c[0] for c in cross])
    edges = np.concatenate([[0.0], angles, [math.pi]])
    if cell_energies:
        cells = np.array([solve_dirichlet_interval(state.params, (edges[k], edges[k + 1]), K_cell)[1]
                          for k in range(ell)])
    else:
        cells = np.full(ell, math.nan)
    return Partition(angles, cells, float(np.sum(cells)))


def coupling_integral(state: SystemState) -> float:
    """``sum_{i<j} int |u_j|^{a_ij} |u_i|^{b_ij}`` of a state."""
    basis = state.basis
    _, B = _integrals(_nodal(basis, state.coeffs), basis.weights, state.params.two_star,
                      state.coupling)
    return float(np.sum(np.triu(B, k=1)))


def continuation_segregate(params: ProblemParams, ell: int, eta_schedule, opts=None,
                           basis: JacobiBasis | None = None, a_exp: float | None = None,
                           K_cell: int = 256):
    """Least-energy states along a decreasing coupling schedule, warm-started.

    Returns ``(states, partition)``; the partition is read off the last state.
    """
    opts = opts or SolverOptions()
    etas = [float(e) for e in eta_schedule]
    if not etas or any(e >= 0 for e in etas) or any(e2 >= e1 for e1, e2 in zip(etas, etas[1:])):
        raise ValueError("eta schedule must be negative and strictly decreasing")
    if basis is None:
        basis = basis_for(params.m, params.n, 256)
    init = None
    states = []
    for eta in etas:
        cp = CouplingSpec.uniform(ell, eta, params.two_star, a_exp)
        st = minimize_system(params, cp, init=init, opts=opts, basis=basis)
        states.append(st)
        init = st.fields
    return states, extract_partition(states[-1], opts, K_cell=K_cell)


def sweep_grid(params: ProblemParams, K: int = 256, step: float = 0.02) -> np.ndarray:
    """Interfaces ``pi/2 + k step`` whose two cells both hold at least 8 nodes.

    The grid is symmetric about ``pi/2``, so ``total(a)`` and ``total(pi - a)``
    are both sampled.
    """
    basis, _ = _square_operator(params, K)
    theta = np.sort(np.arccos(basis.nodes))
    lo, hi = theta[7], theta[-8]
    k_max = int(math.floor((math.pi / 2) / step))
    grid = math.pi / 2 + step * np.arange(-k_max, k_max + 1)
    # a cell (0, a) needs theta[7] < a; (a, pi) needs a < theta[-8]
    return grid[(grid > max(lo, math.pi - hi)) & (grid < min(hi, math.pi - lo))]


def partition_sweep(params: ProblemParams, grid, K: int = 256, ell: int = 2):
    """``c_(0,a) + c_(a,pi)`` over a grid of interfaces ``a``.

    Returns ``(rows, argmin)`` with rows ``(a, c_left, c_right, total)``.
    """
    if ell != 2:
        raise ValueError("the sweep supports ell = 2 only")
    rows = []
    for a in np.asarray(grid, dtype=float):
        _, cl = solve_dirichlet_interval(params, (0.0, a), K)
        _, cr = solve_dirichlet_interval(params, (a, math.pi), K)
        rows.append((float(a), cl, cr, cl + cr))
    rows = np.array(rows)
    return rows, float(rows[int(np.argmin(rows[:, 3])), 0])


def sign_change_obstruction(state: SystemState) -> float:
    """``<v^-, v^+>_{H^s}`` for ``v = u_1 - u_2``, with ``v^- = min(v, 0)``.

    Computed as ``(||v||^2 - ||v^+||^2 - ||v^-||^2) / 2`` after projecting the
    positive and negative parts onto the basis.
    """
    if state.coupling.ell != 2:
        raise ValueError("needs a two-component state")
    basis = state.basis
    phi = _table(state.params, basis.K).phi
    v = state.fields[0] - state.fields[1]
    vp = analyze(basis, np.maximum(v.values, 0.0))
    vm = analyze(basis, np.minimum(v.values, 0.0))
    nv = np.sum(phi * v.coeffs ** 2)
    return float(0.5 * (nv - np.sum(phi * vp.coeffs ** 2) - np.sum(phi * vm.coeffs ** 2)))
