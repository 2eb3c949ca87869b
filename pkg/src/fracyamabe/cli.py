"""Command-line front end.

    fracyamabe {spectrum,verify,solve,segregate,sweep} --config run.json --out DIR [--seed N]

Exit codes: 0 success, 1 invalid config, 2 projection failure, 3 collapse,
4 segregation incomplete, 5 resolution error, 6 failed verification.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .checks import run_checks
from .geometry import ProblemParams
from .solver import (CouplingSpec, SolverError, SolverOptions, basis_for, continuation_segregate,
                     coupling_integral, minimize_system, partition_sweep, sweep_grid)
from .spectral import spectrum, synthesize, write_spectrum_csv

__all__ = ["RunConfig", "ConfigError", "main"]

EXIT_CONFIG = 1
EXIT_VERIFY = 6
N_THETA_OUT = 1025


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    m: int
    n: int
    s: float
    ell: int = 2
    K: int = 256
    Q: int = 512
    eta_schedule: tuple = (-1.0, -10.0, -100.0, -1000.0, -10000.0)
    tol: float = 1e-8
    restarts: int = 3
    seed: int = 0
    a_exp_mode: str | float = "symmetric"
    sweep_step: float = 0.02

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown keys: {sorted(unknown)}")
        for key in ("m", "n", "s"):
            if key not in data:
                raise ConfigError(f"missing key: {key}")
        d = dict(data)
        if "eta_schedule" in d:
            if not isinstance(d["eta_schedule"], list):
                raise ConfigError("eta_schedule must be a list")
            d["eta_schedule"] = tuple(d["eta_schedule"])
        try:
            cfg = cls(**d)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def is_int(x):
            return isinstance(x, int) and not isinstance(x, bool)

        def is_num(x):
            return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)

        for key in ("m", "n", "ell", "K", "Q", "restarts", "seed"):
            if not is_int(getattr(self, key)):
                raise ConfigError(f"{key} must be an integer")
        for key in ("s", "tol", "sweep_step"):
            if not is_num(getattr(self, key)):
                raise ConfigError(f"{key} must be a number")
        if self.m < 2 or self.n < 2:
            raise ConfigError("m and n must be >= 2")
        if not 0.0 < self.s < 1.0:
            raise ConfigError("s must lie in (0, 1)")
        if self.ell < 1:
            raise ConfigError("ell must be >= 1")
        if not 1 <= self.K <= self.Q:
            raise ConfigError("need 1 <= K <= Q")
        if self.tol <= 0 or self.restarts < 0 or self.sweep_step <= 0:
            raise ConfigError("tol and sweep_step must be positive, restarts >= 0")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError("seed must be an unsigned 64-bit integer")
        eta = self.eta_schedule
        if not eta or not all(is_num(e) for e in eta):
            raise ConfigError("eta_schedule must be a non-empty list of numbers")
        if any(e >= 0 for e in eta) or any(b >= a for a, b in zip(eta, eta[1:])):
            raise ConfigError("eta_schedule must be negative and strictly decreasing")
        mode = self.a_exp_mode
        two_star = self.params.two_star
        if isinstance(mode, str):
            if mode != "symmetric":
                raise ConfigError("a_exp_mode must be 'symmetric' or a number")
        elif not is_num(mode) or not 1.0 < mode < two_star - 1.0:
            raise ConfigError(f"numeric a_exp_mode must lie in (1, {two_star - 1.0:.6g})")

    @property
    def params(self) -> ProblemParams:
        return ProblemParams(self.m, self.n, float(self.s))

    @property
    def a_exp(self) -> float | None:
        return None if self.a_exp_mode == "symmetric" else float(self.a_exp_mode)

    def options(self) -> SolverOptions:
        return SolverOptions(tol=self.tol, restarts=self.restarts, seed=self.seed)

    def digest(self) -> str:
        d = asdict(self)
        d["eta_schedule"] = [float(e) for e in self.eta_schedule]
        blob = json.dumps(d, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path, seed: int | None = None) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    if seed is not None and isinstance(data, dict):
        data["seed"] = seed
    return RunConfig.from_dict(data)


# ---------------------------------------------------------------- output


def _header(cfg: RunConfig) -> str:
    h = f"config_hash={cfg.digest()} m={cfg.m} n={cfg.n} s={float(cfg.s)!r}"
    if cfg.s <= 0.5:
        h += " regime=outside-regularity"
    return h


def _write_csv(path: Path, cfg: RunConfig, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(f"# {_header(cfg)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for r in rows:
            w.writerow([repr(float(x)) if not isinstance(x, (int, np.integer)) else int(x) for x in r])


def _write_json(path: Path, cfg: RunConfig, payload: dict) -> None:
    out = {"config_hash": cfg.digest(), **payload}
    if cfg.s <= 0.5:
        out["regime"] = "outside-regularity"
    with open(path, "w") as fh:
        json.dump(out, fh, indent=2)
        fh.write("\n")


def _write_solution(path: Path, cfg: RunConfig, state) -> None:
    theta = np.linspace(0.0, math.pi, N_THETA_OUT)
    t = np.cos(theta)
    cols = [synthesize(f, t) for f in state.fields]
    names = ["theta", "t"] + [f"u_{i + 1}" for i in range(len(cols))]
    _write_csv(path, cfg, names, zip(theta, t, *cols))


def _stage_rows(states, etas):
    for k, (st, eta) in enumerate(zip(states, etas)):
        phi = spectrum(st.params, st.basis.K).phi
        min_norm = min(math.sqrt(float(np.sum(phi * f.coeffs ** 2))) for f in st.fields)
        yield (k, float(eta), st.energy, st.residual, coupling_integral(st), min_norm)


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg: RunConfig, out: Path) -> int:
    write_spectrum_csv(out / "spectrum.csv", cfg.params, cfg.K, header=_header(cfg))
    return 0


def cmd_verify(cfg: RunConfig, out: Path, deep: bool = False) -> int:
    report = run_checks(cfg.params, seed=cfg.seed, deep=deep)
    ok = all(r["passed"] for r in report)
    _write_json(out / "verify.json", cfg, {"deep": deep, "passed": ok, "checks": report})
    for r in report:
        print(f"{'PASS' if r['passed'] else 'FAIL'} {r['name']}: "
              f"{r['measured']:.3e} < {r['threshold']:.1e}")
    return 0 if ok else EXIT_VERIFY


def cmd_solve(cfg: RunConfig, out: Path) -> int:
    params = cfg.params
    basis = basis_for(cfg.m, cfg.n, cfg.K, cfg.Q)
    eta = cfg.eta_schedule[0]
    cp = CouplingSpec.uniform(cfg.ell, eta, params.two_star, cfg.a_exp)
    st = minimize_system(params, cp, opts=cfg.options(), basis=basis)
    _write_solution(out / "solution_0.csv", cfg, st)
    _write_csv(out / "stages.csv", cfg,
               ["stage", "eta", "energy", "residual", "coupling", "min_norm"],
               _stage_rows([st], [eta]))
    return 0


def cmd_segregate(cfg: RunConfig, out: Path) -> int:
    params = cfg.params
    basis = basis_for(cfg.m, cfg.n, cfg.K, cfg.Q)
    states, part = continuation_segregate(params, cfg.ell, cfg.eta_schedule, cfg.options(),
                                          basis=basis, a_exp=cfg.a_exp, K_cell=cfg.K)
    for k, st in enumerate(states):
        _write_solution(out / f"solution_{k}.csv", cfg, st)
    _write_csv(out / "stages.csv", cfg,
               ["stage", "eta", "energy", "residual", "coupling", "min_norm"],
               _stage_rows(states, cfg.eta_schedule))
    _write_json(out / "partition.json", cfg, {
        "angles": part.angles.tolist(),
        "cell_energies": part.cell_energies.tolist(),
        "total": part.total,
        "route": "segregation",
    })
    sweep = _read_sweep(out / "sweep.csv", cfg)
    if sweep is not None and cfg.ell == 2:
        a_sweep = float(sweep[np.argmin(sweep[:, 3]), 0])
        _write_json(out / "comparison.json", cfg, {
            "segregation_angle": float(part.angles[0]),
            "sweep_argmin": a_sweep,
            "difference": abs(float(part.angles[0]) - a_sweep),
            "segregation_total": part.total,
            "sweep_min_total": float(np.min(sweep[:, 3])),
        })
    return 0


def _read_sweep(path: Path, cfg: RunConfig):
    if not path.exists():
        return None
    with open(path) as fh:
        first = fh.readline()
        key = f"m={cfg.m} n={cfg.n} s={float(cfg.s)!r}"
        if key not in first:
            return None
        rows = [r for r in csv.reader(fh)][1:]
    return np.array([[float(x) for x in r] for r in rows])


def cmd_sweep(cfg: RunConfig, out: Path) -> int:
    if cfg.ell != 2:
        raise ConfigError("sweep needs ell = 2")
    params = cfg.params
    grid = sweep_grid(params, cfg.K, cfg.sweep_step)
    rows, a_min = partition_sweep(params, grid, cfg.K)
    _write_csv(out / "sweep.csv", cfg, ["a", "c_left", "c_right", "total"], rows)
    k = int(np.argmin(rows[:, 3]))
    _write_json(out / "partition.json", cfg, {
        "angles": [a_min],
        "cell_energies": [float(rows[k, 1]), float(rows[k, 2])],
        "total": float(rows[k, 3]),
        "route": "sweep",
    })
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fracyamabe", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("spectrum", "verify", "solve", "segregate", "sweep"):
        sp = sub.add_parser(name)
        sp.add_argument("--config", required=True, help="JSON run configuration")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "verify":
            sp.add_argument("--deep", action="store_true", help="include the direct bilinear-form check")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.seed)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, out)
        if args.command == "verify":
            return cmd_verify(cfg, out, args.deep)
        return {"solve": cmd_solve, "segregate": cmd_segregate, "sweep": cmd_sweep}[args.command](cfg, out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
