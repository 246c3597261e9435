"""Command-line front end: config files, CSV trajectories, check reports.

Config files are flat ``key = value`` lines; ``#`` starts a comment and
vectors are comma-separated triples::

    space = lie1
    force = 4, 6, 0
    kappa = 2
    tolerance.residual = 1e-4

Exit codes: 0 all checks passed, 2 some check failed, 1 usage, config or
I/O error.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import acceptance
from .dynamics import IntegrationBlowup, TimeGrid, Trajectory, integrate_newton, simulate_flow
from .equivalence import compare_trajectories, kappa_limit_sweep, newton_force, newton_residual
from .noninertial import T1Params, transform_t1, transform_t2, transform_t3
from .poisson import CheckReport, ConfigurationError, JacobiSampleConfig, verify_jacobi
from .spaces import DeformationSpec, ForceMass, Kind, SecondOrderState, make_structure

CSV_HEADER = ("t", "x1", "x2", "x3", "v1", "v2", "v3")

DEFAULT_TOLERANCES = {
    "oracle": 1e-6,
    "residual": 1e-4,
    "jacobi": 1e-7,
    "energy": 1e-7,
    "limit_slope": -0.9,
}

_SCALE_KEY = {Kind.LIE1: "kappa", Kind.LIE2: "kappa_hat", Kind.QUADRATIC: "kappa_bar"}
_SPACE_KEYS = {
    Kind.COMMUTATIVE: set(),
    Kind.CANONICAL: {"theta12", "theta13", "theta23"},
    Kind.LIE1: {"kappa", "rho", "tau"},
    Kind.LIE2: {"kappa_hat", "k", "l", "gamma"},
    Kind.QUADRATIC: {"kappa_bar", "k", "l", "gamma"},
}
_ALL_SPACE_KEYS = set().union(*_SPACE_KEYS.values())
_VECTOR_KEYS = {"force", "x0", "v0"}
_INT_KEYS = {"rho", "tau", "k", "l", "gamma", "seed"}
_FLOAT_KEYS = {"mass", "theta12", "theta13", "theta23", "kappa", "kappa_hat", "kappa_bar",
               "t0", "t_end", "dt"}
_INTEGRATORS = ("rk4", "rk45")


class ConfigError(ConfigurationError):
    pass


@dataclasses.dataclass(frozen=True)
class SimulationConfig:
    space: Kind
    force: tuple[float, float, float]
    mass: float = 1.0
    theta12: float | None = None
    theta13: float | None = None
    theta23: float | None = None
    kappa: float | None = None
    kappa_hat: float | None = None
    kappa_bar: float | None = None
    rho: int | None = None
    tau: int | None = None
    k: int | None = None
    l: int | None = None
    gamma: int | None = None
    x0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    v0: tuple[float, float, float] = (0.0, 0.0, 0.0)
    t0: float = 0.0
    t_end: float = 1.0
    dt: float = 1e-3
    integrator: str = "rk4"
    tolerances: tuple[tuple[str, float], ...] = tuple(sorted(DEFAULT_TOLERANCES.items()))
    seed: int = 42

    def tolerance(self, name: str) -> float:
        return dict(self.tolerances)[name]

    def spec(self) -> DeformationSpec:
        if self.space is Kind.COMMUTATIVE:
            return DeformationSpec.commutative()
        if self.space is Kind.CANONICAL:
            return DeformationSpec.canonical(self.theta12, self.theta13, self.theta23)
        if self.space is Kind.LIE1:
            return DeformationSpec.lie1(self.kappa, self.rho, self.tau)
        if self.space is Kind.LIE2:
            return DeformationSpec.lie2(self.kappa_hat, self.k, self.l, self.gamma)
        return DeformationSpec.quadratic(self.kappa_bar, self.k, self.l, self.gamma)

    def force_mass(self) -> ForceMass:
        return ForceMass(self.force, self.mass)

    def initial_state(self) -> SecondOrderState:
        return SecondOrderState(self.x0, self.v0)

    def grid(self) -> TimeGrid:
        return TimeGrid(self.t0, self.t_end, self.dt)


def _parse_value(key, raw, lineno):
    try:
        if key in _VECTOR_KEYS:
            parts = [p.strip() for p in raw.split(",")]
            if len(parts) != 3:
                raise ValueError(f"expected three comma-separated numbers, got {len(parts)}")
            return tuple(float(p) for p in parts)
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS or key.startswith("tolerance."):
            return float(raw)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: invalid value for {key}: {exc}") from None
    if key == "space":
        try:
            return Kind(raw.lower())
        except ValueError:
            raise ConfigError(f"line {lineno}: unknown space {raw!r}; "
                              f"expected one of {', '.join(k.value for k in Kind)}") from None
    if key == "integrator":
        if raw not in _INTEGRATORS:
            raise ConfigError(f"line {lineno}: unknown integrator {raw!r}")
        return raw
    raise ConfigError(f"line {lineno}: unknown key {key!r}")


def parse_config(text: str) -> SimulationConfig:
    """Parse and validate a ``key = value`` config."""
    values = {}
    tolerances = dict(DEFAULT_TOLERANCES)
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: syntax error, expected 'key = value'")
        key, raw = (s.strip() for s in line.split("=", 1))
        if not key or not raw:
            raise ConfigError(f"line {lineno}: syntax error, expected 'key = value'")
        if key.startswith("tolerance."):
            name = key.split(".", 1)[1]
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"line {lineno}: unknown key {key!r}")
            tolerances[name] = _parse_value(key, raw, lineno)
            continue
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, lineno)

    for required in ("space", "force"):
        if required not in values:
            raise ConfigError(f"missing required key {required!r}")
    space = values["space"]
    stray = (set(values) & _ALL_SPACE_KEYS) - _SPACE_KEYS[space]
    if stray:
        raise ConfigError(f"key {sorted(stray)[0]!r} does not apply to space={space.value}")
    if space in _SCALE_KEY and _SCALE_KEY[space] not in values:
        raise ConfigError(f"missing required key {_SCALE_KEY[space]!r} for space={space.value}")
    if space is Kind.CANONICAL:
        if not _SPACE_KEYS[space] & set(values):
            raise ConfigError("space=canonical needs at least one of theta12, theta13, theta23")
        for name in ("theta12", "theta13", "theta23"):
            values.setdefault(name, 0.0)
    elif space is Kind.LIE1:
        values.setdefault("rho", 1)
        values.setdefault("tau", 2)
    elif space in (Kind.LIE2, Kind.QUADRATIC):
        values.setdefault("k", 1)
        values.setdefault("l", 2)
        values.setdefault("gamma", 3)

    values["tolerances"] = tuple(sorted(tolerances.items()))
    cfg = SimulationConfig(**values)
    try:
        cfg.spec()
        cfg.force_mass()
        cfg.initial_state()
        cfg.grid()
        for name, tol in cfg.tolerances:
            if name != "limit_slope" and not tol > 0:
                raise ConfigurationError(f"tolerance.{name} must be positive")
    except ConfigurationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from None
    return cfg


def format_config(cfg: SimulationConfig) -> str:
    """Serialise ``cfg`` so that :func:`parse_config` returns an equal config."""
    lines = []
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if value is None:
            continue
        if f.name == "tolerances":
            lines.extend(f"tolerance.{name} = {tol!r}" for name, tol in value)
        elif f.name == "space":
            lines.append(f"space = {value.value}")
        elif isinstance(value, tuple):
            lines.append(f"{f.name} = " + ", ".join(repr(float(v)) for v in value))
        else:
            lines.append(f"{f.name} = {value!r}" if not isinstance(value, str) else f"{f.name} = {value}")
    return "\n".join(lines) + "\n"


def load_config(path) -> SimulationConfig:
    return parse_config(Path(path).read_text(encoding="utf-8"))


# --- files ------------------------------------------------------------------


def write_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per node, floats in shortest round-trip form."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for t, x, v in zip(traj.t, traj.x, traj.v):
            w.writerow([repr(float(t))] + [repr(float(c)) for c in x] + [repr(float(c)) for c in v])


def read_trajectory_csv(path, grid: TimeGrid | None = None) -> Trajectory:
    """Read a trajectory written by :func:`write_trajectory_csv`.

    Without ``grid`` the grid is inferred from the time column.
    """
    with Path(path).open(encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != CSV_HEADER:
        raise ValueError(f"{path}: expected header {','.join(CSV_HEADER)}")
    data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
    if grid is None:
        t = data[:, 0]
        grid = TimeGrid(float(t[0]), float(t[-1]), float((t[-1] - t[0]) / (len(t) - 1)))
    return Trajectory(grid, data[:, 1:4].copy(), data[:, 4:7].copy(), method="csv")


def write_report(reports: Sequence[CheckReport], path) -> None:
    """``name status measured tolerance`` per check, then ``SUMMARY pass fail``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    n_pass = sum(r.passed for r in reports)
    lines = [f"{'_'.join(r.name.split())} {r.status} {float(r.measured)!r} {float(r.tolerance)!r}"
             for r in reports]
    lines.append(f"SUMMARY {n_pass} {len(reports) - n_pass}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_report(path) -> tuple[list[tuple[str, str, float, float]], tuple[int, int]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    records = []
    for line in lines[:-1]:
        name, status, measured, tol = line.split(" ")
        records.append((name, status, float(measured), float(tol)))
    tag, n_pass, n_fail = lines[-1].split(" ")
    if tag != "SUMMARY":
        raise ValueError(f"{path}: missing SUMMARY line")
    return records, (int(n_pass), int(n_fail))


# --- commands ---------------------------------------------------------------


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ncphase", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--out", default="out", help="output directory (default ./out)")
        return p

    add("simulate", "integrate one trajectory and write it as CSV").add_argument(
        "--method", choices=("flow", "newton"), default="flow")
    add("cross-check", "bracket flow against the closed-form Newton system")
    add("verify-jacobi", "sample the Jacobi identity of the configured space")
    add("transform", "integrate, apply a frame map and test the result").add_argument(
        "--transform", choices=("t1", "t2", "t3"), required=True)
    add("limit-sweep", "deviation slope as the deformation scale grows")
    add("all", "run the full acceptance suite")
    return parser


def _simulate(cfg, out, method):
    spec, fm, s0, grid = cfg.spec(), cfg.force_mass(), cfg.initial_state(), cfg.grid()
    if method == "flow":
        traj = simulate_flow(spec, fm, s0, grid, method=cfg.integrator)
    else:
        traj = integrate_newton(spec, fm, s0, grid, method=cfg.integrator)
    write_trajectory_csv(traj, out / "trajectory.csv")
    return []


def _cross_check(cfg, out):
    spec, fm, s0, grid = cfg.spec(), cfg.force_mass(), cfg.initial_state(), cfg.grid()
    flow = simulate_flow(spec, fm, s0, grid, method=cfg.integrator)
    newton = integrate_newton(spec, fm, s0, grid, method=cfg.integrator)
    cmp = compare_trajectories(flow, newton)
    write_trajectory_csv(flow, out / "flow.csv")
    write_trajectory_csv(newton, out / "newton.csv")
    return [CheckReport(f"cross-check[{spec.kind.value}]", cmp.max_abs, cfg.tolerance("oracle"),
                        {"l2": cmp.l2, "argmax_time": cmp.argmax_time})]


def _verify_jacobi(cfg, out):
    jcfg = JacobiSampleConfig(seed=cfg.seed)
    return [verify_jacobi(make_structure(cfg.spec()), jcfg, cfg.tolerance("jacobi"))]


_TRANSFORM_SPACE = {"t1": Kind.LIE1, "t2": Kind.LIE2, "t3": Kind.QUADRATIC}


def _transform(cfg, out, which):
    if cfg.space is not _TRANSFORM_SPACE[which]:
        raise ConfigError(f"{which} requires space={_TRANSFORM_SPACE[which].value}")
    spec, fm, s0, grid = cfg.spec(), cfg.force_mass(), cfg.initial_state(), cfg.grid()
    tol = cfg.tolerance("residual")
    if which == "t1":
        source = integrate_newton(DeformationSpec.commutative(), fm, s0, grid, method=cfg.integrator)
        result = transform_t1(source, T1Params(spec.kappa, fm, spec.rho, spec.tau))
        report = newton_residual(result, fm, newton_force(spec, fm), tol=tol, name="t1-residual")
    else:
        source = integrate_newton(spec, fm, s0, grid, method=cfg.integrator)
        fn = transform_t2 if which == "t2" else transform_t3
        result = fn(source, spec, fm)
        report = newton_residual(result, fm, tol=tol, name=f"{which}-residual")
    write_trajectory_csv(source, out / "source.csv")
    write_trajectory_csv(result, out / "transformed.csv")
    return [report]


def _limit_sweep(cfg, out):
    if cfg.space not in _SCALE_KEY:
        raise ConfigError("limit-sweep requires space=lie1, lie2 or quadratic")
    return [kappa_limit_sweep(cfg.spec(), cfg.force_mass(), cfg.initial_state(), cfg.grid(),
                              max_slope=cfg.tolerance("limit_slope"))]


_REPORT_NAME = {
    "cross-check": "cross_check.txt",
    "verify-jacobi": "jacobi.txt",
    "transform": "transform.txt",
    "limit-sweep": "limit_sweep.txt",
    "all": "acceptance.txt",
}


def run_command(argv: Sequence[str] | None = None) -> int:
    try:
        args = _build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"ncphase: usage error: {exc}", file=sys.stderr)
        return 1
    out = Path(args.out)
    try:
        cfg = load_config(args.config)
        if args.command == "simulate":
            reports = _simulate(cfg, out, args.method)
        elif args.command == "cross-check":
            reports = _cross_check(cfg, out)
        elif args.command == "verify-jacobi":
            reports = _verify_jacobi(cfg, out)
        elif args.command == "transform":
            reports = _transform(cfg, out, args.transform)
        elif args.command == "limit-sweep":
            reports = _limit_sweep(cfg, out)
        else:
            reports = acceptance.run_all(cfg.seed)
        if args.command in _REPORT_NAME:
            write_report(reports, out / _REPORT_NAME[args.command])
    except (ConfigurationError, OSError, IntegrationBlowup, ValueError) as exc:
        print(f"ncphase: error: {exc}", file=sys.stderr)
        return 1
    for r in reports:
        print(r.line())
    return 2 if any(not r.passed for r in reports) else 0


def main() -> None:
    sys.exit(run_command())
