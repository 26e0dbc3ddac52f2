"""Command-line front end: machine-readable reports and distribution grids.

Subcommands
    stats         closed-form and numeric photon statistics for one state
    squeeze-scan  quadrature-variance table over the eta grid for one m
    qfunc         Husimi grid for one state
    wigner        Wigner grid for one state
    sdist         s-ordered distribution grid for one state
    evolve        fidelity-vs-interaction-time series for a generation scheme
    verify        run the built-in acceptance checks, one line per check

Exit codes: 0 success, 1 invalid arguments or config, 2 numerical failure
(truncation or series convergence).  Output is deterministic: identical
configuration produces bit-identical bytes.

Option precedence: command-line flag, then config-file entry, then the
NBS_TAIL_EPS environment variable (tail_eps only), then built-in defaults.
Config files hold one `key = value` per line; `#` starts a comment.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .dynamics import EvolutionSpec, evolve_intensity_dependent, evolve_parametric, fidelity
from .fock import ConvergenceError, TruncationError, TruncationPolicy
from .phasespace import GridSpec, grid_evaluate
from .squeeze import SCAN_POLICY, default_eta_grid, squeezing_scan
from .states import NBSParams, nbs, two_mode_geometric
from .stats import stats_report
from .verify import run_all

__all__ = ["CliError", "RunConfig", "main", "parse_config", "read_grid_csv", "run"]


class CliError(ValueError):
    """Invalid arguments, config-file contents, or environment values."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    eta: float | None = None
    m: int | None = None
    chi_t: float | None = None
    scheme: str = "intensity"
    steps: int = 9
    s: float | None = None
    x_min: float = -6.0
    x_max: float = 6.0
    y_min: float = -6.0
    y_max: float = 6.0
    nx: int = 201
    ny: int = 201
    eta_step: float = 1e-3
    tail_eps: float = 1e-12
    fmt: str = "csv"
    output: str | None = None


_DEFAULTS = {
    "eta": None,
    "m": None,
    "chi_t": None,
    "scheme": None,
    "steps": None,
    "s": None,
    "x_min": None,
    "x_max": None,
    "y_min": None,
    "y_max": None,
    "nx": None,
    "ny": None,
    "range": None,
    "eta_step": None,
    "tail_eps": None,
    "format": None,
    "output": None,
}

_KEY_TYPES = {
    "eta": float,
    "m": int,
    "chi_t": float,
    "scheme": str,
    "steps": int,
    "s": float,
    "x_min": float,
    "x_max": float,
    "y_min": float,
    "y_max": float,
    "nx": int,
    "ny": int,
    "range": float,
    "eta_step": float,
    "tail_eps": float,
    "format": str,
    "output": str,
}

_REQUIRED = {
    "stats": ("eta", "m"),
    "squeeze-scan": ("m",),
    "qfunc": ("eta", "m"),
    "wigner": ("eta", "m"),
    "sdist": ("eta", "m", "s"),
    "evolve": ("chi_t",),
    "verify": (),
}

_GRID_COMMANDS = ("qfunc", "wigner", "sdist")


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for numerical failure; bad arguments are 1,
    # not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> _Parser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="FILE", help="key=value config file")
    common.add_argument("--tail-eps", type=float, dest="tail_eps", metavar="EPS",
                        help="basis truncation tolerance (default 1e-12)")
    common.add_argument("--format", choices=("csv", "json"),
                        help="output format (default csv; stats defaults to json)")
    common.add_argument("--output", "-o", metavar="FILE",
                        help="write to FILE instead of stdout")

    state = argparse.ArgumentParser(add_help=False)
    state.add_argument("--eta", type=float, help="success parameter, 0 < eta <= 1")
    state.add_argument("--m", type=int, help="conditioned photon count, m >= 0")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--x-min", type=float, dest="x_min")
    grid.add_argument("--x-max", type=float, dest="x_max")
    grid.add_argument("--y-min", type=float, dest="y_min")
    grid.add_argument("--y-max", type=float, dest="y_max")
    grid.add_argument("--nx", type=int, help="grid columns (default 201)")
    grid.add_argument("--ny", type=int, help="grid rows (default 201)")
    grid.add_argument("--range", type=float, dest="range",
                      help="shortcut for the square window [-R, R] x [-R, R]")

    parser = _Parser(
        prog="nbs",
        description="Negative binomial states: statistics, squeezing, "
        "phase-space grids, and generation dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("stats", parents=[state, common],
                   help="photon statistics report for one (eta, m)")
    scan = sub.add_parser("squeeze-scan", parents=[common],
                          help="quadrature variances over the eta grid")
    scan.add_argument("--m", type=int, help="conditioned photon count, m >= 0")
    scan.add_argument("--eta-step", type=float, dest="eta_step",
                      help="eta grid step (default 1e-3)")
    sub.add_parser("qfunc", parents=[state, grid, common],
                   help="Husimi distribution grid")
    sub.add_parser("wigner", parents=[state, grid, common],
                   help="Wigner distribution grid")
    sdist = sub.add_parser("sdist", parents=[state, grid, common],
                           help="s-ordered distribution grid")
    sdist.add_argument("--s", type=float, help="ordering parameter in [-1, 0]")
    ev = sub.add_parser("evolve", parents=[common],
                        help="fidelity of the evolved state vs interaction time")
    ev.add_argument("--chi-t", type=float, dest="chi_t",
                    help="largest dimensionless interaction time, > 0")
    ev.add_argument("--scheme", choices=("intensity", "parametric"),
                    help="evolution scheme (default intensity)")
    ev.add_argument("--m", type=int,
                    help="initial number state for the intensity scheme (default 0)")
    ev.add_argument("--steps", type=int, help="number of time samples (default 9)")
    sub.add_parser("verify", parents=[common],
                   help="run the acceptance checks and report PASS/FAIL")
    return parser


def _convert(key: str, raw: str, source: str):
    kind = _KEY_TYPES[key]
    try:
        return kind(raw)
    except ValueError:
        raise CliError(
            f"{source}: cannot parse {key!r} value {raw!r} as {kind.__name__}"
        ) from None


def _read_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read config file {path!r}: {exc}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, raw = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in _KEY_TYPES:
            raise CliError(f"{path}:{lineno}: unknown config key {key!r}")
        out[key] = _convert(key, raw.strip(), f"{path}:{lineno}")
    return out


def _fail(name: str, value, requirement: str):
    raise CliError(f"{name} must {requirement}, got {value}")


def _validate(cmd: str, cfg: dict):
    for key in _REQUIRED[cmd]:
        if cfg[key] is None:
            raise CliError(f"{cmd} requires --{key.replace('_', '-')}")
    eta, m = cfg["eta"], cfg["m"]
    if eta is not None and not (math.isfinite(eta) and 0.0 < eta <= 1.0):
        _fail("eta", eta, "lie in (0, 1]")
    if m is not None and m < 0:
        _fail("m", m, "be >= 0")
    if cfg["s"] is not None and not -1.0 <= cfg["s"] <= 0.0:
        _fail("s", cfg["s"], "lie in [-1, 0]")
    if cfg["chi_t"] is not None and not (
        math.isfinite(cfg["chi_t"]) and cfg["chi_t"] > 0.0
    ):
        _fail("chi-t", cfg["chi_t"], "be a finite positive time")
    if cfg["steps"] is not None and cfg["steps"] < 2:
        _fail("steps", cfg["steps"], "be >= 2")
    if cfg["scheme"] is not None and cfg["scheme"] not in ("intensity", "parametric"):
        _fail("scheme", cfg["scheme"], "be 'intensity' or 'parametric'")
    if cmd == "evolve" and cfg["scheme"] == "parametric" and m is not None:
        raise CliError("the parametric scheme is seeded by vacuum; --m does not apply")
    if not 0.0 < cfg["tail_eps"] <= 1e-6:
        _fail("tail-eps", cfg["tail_eps"], "lie in (0, 1e-6]")
    if cfg["eta_step"] is not None and not 0.0 < cfg["eta_step"] <= 0.1:
        _fail("eta-step", cfg["eta_step"], "lie in (0, 0.1]")
    if cfg["range"] is not None and not (
        math.isfinite(cfg["range"]) and cfg["range"] >= 0.0
    ):
        _fail("range", cfg["range"], "be a finite non-negative half-width")
    for key in ("nx", "ny"):
        if cfg[key] is not None and cfg[key] < 2:
            _fail(key, cfg[key], "be >= 2")
    if cfg["x_max"] < cfg["x_min"] or cfg["y_max"] < cfg["y_min"]:
        raise CliError(
            "grid bounds must satisfy x-max >= x-min and y-max >= y-min, got "
            f"[{cfg['x_min']}, {cfg['x_max']}] x [{cfg['y_min']}, {cfg['y_max']}]"
        )


def parse_config(argv) -> RunConfig:
    """Merge flags, config file, environment, and defaults into a RunConfig."""
    ns = _build_parser().parse_args(list(argv))
    cfg = dict(_DEFAULTS)

    env = os.environ.get("NBS_TAIL_EPS")
    if env is not None:
        cfg["tail_eps"] = _convert("tail_eps", env, "environment NBS_TAIL_EPS")
    if ns.config is not None:
        cfg.update(_read_config_file(ns.config))
    for key in _KEY_TYPES:
        flag = getattr(ns, key, None)
        if flag is not None:
            cfg[key] = flag

    if cfg["range"] is not None and cfg["range"] >= 0.0:
        r = cfg["range"]
        cfg.update(x_min=-r, x_max=r, y_min=-r, y_max=r)
    # fill residual defaults before validation so bounds are always comparable
    fill = {
        "scheme": "intensity", "steps": 9, "x_min": -6.0, "x_max": 6.0,
        "y_min": -6.0, "y_max": 6.0, "nx": 201, "ny": 201,
        "eta_step": 1e-3, "tail_eps": 1e-12,
    }
    filled = {k: (cfg[k] if cfg[k] is not None else fill.get(k)) for k in cfg}
    _validate(ns.command, {**cfg, **{k: filled[k] for k in fill}})

    return RunConfig(
        command=ns.command,
        eta=filled["eta"],
        m=filled["m"],
        chi_t=filled["chi_t"],
        scheme=filled["scheme"],
        steps=filled["steps"],
        s=filled["s"],
        x_min=filled["x_min"],
        x_max=filled["x_max"],
        y_min=filled["y_min"],
        y_max=filled["y_max"],
        nx=filled["nx"],
        ny=filled["ny"],
        eta_step=filled["eta_step"],
        tail_eps=filled["tail_eps"],
        fmt=filled["format"]
        or ("json" if ns.command == "stats" else "csv"),
        output=filled["output"],
    )


def _g17(x: float) -> str:
    # + 0.0 folds negative zero into plain zero
    return "%.17g" % (float(x) + 0.0)


def _grid_text(grid, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "x_min": grid.x_min, "x_max": grid.x_max,
            "y_min": grid.y_min, "y_max": grid.y_max,
            "nx": grid.nx, "ny": grid.ny,
            "riemann_sum": grid.riemann_sum,
            "values": [[float(v) for v in row] for row in grid.values],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    header = "# " + ",".join(
        [_g17(grid.x_min), _g17(grid.x_max), _g17(grid.y_min), _g17(grid.y_max),
         str(grid.nx), str(grid.ny)]
    )
    rows = [",".join(_g17(v) for v in row) for row in grid.values]
    return "\n".join([header] + rows) + "\n"


def read_grid_csv(text: str) -> tuple[GridSpec, np.ndarray]:
    """Parse a grid written by this CLI back into its window and values."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("#"):
        raise ValueError("missing grid header row")
    head = lines[0].lstrip("#").strip().split(",")
    if len(head) != 6:
        raise ValueError(f"grid header must hold six fields, got {lines[0]!r}")
    x_min, x_max, y_min, y_max = (float(v) for v in head[:4])
    nx, ny = int(head[4]), int(head[5])
    values = np.array(
        [[float(v) for v in ln.split(",")] for ln in lines[1:]], dtype=float
    )
    if values.shape != (ny, nx):
        raise ValueError(
            f"grid body shape {values.shape} does not match header ({ny}, {nx})"
        )
    return GridSpec(x_min, x_max, y_min, y_max, nx, ny), values


def _stats_text(config: RunConfig) -> str:
    report = stats_report(
        config.eta, config.m, TruncationPolicy(tail_eps=config.tail_eps)
    )
    if config.fmt == "json":
        payload = {
            "eta": report.eta,
            "m": report.m,
            "mean": report.f1,
            "second_factorial_moment": report.f2,
            "mandel_q": report.mandel_q_closed,
            "mandel_q_numeric": report.mandel_q_numeric,
            "sub_poissonian_threshold": report.sub_poissonian_threshold,
            "degenerate_vacuum": report.degenerate_vacuum,
            "generating_function": {
                "%g" % lam: val
                for lam, val in sorted(report.generating_function_values.items())
            },
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    header = ("# eta,m,mean,second_factorial_moment,mandel_q,"
              "mandel_q_numeric,sub_poissonian_threshold")
    row = ",".join(
        [_g17(report.eta), str(report.m), _g17(report.f1), _g17(report.f2),
         _g17(report.mandel_q_closed), _g17(report.mandel_q_numeric),
         _g17(report.sub_poissonian_threshold)]
    )
    return header + "\n" + row + "\n"


def _squeeze_text(config: RunConfig) -> str:
    etas = default_eta_grid(step=config.eta_step)
    # small-eta rows need the roomier scan cap, not the general default
    policy = TruncationPolicy(
        tail_eps=config.tail_eps, n_hard_cap=SCAN_POLICY.n_hard_cap
    )
    scan = squeezing_scan([config.m], etas, policy)
    if config.fmt == "json":
        payload = {
            "m": config.m,
            "eta": [float(v) for v in scan.eta_values],
            "mean_a": [float(v) for v in scan.mean_a[0]],
            "mean_a2": [float(v) for v in scan.mean_a2[0]],
            "var_x": [float(v) for v in scan.var_x[0]],
            "var_y": [float(v) for v in scan.var_y[0]],
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    lines = [f"# m={config.m}", "# eta,mean_a,mean_a2,var_x,var_y"]
    for j, eta in enumerate(scan.eta_values):
        lines.append(",".join(
            [_g17(eta), _g17(scan.mean_a[0, j]), _g17(scan.mean_a2[0, j]),
             _g17(scan.var_x[0, j]), _g17(scan.var_y[0, j])]
        ))
    return "\n".join(lines) + "\n"


def _grid_command_text(config: RunConfig) -> str:
    policy = TruncationPolicy(tail_eps=config.tail_eps)
    state = nbs(NBSParams(config.eta, config.m), policy)
    spec = GridSpec(
        config.x_min, config.x_max, config.y_min, config.y_max,
        config.nx, config.ny,
    )
    kind = {"qfunc": "Q", "wigner": "W", "sdist": "S"}[config.command]
    grid = grid_evaluate(state, spec, kind, config.s)
    return _grid_text(grid, config.fmt)


def _evolve_text(config: RunConfig) -> str:
    policy = TruncationPolicy(tail_eps=config.tail_eps)
    m = config.m if config.m is not None else 0
    times = np.linspace(0.0, config.chi_t, config.steps)
    rows = []
    for chi_t in times:
        chi_t = float(chi_t)
        eta_target = 1.0 - math.tanh(chi_t) ** 2
        if config.scheme == "intensity":
            v = evolve_intensity_dependent(EvolutionSpec(chi_t, m=m, policy=policy))
            target = nbs(NBSParams(eta_target, m), policy)
        else:
            v = evolve_parametric(chi_t, policy)
            target = two_mode_geometric(eta_target, policy)
        rows.append(
            (chi_t, fidelity(v, target), float(np.linalg.norm(v.amplitudes)))
        )
    if config.fmt == "json":
        payload = {
            "scheme": config.scheme,
            "chi_t": [r[0] for r in rows],
            "fidelity": [r[1] for r in rows],
            "norm": [r[2] for r in rows],
        }
        if config.scheme == "intensity":
            payload["m"] = m
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"
    lines = [f"# scheme={config.scheme}" + (f" m={m}" if config.scheme == "intensity" else ""),
             "# chi_t,fidelity,norm"]
    lines += [",".join(_g17(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def run(config: RunConfig) -> int:
    """Execute a parsed configuration; returns the process exit code."""
    try:
        if config.command == "verify":
            lines = []
            code = run_all(write=lines.append)
            text = "\n".join(lines) + "\n"
        else:
            code = 0
            text = {
                "stats": _stats_text,
                "squeeze-scan": _squeeze_text,
                "qfunc": _grid_command_text,
                "wigner": _grid_command_text,
                "sdist": _grid_command_text,
                "evolve": _evolve_text,
            }[config.command](config)
    except (TruncationError, ConvergenceError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    if config.output is None:
        sys.stdout.write(text)
    else:
        with open(config.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return code


def main(argv=None) -> int:
    try:
        config = parse_config(sys.argv[1:] if argv is None else argv)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        return int(exc.code or 0)
    return run(config)
