"""Command-line front end.

Configuration is an INI file with flat sections ``[run]``, ``[problem]``,
``[operator]``, ``[scheme]`` and ``[output]``; command-line flags override it.
Datum parameters go in ``[problem]`` as ``datum.<name> = value``.

Exit codes: 0 pass, 1 check failure, 2 usage or configuration error,
3 numerical abort.
"""
from __future__ import annotations

import argparse
import configparser
import json
import logging
import platform
import sys
import time
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy

from . import catalog, verify
from .field import GridSpec, write_grid_csv
from .heat1d import build_profile
from .operator import L_eps, OperatorConfig, cs_constant, operator_family
from .quad import IntegrabilityError, check_s
from .scheme import NumericalAbort, SchemeConfig, evolve, interpolate_time, monitor_apriori

logger = logging.getLogger(__name__)

COMMANDS = ("op-eval", "evolve", "kernel", "verify", "harnack")
EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_ABORT = 0, 1, 2, 3


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


# keys and their types per section
_SCHEMA = {
    "run": {"command": str, "seed": int, "threads": int, "suite": str},
    "problem": {"s": float, "dim": int, "datum": str, "extent": float, "resolution": int, "probes": str},
    "operator": {"eps": float, "n_dir": int, "cut": float, "panels_per_decade": int, "nodes_per_panel": int,
                 "eta0": float, "grad_tol": float},
    "scheme": {"theta": float, "T": float, "snapshots": str, "method": str},
    "output": {"dir": str, "formats": str},
}


@dataclass
class RunConfig:
    command: str = "evolve"
    seed: int = verify.DEFAULT_SEED
    threads: int = 1
    suite: str = "all"
    s: float = 0.75
    dim: int = 2
    datum: str = "gaussian"
    datum_params: dict = dc_field(default_factory=dict)
    extent: float = 6.0
    resolution: int = 64
    probes: str = "0,0; 0.5,0; 1,0; 2,0"
    eps: float = 0.1
    n_dir: Optional[int] = None
    cut: float = 100.0
    panels_per_decade: int = 16
    nodes_per_panel: int = 8
    eta0: float = 1e-2
    grad_tol: float = 1e-6
    theta: float = 0.5
    T: float = 0.25
    snapshots: str = ""
    method: str = "fft"
    out: str = "fracinf_out"
    formats: str = "csv,json"

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise ConfigError(f"[run].command: unknown command {self.command!r}; expected one of {COMMANDS}")
        try:
            check_s(self.s)
        except ValueError:
            raise ConfigError(f"[problem].s: s must lie in (1/2,1), got {self.s}") from None
        if self.dim not in (1, 2, 3):
            raise ConfigError(f"[problem].dim: dimension must be 1, 2 or 3, got {self.dim}")
        if self.datum not in catalog.CATALOG:
            raise ConfigError(f"[problem].datum: unknown datum {self.datum!r}; known: {sorted(catalog.CATALOG)}")
        if not self.eps > 0:
            raise ConfigError(f"[operator].eps: eps must be positive, got {self.eps}")
        if not 0 < self.theta <= 1:
            raise ConfigError(f"[scheme].theta: theta={self.theta} violates the CFL condition "
                              "tau <= s eps^(2s) / C_s (theta must lie in (0,1])")
        if self.T < 0:
            raise ConfigError(f"[scheme].T: T must be nonnegative, got {self.T}")
        if self.resolution < 2:
            raise ConfigError("[problem].resolution: need at least 2 nodes per axis")
        if self.threads < 1:
            raise ConfigError("[run].threads: need at least one thread")
        if self.suite != "all" and self.suite not in verify.SUITES:
            raise ConfigError(f"[run].suite: unknown suite {self.suite!r}; known: all, {', '.join(verify.SUITES)}")
        bad = set(self.format_list) - {"csv", "json"}
        if bad:
            raise ConfigError(f"[output].formats: unknown formats {sorted(bad)}")
        for t in self.snapshot_list:
            if not 0 <= t <= self.T:
                raise ConfigError(f"[scheme].snapshots: time {t} outside [0, T]")
        return self

    @property
    def format_list(self) -> list:
        return [f.strip() for f in self.formats.split(",") if f.strip()]

    @property
    def snapshot_list(self) -> list:
        return [float(v) for v in self.snapshots.replace(";", ",").split(",") if v.strip()]

    def probe_points(self) -> np.ndarray:
        pts = []
        for chunk in self.probes.split(";"):
            if chunk.strip():
                v = [float(c) for c in chunk.split(",")]
                v = (v + [0.0] * self.dim)[: self.dim]
                pts.append(v)
        return np.array(pts, dtype=float)

    def operator_config(self) -> OperatorConfig:
        return OperatorConfig.make(self.s, self.eps, self.dim, n_dir=self.n_dir, cut=self.cut,
                                   panels_per_decade=self.panels_per_decade, nodes_per_panel=self.nodes_per_panel,
                                   eta0=self.eta0, grad_tol=self.grad_tol)

    def scheme_config(self) -> SchemeConfig:
        op = OperatorConfig.make(self.s, self.eps, self.dim, n_dir=self.n_dir, cut=self.cut,
                                 panels_per_decade=self.panels_per_decade, nodes_per_panel=self.nodes_per_panel,
                                 eta0=self.eta0, grad_tol=self.grad_tol, refine=False, augment=False)
        grid = GridSpec.cube(self.dim, -self.extent, self.extent, self.resolution)
        return SchemeConfig(op, grid, theta=self.theta, T=self.T, snapshot_times=tuple(self.snapshot_list),
                            method=self.method, workers=self.threads)

    def datum_field(self):
        try:
            return catalog.make_datum(self.datum, self.dim, **self.datum_params)
        except TypeError as exc:
            raise ConfigError(f"[problem].datum.*: bad parameters for {self.datum!r}: {exc}") from None


_FLAG_KEYS = {"s": "s", "eps": "eps", "theta": "theta", "T": "T", "dim": "dim", "datum": "datum", "out": "out",
              "threads": "threads", "seed": "seed", "suite": "suite"}


def _coerce(section: str, key: str, raw: str, typ):
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(f"[{section}].{key}: cannot read {raw!r} as {typ.__name__}") from None


def parse_config(path=None, overrides: Optional[dict] = None) -> RunConfig:
    """Read an INI file (optional), apply ``overrides`` and validate.

    Raises
    ------
    ConfigError
        On unknown sections or keys, unreadable values or failed validation.
    """
    cfg = RunConfig()
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file {str(path)!r} does not exist")
        ini = configparser.ConfigParser(interpolation=None)
        ini.optionxform = str
        try:
            ini.read(path)
        except configparser.Error as exc:
            raise ConfigError(f"{path}: {exc}") from None
        for section in ini.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"{path}: unknown section [{section}]")
            for key, raw in ini.items(section):
                if section == "problem" and key.startswith("datum."):
                    cfg.datum_params[key[6:]] = _coerce(section, key, raw, float)
                    continue
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"{path}: unknown key [{section}].{key}")
                value = _coerce(section, key, raw, _SCHEMA[section][key])
                setattr(cfg, "out" if (section, key) == ("output", "dir") else key, value)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if not hasattr(cfg, key):
            raise ConfigError(f"unknown option {key!r}")
        setattr(cfg, key, value)
    return cfg.validate()


# --------------------------------------------------------------- commands


def _versions() -> dict:
    from . import __version__
    return {"fracinf": __version__, "python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__}


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, tuple):
        return list(o)
    return str(o)


def cmd_op_eval(cfg: RunConfig, out: Path) -> tuple:
    op = cfg.operator_config()
    f = cfg.datum_field()
    rows = []
    for x in cfg.probe_points():
        fam = operator_family(f, x, op)
        rows.append({"x": x.tolist(), "ifl": fam.ifl, "plus": fam.plus, "minus": fam.minus,
                     "zero_gradient": fam.zero_gradient, "L_eps": L_eps(f, x, op)})
    if "csv" in cfg.format_list:
        with open(out / "op_eval.csv", "w") as fh:
            fh.write(",".join([f"x{i}" for i in range(cfg.dim)] + ["ifl", "plus", "minus", "L_eps"]) + "\n")
            for r in rows:
                vals = r["x"] + [r["ifl"], r["plus"], r["minus"], r["L_eps"]]
                fh.write(",".join(f"{v:.17g}" for v in vals) + "\n")
    ok = all(r["minus"] - 1e-8 <= r["ifl"] <= r["plus"] + 1e-8 for r in rows)
    return ok, {"values": rows, "C_s": cs_constant(cfg.s)}


def cmd_evolve(cfg: RunConfig, out: Path) -> tuple:
    sc = cfg.scheme_config()
    traj = evolve(cfg.datum_field(), sc)
    names = []
    times = sorted(set(cfg.snapshot_list) | {cfg.T})
    for t in times:
        snap = interpolate_time(traj, t)
        name = f"snapshot_t{t:.6g}.csv"
        if "csv" in cfg.format_list:
            write_grid_csv(snap, out / name, {"t": t, "datum": cfg.datum})
        names.append(name)
    mon = monitor_apriori(traj)
    summary = {"tau": sc.tau, "steps": sc.n_steps, "snapshots": names, "wall_per_step": float(np.mean(traj.wall)),
               "sup_history": mon.sup_history, "mass_history": mon.mass_history,
               "monitors": [asdict(r) | {"passed": r.passed} for r in mon.records],
               "time_slope": mon.time_slope() if len(mon.time_lags) > 1 else None}
    return mon.passed, summary


def cmd_kernel(cfg: RunConfig, out: Path) -> tuple:
    k = build_profile(cfg.s)
    decreasing = bool(np.all(np.diff(k.F) < 0))
    if "csv" in cfg.format_list:
        with open(out / "kernel_profile.csv", "w") as fh:
            fh.write("r,F\n")
            np.savetxt(fh, np.column_stack([k.r, k.F]), fmt="%.17g", delimiter=",")
    mass = k.mass()
    ok = decreasing and abs(mass - 1) <= verify.TOL.kernel_mass
    return ok, {"r_max": k.r_max, "dr": k.dr, "mass": mass, "strictly_decreasing": decreasing,
                "tail_coefficient": k.c_tail, "two_sided_constants": list(k.tail_constants)}


def _report_result(rep, out: Path, cfg: RunConfig) -> tuple:
    text = rep.to_text()
    print(text)
    (out / f"report_{rep.suite}.txt").write_text(text + "\n")
    if "json" in cfg.format_list:
        (out / f"report_{rep.suite}.json").write_text(rep.to_json(indent=2, default=_json_default) + "\n")
    return rep.passed, {"suite": rep.suite, "checks": len(rep.records), "failures": len(rep.failures)}


def cmd_verify(cfg: RunConfig, out: Path) -> tuple:
    kw = {"seed": cfg.seed, "workers": cfg.threads}
    if cfg.suite in ("all", "convergence"):
        kw["snapshot_dir"] = str(out)
    return _report_result(verify.run(cfg.suite, **kw), out, cfg)


def cmd_harnack(cfg: RunConfig, out: Path) -> tuple:
    return _report_result(verify.suite_harnack(s=cfg.s, eps=cfg.eps, workers=cfg.threads), out, cfg)


_DISPATCH = {"op-eval": cmd_op_eval, "evolve": cmd_evolve, "kernel": cmd_kernel, "verify": cmd_verify,
             "harnack": cmd_harnack}


def run(cfg: RunConfig) -> int:
    """Execute ``cfg.command``; write ``run.json`` and return the exit status."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    t0 = time.perf_counter()
    passed, summary = _DISPATCH[cfg.command](cfg, out)
    meta = {"config": asdict(cfg), "versions": _versions(), "wall_seconds": time.perf_counter() - t0,
            "tolerances": asdict(verify.TOL), "passed": bool(passed), "result": summary}
    if "json" in cfg.format_list:
        _write_json(out / "run.json", meta)
    return EXIT_PASS if passed else EXIT_FAIL


# ------------------------------------------------------------------ entry


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fracinf", description="Infinity fractional Laplacian toolkit.")
    p.add_argument("command", nargs="?", choices=COMMANDS, help="what to run (default: [run].command or evolve)")
    p.add_argument("target", nargs="?", help="suite name for 'verify' (same as --suite)")
    p.add_argument("--config", help="INI configuration file")
    p.add_argument("--s", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--T", type=float)
    p.add_argument("--dim", type=int)
    p.add_argument("--datum")
    p.add_argument("--out", help="output directory")
    p.add_argument("--threads", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--suite")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def _error(code: int, kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message, "exit_code": code}), file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {k: getattr(args, flag) for flag, k in _FLAG_KEYS.items()}
    overrides["command"] = args.command
    if args.target is not None:
        if args.suite is not None and args.suite != args.target:
            return _error(EXIT_USAGE, "ConfigError", "conflicting suite names")
        overrides["suite"] = args.target
    try:
        cfg = parse_config(args.config, overrides)
        return run(cfg)
    except ConfigError as exc:
        return _error(EXIT_USAGE, "ConfigError", str(exc))
    except (NumericalAbort, IntegrabilityError, FloatingPointError) as exc:
        return _error(EXIT_ABORT, type(exc).__name__, str(exc))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
