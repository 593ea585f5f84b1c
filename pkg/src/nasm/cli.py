"""Command-line front end, configuration files and data export.

Every command writes its outputs plus a ``<output>.manifest.json`` that
records the full configuration, so a run can be repeated exactly.

Configuration files are plain text with one section per module::

    [scan]
    M = 1000
    N = 100000
    threshold = 2

    [kam]
    tol = 1e-11
    mode_cap = 8192

Flags given on the command line override file values.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import logging
import math
import os
import re
import sys
import time
import warnings
from dataclasses import dataclass, field
from importlib import metadata

import numpy as np

from . import kam, periodic, transport
from .maps import MapParams, RotatingMapParams, nasm_trajectory, orbit, rotating_trajectory
from .rotation import complete_with_ones, estimate_rotation_number, resolve_omega

log = logging.getLogger("nasm")

THREADS_ENV = "NASM_THREADS"
CURVE_COLUMNS = ("angle", "kappa1", "kappa2", "method", "omega", "tol", "N_or_modes", "r_c", "M", "width")
CURVE_FORMAT = "nasm-curve/1"


def _version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:  # pragma: no cover
        return "0+unknown"


def fmt(v) -> str:
    """17 significant digits, the shortest form that always round-trips."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


# ---------------------------------------------------------------------------
# configuration


class ConfigError(ValueError):
    pass


@dataclass
class Config:
    scan: transport.ScanConfig = field(default_factory=transport.ScanConfig)
    solver: kam.SolverConfig = field(default_factory=lambda: kam.SolverConfig(mode_cap=2**13))
    continuation: kam.ContinuationConfig = field(default_factory=kam.ContinuationConfig)

    def to_dict(self) -> dict:
        return {
            "scan": self.scan.to_dict(),
            "solver": dataclasses.asdict(self.solver),
            "continuation": dataclasses.asdict(self.continuation),
        }


# section name -> (Config attribute, accepted keys)
_SECTIONS = {
    "scan": ("scan", {f.name for f in dataclasses.fields(transport.ScanConfig)}),
    "kam": ("solver", {f.name for f in dataclasses.fields(kam.SolverConfig)}),
    "continuation": ("continuation", {f.name for f in dataclasses.fields(kam.ContinuationConfig)}),
}


def _line_of(text: str, section: str, key: str) -> int:
    cur = None
    for i, line in enumerate(text.splitlines(), 1):
        s = line.strip()
        m = re.match(r"\[(.+)\]$", s)
        if m:
            cur = m.group(1).strip()
        elif cur == section and re.match(rf"{re.escape(key)}\s*[=:]", s, re.IGNORECASE):
            return i
    return 0


def _coerce(default, raw: str):
    if isinstance(default, bool):
        low = raw.lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ValueError(raw)
    if isinstance(default, int):
        v = float(raw)
        if v != int(v):
            raise ValueError(raw)
        return int(v)
    if isinstance(default, float):
        return float(raw)
    if isinstance(default, tuple):
        return tuple(float(p) for p in raw.split(","))
    return raw


def load_config(path=None, text: str | None = None) -> Config:
    """Read a configuration file; absent keys keep their defaults."""
    if text is None:
        text = "" if path is None else open(path).read()
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(path or "<config>"))
    except configparser.ParsingError as exc:
        lines = ", ".join(str(n) for n, _ in exc.errors)
        raise ConfigError(f"{path or '<config>'}: cannot parse line {lines}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"{path or '<config>'}: {exc}") from exc
    cfg = Config()
    for section in parser.sections():
        if section not in _SECTIONS:
            warnings.warn(f"unknown config section [{section}] (line {_line_of(text, section, '') or '?'})")
            continue
        attr, keys = _SECTIONS[section]
        obj = getattr(cfg, attr)
        updates = {}
        for key, raw in parser.items(section):
            if key not in keys:
                warnings.warn(f"unknown key {key!r} in [{section}] (line {_line_of(text, section, key)})")
                continue
            try:
                updates[key] = _coerce(getattr(obj, key), raw.strip())
            except ValueError:
                raise ConfigError(
                    f"bad value {raw!r} for key {key!r} in [{section}] (line {_line_of(text, section, key)})"
                ) from None
        try:
            setattr(cfg, attr, dataclasses.replace(obj, **updates))
        except ValueError as exc:
            raise ConfigError(f"[{section}]: {exc}") from None
    return cfg


# ---------------------------------------------------------------------------
# export


def write_manifest(path, subcommand: str, config: dict, outputs, started: float) -> str:
    mpath = f"{path}.manifest.json"
    manifest = {
        "subcommand": subcommand,
        "config": config,
        "version": _version(),
        "wall_time": time.perf_counter() - started,
        "outputs": [str(o) for o in outputs],
    }
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
    return mpath


def _curve_rows(curve: transport.BoundaryCurve):
    c = curve.sorted()
    M = c.meta.get("scan", {}).get("M") if c.method == "direct" else None
    for a, k1, k2, w in zip(c.angles, c.kappa1, c.kappa2, c.widths):
        yield {
            "angle": a, "kappa1": k1, "kappa2": k2, "method": c.method, "omega": c.omega,
            "tol": c.tol, "N_or_modes": c.resolution, "r_c": math.hypot(k1, k2), "M": M, "width": w,
        }


def export_curve(curve: transport.BoundaryCurve, path, format: str = "csv", manifest: dict | None = None):
    """Write a boundary curve as CSV (one row per ray) or JSON."""
    if format == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CURVE_COLUMNS)
            for row in _curve_rows(curve):
                w.writerow([row[k] if isinstance(row[k], str) else fmt(row[k]) for k in CURVE_COLUMNS])
    elif format == "json":
        doc = {
            "format": CURVE_FORMAT,
            "method": curve.method,
            "omega": curve.omega,
            "tol": curve.tol,
            "resolution": curve.resolution,
            "angles": list(curve.angles),
            "kappa1": list(curve.kappa1),
            "kappa2": list(curve.kappa2),
            "widths": list(curve.widths),
            "failures": [list(f) for f in curve.failures],
            "meta": curve.meta,
            "manifest": manifest,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
    else:
        raise ValueError(f"unknown format {format!r}")


def load_curve(path) -> transport.BoundaryCurve:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != CURVE_FORMAT:
        raise ValueError(f"{path}: not a curve file")
    return transport.BoundaryCurve(
        doc["method"], doc["angles"], doc["kappa1"], doc["kappa2"], doc["widths"], doc["omega"],
        doc["tol"], doc["resolution"], [tuple(f) for f in doc["failures"]], doc["meta"],
    )


def export_stability(grids, path):
    """CSV of ``kappa1, kappa2, class, stable`` rows for one or more grids."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("kappa1", "kappa2", "class", "stable"))
        for g in grids:
            for k1, k2, cls, st in g.rows():
                w.writerow((fmt(k1), fmt(k2), cls, int(st)))


def _write_array_csv(path, header, arr):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in arr:
            w.writerow([fmt(v) for v in row])


# ---------------------------------------------------------------------------
# commands


def _floats(text: str, n: int, name: str):
    parts = [p for p in text.split(",") if p.strip()]
    if len(parts) != n:
        raise argparse.ArgumentTypeError(f"{name} needs {n} comma-separated numbers")
    return tuple(float(p) for p in parts)


def _scan_cfg(args, cfg: Config) -> transport.ScanConfig:
    over = {}
    for key in ("M", "N", "threshold", "seeding", "seed", "window"):
        v = getattr(args, key, None)
        if v is not None:
            over[key] = v
    return dataclasses.replace(cfg.scan, **over)


def _solver_cfg(args, cfg: Config) -> kam.SolverConfig:
    over = {}
    if getattr(args, "tol", None) is not None and args.command != "trace-cb":
        over["tol"] = args.tol
    if getattr(args, "mode_cap", None) is not None:
        over["mode_cap"] = args.mode_cap
    return dataclasses.replace(cfg.solver, **over)


def cmd_orbit(args, cfg):
    p = MapParams(args.kappa1, args.kappa2)
    if args.nasm:
        data = nasm_trajectory(p, (args.x0, args.y0), args.n)
    else:
        data = orbit(p, (args.x0, args.y0), args.n)
    out = np.column_stack([np.arange(args.n + 1), data])
    _write_array_csv(args.out, ("n", "x", "y"), out)
    return [args.out], {"kappa1": args.kappa1, "kappa2": args.kappa2, "x0": args.x0, "y0": args.y0,
                        "n": args.n, "nasm": args.nasm}


def cmd_stability(args, cfg):
    classes = periodic.POINT_CLASSES if args.point == "all" else (args.point,)
    grids = [periodic.stability_region(c, args.box, args.res) for c in classes]
    export_stability(grids, args.out)
    agree = {g.point_class: g.agreement() for g in grids}
    print(json.dumps({"agreement": agree}))
    return [args.out], {"point": args.point, "box": list(args.box), "res": args.res}


def cmd_scan_transport(args, cfg):
    scan = _scan_cfg(args, cfg)
    k1lo, k1hi, k2lo, k2hi = args.box
    k1 = periodic.grid_centers(k1lo, k1hi, args.res)
    k2 = periodic.grid_centers(k2lo, k2hi, args.res)
    rows = []
    for b in k2:
        for a in k1:
            hit, esc = transport.detect_global_transport((a, b), scan)
            rows.append((a, b, int(hit), esc.iterate if esc else 0))
    _write_array_csv(args.out, ("kappa1", "kappa2", "transport", "escape_iterate"), rows)
    return [args.out], {"scan": scan.to_dict(), "box": list(args.box), "res": args.res}


def _ray_angles(args):
    if args.angles:
        return [float(a) for a in args.angles.split(",")]
    lo, hi = args.angle_range
    if args.rays == 1:
        return [lo]
    return list(np.linspace(lo, hi, args.rays))


def cmd_trace_cb(args, cfg):
    angles = _ray_angles(args)
    workers = args.workers or int(os.environ.get(THREADS_ENV, "1"))
    if args.method == "direct":
        scan = _scan_cfg(args, cfg)
        curve = transport.trace_cb_gt(angles, scan, args.tol, workers=workers)
        conf = {"scan": scan.to_dict(), "tol": args.tol}
    else:
        solver = _solver_cfg(args, cfg)
        curve = kam.trace_cb_omega(resolve_omega(args.omega), angles, cfg.continuation, solver)
        conf = {"solver": dataclasses.asdict(solver), "continuation": dataclasses.asdict(cfg.continuation),
                "omega": args.omega}
    conf.update(method=args.method, angles=angles)
    export_curve(curve, args.out, args.format, manifest={"config": conf, "version": _version()})
    for a, msg in curve.failures:
        log.warning("ray %s failed: %s", fmt(a), msg)
    if len(curve) == 0:
        raise RuntimeError("all rays failed")
    return [args.out], conf


def cmd_kam_solve(args, cfg):
    solver = _solver_cfg(args, cfg)
    w = resolve_omega(args.omega)
    p = MapParams(args.kappa1, args.kappa2)
    K, rep = kam.solve_invariant_circle(p, w.value, cfg=solver, n=args.n)
    if not rep.converged:
        raise RuntimeError(f"solve failed: {rep.reason}")
    kam.save_circle(args.out, K, p, solver, extra={"omega_name": w.name, "iterations": rep.iterations,
                                                   "residual": rep.error})
    outs = [args.out]
    if args.csv:
        kam.circle_samples_csv(args.csv, K)
        outs.append(args.csv)
    print(json.dumps({"residual": rep.error, "iterations": rep.iterations, "n": K.n}))
    return outs, {"kappa1": args.kappa1, "kappa2": args.kappa2, "omega": w.value,
                  "solver": dataclasses.asdict(solver), "n": args.n}


def cmd_rotation(args, cfg):
    p = MapParams(args.kappa1, args.kappa2)
    w, info = estimate_rotation_number(p, (args.x0, args.y0), args.n, method=args.method, full_output=True)
    rec = {"omega": w, "discrepancy": info["discrepancy"], "converged": bool(info["converged"])}
    if args.cf_depth:
        r = complete_with_ones(w, args.cf_depth)
        rec.update(noble=r.value, cf=list(r.cf_terms[: args.cf_depth + 3]))
    text = json.dumps(rec)
    print(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        return [args.out], vars_clean(args)
    return [], vars_clean(args)


def cmd_rotmap(args, cfg):
    rp = RotatingMapParams(args.kbar, args.dkappa, args.Omega, args.phi0)
    data = rotating_trajectory(rp, (args.x0, args.y0), args.n)
    _write_array_csv(args.out, ("n", "x", "y", "phi"), np.column_stack([np.arange(args.n + 1), data]))
    return [args.out], rp._asdict() | {"x0": args.x0, "y0": args.y0, "n": args.n}


def vars_clean(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func",)}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nasm", description="Nonautonomous standard map experiments.")
    ap.add_argument("--config", help="configuration file")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def params(p, k1=0.0, k2=0.0):
        p.add_argument("--kappa1", type=float, default=k1)
        p.add_argument("--kappa2", type=float, default=k2)

    def scan_flags(p):
        p.add_argument("--M", type=int)
        p.add_argument("--N", type=int)
        p.add_argument("--threshold", type=float)
        p.add_argument("--seeding", choices=("lattice", "random"))
        p.add_argument("--seed", type=int)
        p.add_argument("--window", choices=("displacement", "absolute"))

    p = sub.add_parser("orbit", help="iterate and dump a trajectory")
    params(p)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--nasm", action="store_true", help="alternating-kick orbit instead of the composed map")
    p.add_argument("--out", default="orbit.csv")
    p.set_defaults(func=cmd_orbit)

    p = sub.add_parser("stability", help="stability grids of the primary fixed points")
    p.add_argument("--point", choices=periodic.POINT_CLASSES + ("all",), default="all")
    p.add_argument("--box", type=lambda s: _floats(s, 4, "--box"), default=(-2.0, 2.0, -2.0, 2.0))
    p.add_argument("--res", type=int, default=400)
    p.add_argument("--out", default="stability.csv")
    p.set_defaults(func=cmd_stability)

    p = sub.add_parser("scan-transport", help="transport detection on a parameter grid")
    scan_flags(p)
    p.add_argument("--box", type=lambda s: _floats(s, 4, "--box"), default=(0.0, 2.0, 0.0, 2.0))
    p.add_argument("--res", type=int, default=10)
    p.add_argument("--out", default="transport.csv")
    p.set_defaults(func=cmd_scan_transport)

    p = sub.add_parser("trace-cb", help="critical boundary along rays")
    p.add_argument("--method", choices=("direct", "kam"), default="direct")
    p.add_argument("--rays", type=int, default=16)
    p.add_argument("--angles", help="explicit comma-separated ray angles (radians)")
    p.add_argument("--angle-range", type=lambda s: _floats(s, 2, "--angle-range"), default=(0.0, math.pi))
    scan_flags(p)
    p.add_argument("--tol", type=float, default=1e-3, help="radial bisection tolerance")
    p.add_argument("--omega", default="golden")
    p.add_argument("--mode-cap", type=int)
    p.add_argument("--workers", type=int, help=f"worker processes (default ${THREADS_ENV} or 1)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", default="curve.csv")
    p.set_defaults(func=cmd_trace_cb)

    p = sub.add_parser("kam-solve", help="solve one invariant circle")
    params(p)
    p.add_argument("--omega", default="golden")
    p.add_argument("--n", type=int, default=64, help="initial grid size")
    p.add_argument("--tol", type=float)
    p.add_argument("--mode-cap", type=int)
    p.add_argument("--out", default="circle.npz")
    p.add_argument("--csv", help="also write theta-grid samples")
    p.set_defaults(func=cmd_kam_solve)

    p = sub.add_parser("rotation", help="estimate a rotation number")
    params(p)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.3)
    p.add_argument("--n", type=int, default=100_000)
    p.add_argument("--method", choices=("weighted", "plain"), default="weighted")
    p.add_argument("--cf-depth", type=int, default=0, help="complete this many terms with a tail of ones")
    p.add_argument("--out")
    p.set_defaults(func=cmd_rotation)

    p = sub.add_parser("rotmap", help="run the rotating map")
    p.add_argument("--kbar", type=float, default=0.0)
    p.add_argument("--dkappa", type=float, default=0.0)
    p.add_argument("--Omega", type=float, default=0.5)
    p.add_argument("--phi0", type=float, default=0.0)
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--y0", type=float, default=0.0)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--out", default="rotmap.csv")
    p.set_defaults(func=cmd_rotmap)
    return ap


def run_command(argv=None) -> int:
    """Parse ``argv`` and run; returns the process exit status."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        cfg = load_config(args.config) if args.config else Config()
        outputs, conf = args.func(args, cfg)
    except Exception as exc:  # every failure becomes a machine-readable record
        rec = {"error": type(exc).__name__, "message": str(exc), "command": args.command}
        print(json.dumps(rec), file=sys.stderr)
        return 2 if isinstance(exc, (ConfigError, OSError, ValueError)) else 1
    if outputs:
        write_manifest(outputs[0], args.command, conf, outputs, started)
    return 0


def main():  # pragma: no cover - console entry point
    sys.exit(run_command())
