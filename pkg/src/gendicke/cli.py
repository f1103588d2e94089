"""Command line front end: ``gendicke ground|scan|wigner|trajectory``.

Exit codes: 0 success, 1 numerical failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from .groundstate import (DEFAULT_K_CEILING, DEFAULT_K_START, SolverError, TOL_FIDELITY,
                          TruncationError, global_ground_state)
from .io import RunManifest, write_csv
from .model import AtomicConfiguration, ModelParams, ParameterError, load_params
from .transitions import GridSpec, classify_separatrix, state_fidelity, surface
from .wigner import (DEFAULT_HALF_RANGE, DEFAULT_POINTS, NumericalConsistencyError,
                     default_grid, reduce_density, wigner_field)

log = logging.getLogger("gendicke")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _add_model_args(p: argparse.ArgumentParser):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=[c.value for c in AtomicConfiguration],
                     help="resonant parameter set of a configuration")
    src.add_argument("--config", type=Path, help="key = value parameter file")
    for tag in ("12", "13", "23"):
        p.add_argument(f"--x{tag}", type=float, default=None, metavar="X",
                       help=f"dimensionless coupling of mode {tag}")
    p.add_argument("--tol-fidelity", type=float, default=TOL_FIDELITY)
    p.add_argument("--k-start", type=int, default=DEFAULT_K_START[0])
    p.add_argument("--k-ceiling", type=int, default=DEFAULT_K_CEILING)


def _params(args) -> ModelParams:
    if args.config is not None:
        params = load_params(args.config)
    elif args.preset is not None:
        params = ModelParams.preset(args.preset)
    else:
        raise UsageError("one of --preset or --config is required")
    tags = params.config.mode_tags
    x = list(params.x)
    for tag in ("12", "13", "23"):
        val = getattr(args, f"x{tag}")
        if val is None:
            continue
        if tag not in tags:
            raise UsageError(f"mode {tag} is not active in the {params.config.value} configuration "
                             f"(active: {', '.join(tags)})")
        x[tags.index(tag)] = val
    return params.with_x(x)


def _solver_kw(args) -> dict:
    return dict(k_start=(args.k_start, args.k_start), k_ceiling=args.k_ceiling,
                tol_fidelity=args.tol_fidelity)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    return float(parts[0]), float(parts[1])


def run_ground(args) -> int:
    params = _params(args)
    gs = global_ground_state(params, **_solver_kw(args))
    print(json.dumps(gs.to_record(), indent=2))
    return EXIT_OK


def run_scan(args) -> int:
    params = _params(args)
    grid = GridSpec.parse(args.grid)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest("scan", params, spec={"grid": str(grid), "n_samples": args.samples},
                           tol_fidelity=args.tol_fidelity)
    jobs = args.jobs if args.jobs else (os.cpu_count() or 1)
    surf = surface(params, grid, eps=args.eps, n_samples=args.samples, jobs=jobs)
    surf = classify_separatrix(surf, theta=args.theta)
    manifest.extra = {"eps": surf.eps, "dx": grid.dx, "theta": surf.theta,
                      "theta_rule": "user" if args.theta is not None else "median of ridge D_B_max",
                      "failed_nodes": len(surf.errors)}
    manifest.finish()
    ta, tb = params.config.mode_tags
    rows = []
    for i, a in enumerate(grid.xa):
        for j, b in enumerate(grid.xb):
            rows.append((a, b, surf.F_min[i, j], surf.D_B_max[i, j], surf.energy[i, j],
                         surf.sector_map[i, j] or "nan", surf.labels[i, j] or "none"))
    write_csv(out / "surface.csv",
              [f"x_{ta}", f"x_{tb}", "F_min", "D_B_max", "energy", "sector", "class"],
              rows, manifest)
    print(out / "surface.csv")
    return EXIT_NUMERIC if surf.errors and len(surf.errors) == len(rows) else EXIT_OK


def _grid_for(args, rho):
    if args.points is None and args.qmax is None:
        return default_grid(rho.nu_max)
    half = args.qmax if args.qmax is not None else DEFAULT_HALF_RANGE
    n = args.points if args.points is not None else DEFAULT_POINTS
    return np.linspace(-half, half, n)


def _write_wigner(path, field, manifest, extra=()):
    rows = ((q, p, field.W[i, j]) for i, q in enumerate(field.q) for j, p in enumerate(field.p))
    header = [f"mode: {field.mode}",
              f"grid: q,p in [{field.q[0]!r}, {field.q[-1]!r}], {len(field.q)}x{len(field.p)} points",
              f"nu_max: {field.nu_max}",
              f"integral: {field.integral!r}",
              f"negativity_volume: {field.negativity_volume!r}",
              f"imag_residue: {field.imag_residue!r}", *extra]
    write_csv(path, ["q", "p", "W"], rows, manifest, header)


def run_wigner(args) -> int:
    params = _params(args)
    tags = params.config.mode_tags
    if args.mode not in tags:
        raise UsageError(f"--mode must be one of {tags}")
    gs = global_ground_state(params, **_solver_kw(args))
    rho = reduce_density(gs, args.mode)
    g = _grid_for(args, rho)
    field = wigner_field(rho, g, g)
    manifest = RunManifest("wigner", params, spec={"mode": args.mode, "sector": gs.sector.value,
                                                   "energy": gs.energy},
                           tol_fidelity=args.tol_fidelity)
    manifest.finish()
    _write_wigner(args.out, field, manifest)
    print(args.out)
    return EXIT_OK


def run_trajectory(args) -> int:
    params = _params(args)
    start, end = np.array(args.start), np.array(args.end)
    if args.samples < 1:
        raise UsageError("--samples must be positive")
    n = 1 if np.allclose(start, end) else args.samples
    ts = np.linspace(0.0, 1.0, n) if n > 1 else np.zeros(1)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tags = params.config.mode_tags
    manifest = RunManifest("trajectory", params,
                           spec={"start": list(start), "end": list(end), "samples": n},
                           tol_fidelity=args.tol_fidelity)
    rows, prev = [], None
    width = len(str(n - 1))
    for idx, t in enumerate(ts):
        xy = (1 - t) * start + t * end
        gs = global_ground_state(params.with_x(xy), **_solver_kw(args))
        fid = state_fidelity(prev, gs) if prev is not None else math.nan
        negs = []
        for tag in tags:
            rho = reduce_density(gs, tag)
            g = _grid_for(args, rho)
            field = wigner_field(rho, g, g)
            negs.append(field.negativity_volume)
            sample = RunManifest("trajectory", params.with_x(xy),
                                 spec={"sample": idx, "sector": gs.sector.value},
                                 tol_fidelity=args.tol_fidelity)
            _write_wigner(out / f"W{tag}_{idx:0{width}d}.csv", field, sample)
        rows.append((idx, xy[0], xy[1], gs.energy, gs.sector.value, fid, *negs))
        prev = gs
    manifest.finish()
    write_csv(out / "trajectory.csv",
              ["index", f"x_{tags[0]}", f"x_{tags[1]}", "energy", "sector", "fidelity_prev",
               f"negativity_{tags[0]}", f"negativity_{tags[1]}"], rows, manifest)
    print(out / "trajectory.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gendicke", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ground", help="global ground state at one parameter point")
    _add_model_args(p)
    p.set_defaults(func=run_ground)

    p = sub.add_parser("scan", help="minimum-fidelity / maximum-Bures surface on a grid")
    _add_model_args(p)
    p.add_argument("--grid", required=True, help="a_lo,a_hi,b_lo,b_hi,n")
    p.add_argument("--out", required=True, type=Path, help="output directory")
    p.add_argument("--samples", type=int, default=100, help="points per neighbourhood")
    p.add_argument("--eps", type=float, default=None, help="neighbourhood radius (default 0.9 dx)")
    p.add_argument("--theta", type=float, default=None, help="stable/unstable threshold")
    p.add_argument("--jobs", type=int, default=None)
    p.set_defaults(func=run_scan)

    for name in ("wigner",):
        p = sub.add_parser(name, help="Wigner function of one reduced field mode")
        _add_model_args(p)
        p.add_argument("--mode", required=True)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--qmax", type=float, default=None)
        p.add_argument("--points", type=int, default=None)
        p.set_defaults(func=run_wigner)

    for name in ("trajectory", "wigner-sweep"):
        p = sub.add_parser(name, help="ground states and Wigner functions along a segment")
        _add_model_args(p)
        p.add_argument("--start", type=_pair, required=True, metavar="A,B")
        p.add_argument("--end", type=_pair, required=True, metavar="A,B")
        p.add_argument("--samples", type=int, default=32)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--qmax", type=float, default=None)
        p.add_argument("--points", type=int, default=None)
        p.set_defaults(func=run_trajectory)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ParameterError, ValueError) as exc:
        print(f"gendicke {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SolverError, TruncationError, NumericalConsistencyError, ArithmeticError) as exc:
        print(f"gendicke {args.command}: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
