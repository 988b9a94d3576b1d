"""Command-line front end.

Subcommands:

``converge``
    Run a convergence ladder described by a ``key = value`` config file and
    write the per-rung CSV plus the fitted-rate summary.
``solve-dirichlet``
    Solve the polyharmonic Dirichlet problem for a named data function and
    dump the solution on an interior probe grid.
``approximate``
    Build the quasi-interpolant of a target at one fill distance and dump
    its centers, coefficients, and polynomial part.
``extend``
    Evaluate the global finite-energy extension of a target at explicit
    points or along a ray.
``check-symbols``
    Print the principal symbol matrix of the boundary system and its
    determinant (a singular matrix would make the solver unusable).

All CSV output is UTF-8 with LF line endings and a header row.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .dirichlet import principal_symbol_matrix, solve_dirichlet
from .geometry import curve_from_spec, generate_centers, oversample_boundary
from .harness import ExperimentConfig, converge
from .kernel import SplineParams
from .scheme import (
    ExtensionField,
    assemble_TXi,
    eval_approximant,
    probe_points,
    scheme_grids,
)
from .targets import named_target

__all__ = ["main"]


def _write_csv(path, header: str, rows) -> None:
    lines = [header]
    lines += [",".join(repr(float(v)) for v in row) for row in rows]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def _cmd_converge(args) -> int:
    config = ExperimentConfig.from_file(args.config)
    report = converge(config, verbose=not args.quiet)
    main_csv, rates_csv = report.write()
    for warning in report.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    if not args.quiet:
        for p, rate in report.rates.items():
            print(f"fitted l{p} rate: {rate:.3f}")
    print(f"wrote {main_csv} and {rates_csv}")
    return 0 if all(r.ok for r in report.rungs) else 1


def _cmd_solve_dirichlet(args) -> int:
    curve = curve_from_spec(args.curve)
    params = SplineParams(m=args.m, d=2)
    f = named_target(args.data, args.m)
    from .geometry import BoundaryGrid

    grid = BoundaryGrid.build(curve, args.n)
    sol = solve_dirichlet(params, grid, f)
    probes = probe_points(curve, args.probe_grid, args.margin)
    u = sol.evaluate(probes)
    fp = f(probes)
    rows = np.column_stack([probes, u, fp, np.abs(u - fp)])
    _write_csv(args.output, "x,y,u,data_fn,abs_diff", rows)
    print(
        f"solved {args.curve} m={args.m} n={args.n}; "
        f"max |u - data_fn| over probes: {np.max(np.abs(u - fp)):.3e} "
        "(equals the solver error only for polyharmonic data)"
    )
    print(f"wrote {args.output}")
    return 0


def _cmd_approximate(args) -> int:
    curve = curve_from_spec(args.curve)
    params = SplineParams(m=args.m, d=2)
    f = named_target(args.target, args.m)
    centers = generate_centers(curve, args.h, seed=args.seed)
    if args.oversample is not None:
        centers = oversample_boundary(curve, centers, args.h, args.oversample, args.m)
    grids = scheme_grids(curve, args.h, nu=args.oversample, n_solver=args.n)
    apx = assemble_TXi(f, centers, grids, oversample=args.oversample, params=params)
    apx.save_csv(args.output)
    if args.centers:
        centers.save_csv(args.centers)
        print(f"wrote centers to {args.centers}")
    if args.probe_grid:
        probes = probe_points(curve, args.probe_grid, 0.0)
        err = np.max(np.abs(eval_approximant(apx, probes) - f(probes)))
        print(f"max probe error: {err:.3e}")
    print(f"wrote {args.output}")
    return 0


def _parse_points(spec: str) -> np.ndarray:
    pts = []
    for tok in spec.split(";"):
        x, y = tok.split(",")
        pts.append((float(x), float(y)))
    return np.asarray(pts)


def _ray_points(spec: str) -> np.ndarray:
    theta, r0, r1, count = spec.split(",")
    radii = np.geomspace(float(r0), float(r1), int(count))
    direction = np.array([np.cos(float(theta)), np.sin(float(theta))])
    return radii[:, None] * direction


def _cmd_extend(args) -> int:
    curve = curve_from_spec(args.curve)
    params = SplineParams(m=args.m, d=2)
    f = named_target(args.target, args.m)
    if args.points:
        pts = _parse_points(args.points)
    elif args.ray:
        pts = _ray_points(args.ray)
    else:
        print("error: provide --points or --ray", file=sys.stderr)
        return 2
    grids = scheme_grids(curve, args.h, n_solver=args.n)
    field = ExtensionField(params, grids, f)
    vals = field(pts)
    rows = np.column_stack([pts, np.atleast_1d(vals)])
    if args.output:
        _write_csv(args.output, "x,y,value", rows)
        print(f"wrote {args.output}")
    else:
        print("x,y,value")
        for x, y, v in rows:
            print(f"{float(x)!r},{float(y)!r},{float(v)!r}")
    return 0


def _cmd_check_symbols(args) -> int:
    sigma = principal_symbol_matrix(args.m)
    det = float(np.linalg.det(sigma))
    print(f"principal symbol matrix, m={args.m}:")
    for row in sigma:
        print("  " + "  ".join(f"{v: .6g}" for v in row))
    print(f"determinant: {det:.6g}")
    if abs(det) < 1e-12:
        print("SINGULAR: layer representation would not be solvable", file=sys.stderr)
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="surfspline",
        description="Surface-spline approximation on smooth planar domains.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("converge", help="run a convergence ladder from a config")
    p.add_argument("--config", required=True, help="key = value config file")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=_cmd_converge)

    p = sub.add_parser("solve-dirichlet", help="solve the boundary-value problem")
    p.add_argument("--curve", default="disk", help="disk | circle:r | ellipse:a,b | star:eps[,arms]")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=256, help="boundary nodes")
    p.add_argument("--data", default="harmonic3", help="named data function")
    p.add_argument("--probe-grid", type=int, default=32)
    p.add_argument("--margin", type=float, default=0.02)
    p.add_argument("--output", default="dirichlet.csv")
    p.set_defaults(func=_cmd_solve_dirichlet)

    p = sub.add_parser("approximate", help="build a quasi-interpolant")
    p.add_argument("--curve", default="disk")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--h", type=float, default=0.1, help="target fill distance")
    p.add_argument("--target", default="expx")
    p.add_argument("--oversample", type=float, default=None, help="boundary exponent nu")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=256, help="solver boundary nodes")
    p.add_argument("--output", default="approximant.csv")
    p.add_argument("--centers", default=None, help="also write the center set here")
    p.add_argument("--probe-grid", type=int, default=0, help="report max error on this grid")
    p.set_defaults(func=_cmd_approximate)

    p = sub.add_parser("extend", help="evaluate the global extension")
    p.add_argument("--curve", default="disk")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--target", default="expx")
    p.add_argument("--h", type=float, default=0.1)
    p.add_argument("--n", type=int, default=256)
    p.add_argument("--points", default=None, help='semicolon-separated "x,y" pairs')
    p.add_argument("--ray", default=None, help='"theta,r0,r1,count" geometric ray')
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_extend)

    p = sub.add_parser("check-symbols", help="print the principal symbol matrix")
    p.add_argument("--m", type=int, default=2)
    p.set_defaults(func=_cmd_check_symbols)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
