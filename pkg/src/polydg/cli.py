"""Command-line interface.

Exit codes: 0 success, 2 usage or input error, 3 solver failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path

from .analysis import NORMS
from .assembly import DGParams
from .mesh import MeshError, audit_shape, load_mesh, save_mesh
from .plotting import loglog_svg
from .problems import PROBLEMS
from .solver import NotPositiveDefiniteError
from .study import GENERATORS, SolverFailure, convergence_study, generate, solve_problem

EXIT_USAGE = 2
EXIT_SOLVER = 3


def _write_atomic(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {s!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {s!r}")
    return v


def _add_dg_args(p):
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--delta", type=int, choices=(-1, 0, 1), default=1)
    p.add_argument("--alpha", type=float, default=10.0)
    p.add_argument("--problem", choices=sorted(PROBLEMS), default="paper")
    p.add_argument("--tol", type=float, default=1e-10)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polydg", description="Interior penalty DG for the Poisson problem on polygonal meshes."
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a generated mesh as JSON")
    g.add_argument("family", choices=sorted(GENERATORS))
    g.add_argument("n", type=_positive_int)
    g.add_argument("out")

    s = sub.add_parser("solve", help="solve a manufactured problem on a mesh file")
    s.add_argument("mesh")
    s.add_argument("out")
    _add_dg_args(s)

    c = sub.add_parser("convergence", help="run a refinement study")
    c.add_argument("family", choices=sorted(GENERATORS))
    c.add_argument("levels", type=_positive_int, nargs="+")
    _add_dg_args(c)
    c.add_argument("--csv", dest="out_csv", required=True)
    c.add_argument("--svg", dest="out_svg")
    c.add_argument("--json", dest="out_json")

    a = sub.add_parser("audit", help="shape-regularity audit of a mesh file")
    a.add_argument("mesh")
    a.add_argument("out")
    return parser


def cmd_generate(args) -> int:
    mesh = generate(args.family, args.n)
    save_mesh(mesh, args.out)
    print(f"{args.family} n={args.n}: {mesh.n_cells} cells, {mesh.n_interior} interior + "
          f"{mesh.n_boundary} boundary interfaces, h={mesh.h:.6g}")
    return 0


def cmd_solve(args) -> int:
    mesh = load_mesh(args.mesh)
    params = DGParams(delta=args.delta, alpha=args.alpha, degree=args.degree)
    result = {
        "mesh": {"path": str(args.mesh), "cells": mesh.n_cells, "h": mesh.h},
        "params": {"degree": params.degree, "delta": params.delta, "alpha": params.alpha,
                   "problem": args.problem, "tol": args.tol},
    }
    try:
        uh, report, err = solve_problem(mesh, params, args.problem, args.tol)
    except NotPositiveDefiniteError as exc:
        result["solver"] = {"converged": False, "method": "cg", "error": str(exc)}
        _write_atomic(args.out, json.dumps(result, indent=2))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    result["solver"] = report.to_dict()
    result["errors"] = {"l2": err.l2, "h1_broken": err.h1_broken, "energy": err.energy}
    result["solution"] = uh.to_dict()
    _write_atomic(args.out, json.dumps(result, indent=2))
    print(f"{report.method}: {report.iterations} iterations, residual {report.residual:.2e}; "
          f"L2 {err.l2:.4e}  H1 {err.h1_broken:.4e}  energy {err.energy:.4e}")
    if not report.converged:
        print("error: solver did not converge", file=sys.stderr)
        return EXIT_SOLVER
    return 0


def cmd_convergence(args) -> int:
    params = DGParams(delta=args.delta, alpha=args.alpha, degree=args.degree)
    try:
        rep = convergence_study(args.family, args.levels, params, args.problem, args.tol)
    except (SolverFailure, NotPositiveDefiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    rep.write_csv(args.out_csv)
    if args.out_svg:
        h = [lv.h for lv in rep.levels]
        svg = loglog_svg(
            h,
            {"L2 error": [lv.errors.l2 for lv in rep.levels],
             "H1 error": [lv.errors.h1_broken for lv in rep.levels]},
            title=f"{args.family}, P{args.degree}, problem {args.problem}",
        )
        _write_atomic(args.out_svg, svg)
    if args.out_json:
        _write_atomic(args.out_json, json.dumps(rep.to_dict(), indent=2))
    for row in rep.rows():
        print(", ".join(f"{k}={v}" for k, v in row.items()))
    print("fitted rates: " + ", ".join(f"{k}={rep.fitted[k]:.4f}" for k in NORMS))
    return 0


def cmd_audit(args) -> int:
    mesh = load_mesh(args.mesh)
    report = audit_shape(mesh)
    _write_atomic(args.out, json.dumps(report.to_dict(), indent=2))
    print(f"rho_v={report.rho_v:.4g} kappa={report.kappa:.4g} sigma*={report.sigma_star:.4g} "
          f"theta0={report.theta0:.4g} a4_proxy={report.a4_overlap_proxy}")
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "solve": cmd_solve,
    "convergence": cmd_convergence,
    "audit": cmd_audit,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, ValueError, MeshError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
