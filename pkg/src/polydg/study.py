"""Generate -> assemble -> solve -> measure, over a refinement sequence."""
from __future__ import annotations

import logging

from .analysis import ConvergenceReport, Level, errors, fit_rates
from .assembly import DGParams, assemble
from .mesh import generate_dual_hex, generate_hybrid
from .poly_space import DiscreteFunction
from .problems import Problem, get_problem
from .solver import SolveReport, solve

__all__ = ["GENERATORS", "generate", "solve_problem", "convergence_study", "SolverFailure"]

logger = logging.getLogger(__name__)

GENERATORS = {"hybrid": generate_hybrid, "dualhex": generate_dual_hex}


class SolverFailure(RuntimeError):
    """The Krylov solver did not reach the requested tolerance."""

    def __init__(self, message: str, report: SolveReport | None = None):
        super().__init__(message)
        self.report = report


def generate(family: str, n: int):
    try:
        gen = GENERATORS[family]
    except KeyError:
        raise ValueError(f"unknown mesh family {family!r}; choose from {sorted(GENERATORS)}") from None
    return gen(n)


def solve_problem(mesh, params: DGParams, problem: Problem | str, tol: float = 1e-10):
    """Return ``(DiscreteFunction, SolveReport, ErrorTriple)`` for one mesh."""
    if isinstance(problem, str):
        problem = get_problem(problem)
    system = assemble(mesh, params, problem.f, problem.g)
    report = solve(system, tol=tol)
    uh = DiscreteFunction(mesh, params.degree, report.x)
    err = errors(uh, problem.u, problem.grad, alpha=params.alpha)
    return uh, report, err


def convergence_study(family: str, levels, params: DGParams, problem: Problem | str,
                      tol: float = 1e-10) -> ConvergenceReport:
    """Solve on ``generate(family, n)`` for each ``n`` and fit rates in ``h``.

    ``h`` is the maximum cell diameter of each generated mesh.
    """
    levels = [int(n) for n in levels]
    if len(levels) < 2:
        raise ValueError("a convergence study needs at least two levels")
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must strictly decrease h (strictly increasing n)")
    records = []
    for n in levels:
        mesh = generate(family, n)
        uh, report, err = solve_problem(mesh, params, problem, tol)
        if not report.converged:
            raise SolverFailure(f"solver did not converge on level n={n}", report)
        logger.info("%s n=%d: %d cells, %d iterations, %s", family, n, mesh.n_cells,
                    report.iterations, err)
        records.append(Level(mesh.h, mesh.n_cells, uh.dofmap.n_dofs, err, report.iterations))
    return fit_rates(records)
