"""Error norms, convergence-rate fitting and discrete theory constants."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .mesh import Mesh
from .poly_space import DiscreteFunction, basis_dim, local_mass, local_stiffness
from .quadrature import cell_quadrature, edge_quadrature

__all__ = [
    "ErrorTriple",
    "Level",
    "ConvergenceReport",
    "ConstantsReport",
    "errors",
    "energy_norm",
    "fit_rates",
    "inverse_constant",
    "inverse_constants",
    "penalty_threshold",
    "constants_report",
    "coercivity_sample",
    "boundedness_sample",
    "NORMS",
]

NORMS = ("l2", "h1_broken", "energy")
ERROR_ORDER = 7


@dataclass(frozen=True)
class ErrorTriple:
    l2: float
    h1_broken: float
    energy: float


def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _zero_grad(x, y):
    return np.zeros(np.broadcast(x, y).shape + (2,))


def errors(uh: DiscreteFunction, u=None, grad_u=None, alpha: float = 10.0,
           order: int = ERROR_ORDER) -> ErrorTriple:
    """L2, broken H1 and energy norms of ``u - uh``.

    ``u(x, y)`` and ``grad_u(x, y)`` (returning ``(..., 2)``) describe a
    continuous exact solution, so its own jumps are zero; omit both to get the
    norms of ``uh`` itself.
    """
    u = _zero if u is None else u
    grad_u = _zero_grad if grad_u is None else grad_u
    mesh = uh.mesh
    pts, w, cell = cell_quadrature(mesh, order)
    x, y = pts[:, 0], pts[:, 1]
    ev = np.asarray(u(x, y), dtype=float) - uh.values_at(pts, cell)
    eg = np.asarray(grad_u(x, y), dtype=float) - uh.gradients_at(pts, cell)
    l2sq = float(np.dot(w, ev * ev))
    h1sq = float(np.dot(w, (eg * eg).sum(-1)))

    epts, ew = edge_quadrature(mesh, order)
    k1, k2 = mesh.iface_cells[:, 0], mesh.iface_cells[:, 1]
    inner = k2 >= 0
    ex, ey = epts[..., 0], epts[..., 1]
    kk1 = np.broadcast_to(k1[:, None], ex.shape)
    g_exact = np.asarray(grad_u(ex, ey), dtype=float)
    v1 = uh.values_at(epts, kk1)
    g1 = uh.gradients_at(epts, kk1)
    kk2 = np.broadcast_to(np.where(inner, k2, k1)[:, None], ex.shape)
    v2 = uh.values_at(epts, kk2)
    g2 = uh.gradients_at(epts, kk2)
    avg = np.where(inner[:, None, None], 0.5 * (g1 + g2), g1)
    avg_err = g_exact - avg
    # [u - uh]: interior -> -(v1 - v2) n, boundary -> (u - v1) n
    jump = np.where(inner[:, None], v1 - v2, np.asarray(u(ex, ey), dtype=float) - v1)
    he = mesh.iface_length
    avg_sq = float((he[:, None] * ew * (avg_err * avg_err).sum(-1)).sum())
    jump_sq = float(((ew / he[:, None]) * jump * jump).sum())
    energy_sq = h1sq + avg_sq + alpha * jump_sq
    return ErrorTriple(math.sqrt(l2sq), math.sqrt(h1sq), math.sqrt(energy_sq))


def energy_norm(v: DiscreteFunction, alpha: float, order: int | None = None) -> float:
    order = 2 * v.degree + 2 if order is None else order
    return errors(v, alpha=alpha, order=order).energy


# ----------------------------------------------------------------- rates


@dataclass
class Level:
    h: float
    cells: int
    dofs: int
    errors: ErrorTriple
    iterations: int = 0


@dataclass
class ConvergenceReport:
    levels: list
    pairwise: dict
    fitted: dict
    excluded: dict = field(default_factory=dict)

    CSV_COLUMNS = ("h", "cells", "dofs", "e_L2", "e_H1", "e_energy",
                   "rate_L2", "rate_H1", "rate_energy", "iters")

    def rows(self) -> list[dict]:
        out = []
        for i, lv in enumerate(self.levels):
            def rate(norm):
                return "" if i == 0 else f"{self.pairwise[norm][i - 1]:.6f}"
            out.append({
                "h": f"{lv.h:.10g}",
                "cells": lv.cells,
                "dofs": lv.dofs,
                "e_L2": f"{lv.errors.l2:.10e}",
                "e_H1": f"{lv.errors.h1_broken:.10e}",
                "e_energy": f"{lv.errors.energy:.10e}",
                "rate_L2": rate("l2"),
                "rate_H1": rate("h1_broken"),
                "rate_energy": rate("energy"),
                "iters": lv.iterations,
            })
        return out

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=self.CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(self.rows())

    def to_dict(self) -> dict:
        return {
            "levels": [asdict(lv) for lv in self.levels],
            "pairwise": self.pairwise,
            "fitted": self.fitted,
            "excluded": self.excluded,
        }


def _slope(h, e):
    return float(np.polyfit(np.log(h), np.log(e), 1)[0])


def fit_rates(levels) -> ConvergenceReport:
    """Pairwise and least-squares rates for each norm.

    ``levels`` holds :class:`Level` records, or ``(h, ErrorTriple)`` pairs.
    Levels with a zero error are left out of that norm's fit and listed in
    ``excluded``.
    """
    levels = [lv if isinstance(lv, Level) else Level(lv[0], 0, 0, lv[1]) for lv in levels]
    if len(levels) < 2:
        raise ValueError("rate fitting needs at least two levels")
    hs = np.array([lv.h for lv in levels], dtype=float)
    if np.any(np.diff(hs) >= 0):
        raise ValueError("levels must strictly decrease h")
    pairwise, fitted, excluded = {}, {}, {}
    for norm in NORMS:
        e = np.array([getattr(lv.errors, norm) for lv in levels], dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            pairwise[norm] = (np.log(e[:-1] / e[1:]) / np.log(hs[:-1] / hs[1:])).tolist()
        ok = e > 0
        excluded[norm] = np.flatnonzero(~ok).tolist()
        fitted[norm] = _slope(hs[ok], e[ok]) if ok.sum() >= 2 else float("nan")
    return ConvergenceReport(levels, pairwise, fitted, excluded)


# ------------------------------------------------------------- constants


def inverse_constants(mesh: Mesh, degree: int, tol: float = 1e-10, maxiter: int = 10000) -> np.ndarray:
    """Per-cell ``C_I = h_K sqrt(lambda_max)`` for stiffness vs mass on ``V_K``.

    ``lambda_max`` comes from shifted power iteration on ``M^-1 S``. The
    spectrum is non-negative (constants give 0); shifting down by half the
    mean eigenvalue, which is at most ``lambda_max / 2``, keeps the top
    eigenvalue dominant while damping the rest.
    """
    if degree == 0:
        return np.zeros(mesh.n_cells)
    order = 2 * degree + 2
    M = local_mass(mesh, degree, order)
    S = local_stiffness(mesh, degree, order)
    L = np.linalg.cholesky(M)
    Linv = np.linalg.inv(L)
    # symmetric form C = L^-1 S L^-T shares the generalized eigenvalues
    C = Linv @ S @ np.swapaxes(Linv, -1, -2)
    C = 0.5 * (C + np.swapaxes(C, -1, -2))
    nb = basis_dim(degree)
    shift = -0.5 * np.trace(C, axis1=-2, axis2=-1) / nb
    B = C + shift[:, None, None] * np.eye(nb)
    x = np.ones((mesh.n_cells, nb)) + 0.1 * np.arange(nb)
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    lam = np.zeros(mesh.n_cells)
    for _ in range(maxiter):
        y = np.einsum("kij,kj->ki", B, x)
        lam_new = np.einsum("ki,ki->k", x, y) - shift
        x = y / np.linalg.norm(y, axis=1, keepdims=True)
        done = np.abs(lam_new - lam) <= tol * np.maximum(np.abs(lam_new), 1e-300)
        lam = lam_new
        if np.all(done):
            break
    else:
        raise ArithmeticError("power iteration for the inverse constant stagnated")
    return mesh.diameter * np.sqrt(np.maximum(lam, 0.0))


def inverse_constant(vertices, degree: int, tol: float = 1e-10) -> float:
    """Inverse-inequality constant for a single polygon."""
    from .mesh import build_mesh

    pts = np.asarray(vertices, dtype=float)
    mesh = build_mesh(pts, [list(range(len(pts)))])
    return float(inverse_constants(mesh, degree, tol)[0])


def penalty_threshold(C_T: float, C_I: float, delta: int, C: float) -> float:
    """Smallest penalty guaranteeing coercivity: ``(1+d)^2 C_T (1+C_I)^2 / (4 (1-C)^2)``."""
    if not 0.0 < C < 1.0:
        raise ValueError(f"C must lie in (0, 1), got {C!r}")
    if C_T <= 0 or C_I < 0:
        raise ValueError("C_T must be positive and C_I non-negative")
    if delta not in (-1, 0, 1):
        raise ValueError(f"delta must be -1, 0 or 1, got {delta!r}")
    C1 = C_T * (1.0 + C_I) ** 2
    return (1.0 + delta) ** 2 * C1 / (4.0 * (1.0 - C) ** 2)


@dataclass
class ConstantsReport:
    """``alpha_min`` is a heuristic bound: ``C_T`` is supplied, not computed."""

    C_I: list
    C_I_max: float
    C_T: float
    C1: float
    delta: int
    C: float
    alpha_min: float
    heuristic: bool = True


def constants_report(mesh: Mesh, degree: int, delta: int = 1, C_T: float = 10.0,
                     C: float = 0.5) -> ConstantsReport:
    ci = inverse_constants(mesh, degree)
    cmax = float(ci.max())
    return ConstantsReport(
        C_I=ci.tolist(),
        C_I_max=cmax,
        C_T=C_T,
        C1=C_T * (1.0 + cmax) ** 2,
        delta=delta,
        C=C,
        alpha_min=penalty_threshold(C_T, cmax, delta, C),
    )


def _jump_energy(v: DiscreteFunction, alpha: float) -> tuple[float, float]:
    """(broken H1 squared, alpha * sum h_e^-1 |[v]|^2) of a discrete function."""
    e = errors(v, alpha=alpha, order=2 * v.degree + 2)
    no_jump = errors(v, alpha=0.0, order=2 * v.degree + 2)
    return e.h1_broken**2, e.energy**2 - no_jump.energy**2


def coercivity_sample(mesh: Mesh, params, matrix=None, samples: int = 100, seed: int = 0) -> dict:
    """Observed ``min A(v,v) / (|v|_1,h^2 + alpha sum h_e^-1 |[v]|^2)`` over random ``v``."""
    from .assembly import assemble

    if matrix is None:
        matrix = assemble(mesh, params, _zero).matrix
    rng = np.random.default_rng(seed)
    ratios = []
    for _ in range(samples):
        v = DiscreteFunction(mesh, params.degree, rng.standard_normal(matrix.shape[0]))
        avv = float(v.coeffs @ (matrix @ v.coeffs))
        h1sq, jsq = _jump_energy(v, params.alpha)
        ratios.append(avv / (h1sq + jsq))
    ratios = np.array(ratios)
    return {"min_ratio": float(ratios.min()), "all_positive": bool(np.all(ratios > 0))}


def boundedness_sample(mesh: Mesh, params, samples: int = 100, seed: int = 0,
                       matrix=None) -> dict:
    """Max of ``|A(u,v)| / (|||u||| |||v|||)`` against the bound ``(1+alpha)/alpha``."""
    from .assembly import assemble

    if matrix is None:
        matrix = assemble(mesh, params, _zero).matrix
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        u = DiscreteFunction(mesh, params.degree, rng.standard_normal(matrix.shape[0]))
        v = DiscreteFunction(mesh, params.degree, rng.standard_normal(matrix.shape[0]))
        a = abs(float(v.coeffs @ (matrix @ u.coeffs)))
        worst = max(worst, a / (energy_norm(u, params.alpha) * energy_norm(v, params.alpha)))
    bound = (1.0 + params.alpha) / params.alpha
    return {"max_ratio": worst, "bound": bound, "holds": worst <= bound}

