"""Krylov solvers with block-Jacobi preconditioning."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = ["SolveReport", "NotPositiveDefiniteError", "BlockJacobi", "solve", "cg", "bicgstab"]

logger = logging.getLogger(__name__)


class NotPositiveDefiniteError(ArithmeticError):
    """CG met a direction of non-positive curvature."""


@dataclass
class SolveReport:
    x: np.ndarray
    iterations: int
    residual: float
    converged: bool
    method: str
    iterated_residual: float = float("nan")

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "relative_residual": self.residual,
            "iterated_residual": self.iterated_residual,
            "converged": self.converged,
            "method": self.method,
        }


class BlockJacobi:
    """Exact inverses of the ``block x block`` diagonal blocks of ``A``."""

    def __init__(self, A: sp.spmatrix, block: int):
        n = A.shape[0]
        if n % block:
            raise ValueError(f"matrix size {n} is not a multiple of block size {block}")
        self.block = block
        coo = A.tocoo()
        r, c = coo.row, coo.col
        keep = r // block == c // block
        blocks = np.zeros((n // block, block, block))
        np.add.at(blocks, (r[keep] // block, r[keep] % block, c[keep] % block), coo.data[keep])
        try:
            self.inv = np.linalg.inv(blocks)
        except np.linalg.LinAlgError:
            self.inv = np.linalg.pinv(blocks)
        nblk = n // block
        self._op = sp.bsr_matrix(
            (self.inv, np.arange(nblk), np.arange(nblk + 1)), shape=(n, n)
        )

    def __call__(self, r: np.ndarray) -> np.ndarray:
        return self._op @ r


def cg(A, b, M, tol: float, maxit: int, x0=None) -> SolveReport:
    """Preconditioned conjugate gradients.

    Raises
    ------
    NotPositiveDefiniteError
        If ``p^T A p <= 0`` (or the preconditioned residual has non-positive
        inner product), which rules out a symmetric positive definite ``A``.
    """
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True, "cg", 0.0)
    r = b - A @ x
    z = M(r)
    p = z.copy()
    rz = r @ z
    it = 0
    rel = np.linalg.norm(r) / bnorm
    while rel > tol and it < maxit:
        if rz <= 0.0:
            raise NotPositiveDefiniteError(
                "matrix not positive definite: indefinite diagonal block "
                "(penalty alpha is likely below the coercivity threshold)"
            )
        Ap = A @ p
        pAp = p @ Ap
        if pAp <= 0.0:
            raise NotPositiveDefiniteError(
                f"matrix not positive definite: p^T A p = {pAp:.3e} at iteration {it} "
                "(penalty alpha is likely below the coercivity threshold)"
            )
        step = rz / pAp
        x += step * p
        r -= step * Ap
        it += 1
        rel = np.linalg.norm(r) / bnorm
        if rel <= tol:
            # guard against drift of the recursive residual
            r = b - A @ x
            rel = np.linalg.norm(r) / bnorm
            if rel <= tol:
                break
        z = M(r)
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    true_rel = np.linalg.norm(b - A @ x) / bnorm
    return SolveReport(x, it, float(true_rel), bool(true_rel <= tol), "cg", float(rel))


def bicgstab(A, b, M, tol: float, maxit: int, x0=None) -> SolveReport:
    """Right-preconditioned BiCGStab."""
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    if bnorm == 0.0:
        return SolveReport(np.zeros_like(b), 0, 0.0, True, "bicgstab", 0.0)
    r = b - A @ x
    rhat = r.copy()
    rho = alpha = omega = 1.0
    v = np.zeros_like(b)
    p = np.zeros_like(b)
    it = 0
    rel = np.linalg.norm(r) / bnorm
    while rel > tol and it < maxit:
        rho_new = rhat @ r
        if rho_new == 0.0:
            rhat = r.copy()
            rho_new = rhat @ r
            p[:] = 0.0
            v[:] = 0.0
            rho = alpha = omega = 1.0
        beta = (rho_new / rho) * (alpha / omega)
        rho = rho_new
        p = r + beta * (p - omega * v)
        phat = M(p)
        v = A @ phat
        alpha = rho / (rhat @ v)
        s = r - alpha * v
        it += 1
        if np.linalg.norm(s) / bnorm <= tol:
            x += alpha * phat
            r = s
            rel = np.linalg.norm(r) / bnorm
            break
        shat = M(s)
        t = A @ shat
        tt = t @ t
        omega = (t @ s) / tt if tt > 0 else 0.0
        x += alpha * phat + omega * shat
        r = s - omega * t
        rel = np.linalg.norm(r) / bnorm
        if omega == 0.0:
            break
        if rel <= tol:
            r = b - A @ x
            rel = np.linalg.norm(r) / bnorm
    true_rel = np.linalg.norm(b - A @ x) / bnorm
    return SolveReport(x, it, float(true_rel), bool(true_rel <= tol), "bicgstab", float(rel))


def solve(system, tol: float = 1e-10, maxit: int | None = None, x0=None) -> SolveReport:
    """Solve ``system.matrix x = system.rhs``.

    CG is used when ``system.symmetric`` is set, BiCGStab otherwise. The
    preconditioner inverts the per-cell diagonal blocks (block size from the
    system's dof map, 1 when there is none). Running out of iterations yields
    a report with ``converged=False`` rather than an exception.
    """
    A = sp.csr_matrix(system.matrix)
    b = np.asarray(system.rhs, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n) or b.shape != (n,):
        raise ValueError(f"incompatible system: matrix {A.shape}, rhs {b.shape}")
    if not 0.0 < tol < 1.0:
        raise ValueError(f"tol must lie in (0, 1), got {tol!r}")
    maxit = 10 * n if maxit is None else int(maxit)
    if maxit < 1:
        raise ValueError("maxit must be >= 1")
    dofmap = getattr(system, "dofmap", None)
    M = BlockJacobi(A, dofmap.block if dofmap is not None else 1)
    run = cg if system.symmetric else bicgstab
    report = run(A, b, M, tol, maxit, x0)
    logger.debug("%s: %d iterations, residual %.3e", report.method, report.iterations, report.residual)
    return report
