"""scikit-learn style front end.

``IPDGPoisson`` follows the estimator protocol: hyperparameters go to
``__init__`` untouched, ``fit`` consumes a mesh and the problem data and sets
trailing-underscore attributes, ``predict`` evaluates the discrete solution at
points. ``L2Projector`` does the same for the cellwise L2 projection.
"""
from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_array, check_is_fitted

from .analysis import ErrorTriple, errors
from .assembly import DGParams, assemble
from .mesh import Mesh, _orient
from .poly_space import DiscreteFunction, l2_project
from .solver import solve

__all__ = ["IPDGPoisson", "L2Projector", "check_mesh", "locate_cells"]


def check_mesh(mesh) -> Mesh:
    if not isinstance(mesh, Mesh):
        raise TypeError(f"expected a polydg Mesh, got {type(mesh).__name__}")
    if mesh.n_cells == 0:
        raise ValueError("mesh has no cells")
    return mesh


def _check_points(X) -> np.ndarray:
    X = check_array(X, dtype=float, input_name="X")
    if X.shape[1] != 2:
        raise ValueError(f"points must have shape (n_points, 2), got {X.shape}")
    return X


def locate_cells(mesh: Mesh, X) -> np.ndarray:
    """Index of a cell containing each point (-1 when outside the mesh)."""
    X = np.asarray(X, dtype=float).reshape(-1, 2)
    out = np.full(len(X), -1)
    tree = cKDTree(mesh.centroid)
    k = min(12, mesh.n_cells)
    _, cand = tree.query(X, k=k)
    cand = cand.reshape(len(X), k)
    tol = mesh.tol
    for j in range(k):
        todo = np.flatnonzero(out < 0)
        if len(todo) == 0:
            break
        for i in todo:
            c = cand[i, j]
            pts = mesh.cell_coords(c)
            if np.all(_orient(pts, np.roll(pts, -1, axis=0), X[i]) >= -tol * mesh.diameter[c]):
                out[i] = c
    return out


class IPDGPoisson(BaseEstimator):
    """Interior penalty DG solver for ``-laplace(u) = f`` with ``u = g`` on the boundary.

    Parameters
    ----------
    degree : int
        Polynomial degree on every cell.
    delta : {1, 0, -1}
        Symmetric, incomplete or nonsymmetric variant.
    alpha : float
        Penalty parameter.
    tol : float
        Relative residual tolerance of the Krylov solver.
    maxit : int or None
        Iteration cap; ``None`` means ten times the number of unknowns.
    """

    def __init__(self, degree=1, delta=1, alpha=10.0, tol=1e-10, maxit=None):
        self.degree = degree
        self.delta = delta
        self.alpha = alpha
        self.tol = tol
        self.maxit = maxit

    def _params(self) -> DGParams:
        return DGParams(delta=self.delta, alpha=float(self.alpha), degree=int(self.degree))

    def fit(self, mesh, f, g=None):
        mesh = check_mesh(mesh)
        params = self._params()
        self.system_ = assemble(mesh, params, f, g)
        self.report_ = solve(self.system_, tol=self.tol, maxit=self.maxit)
        self.mesh_ = mesh
        self.solution_ = DiscreteFunction(mesh, params.degree, self.report_.x)
        self.n_dofs_ = self.system_.n
        return self

    def predict(self, X):
        check_is_fitted(self, "solution_")
        X = _check_points(X)
        cells = locate_cells(self.mesh_, X)
        if np.any(cells < 0):
            raise ValueError(f"{int((cells < 0).sum())} point(s) lie outside the mesh")
        return self.solution_.values_at(X, cells)

    def errors(self, u, grad_u) -> ErrorTriple:
        check_is_fitted(self, "solution_")
        return errors(self.solution_, u, grad_u, alpha=float(self.alpha))

    def score(self, u, grad_u) -> float:
        """Negative L2 error against an exact solution (greater is better)."""
        return -self.errors(u, grad_u).l2


class L2Projector(BaseEstimator):
    """Cellwise L2 projection of a field onto piecewise polynomials."""

    def __init__(self, degree=1):
        self.degree = degree

    def fit(self, mesh, f):
        self.mesh_ = check_mesh(mesh)
        self.projection_ = l2_project(f, mesh, int(self.degree))
        return self

    def transform(self, X):
        check_is_fitted(self, "projection_")
        X = _check_points(X)
        cells = locate_cells(self.mesh_, X)
        if np.any(cells < 0):
            raise ValueError(f"{int((cells < 0).sum())} point(s) lie outside the mesh")
        return self.projection_.values_at(X, cells)
