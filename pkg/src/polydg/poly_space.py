"""Discontinuous piecewise-polynomial spaces on polygonal meshes.

On each cell the basis is the scaled monomial family
``((x - x_K)/h_K)**a * ((y - y_K)/h_K)**b`` with ``a + b <= n``, ordered by
total degree and then by descending ``a``. Centering at the centroid and
scaling by the diameter keeps local mass matrices well conditioned
independently of the cell size.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .mesh import Mesh
from .quadrature import cell_quadrature

__all__ = [
    "exponents",
    "basis_dim",
    "LocalBasis",
    "DofMap",
    "DiscreteFunction",
    "basis_values",
    "basis_gradients",
    "eval",
    "eval_grad",
    "local_mass",
    "local_stiffness",
    "l2_project",
]


@lru_cache(maxsize=None)
def exponents(degree: int) -> np.ndarray:
    """Exponent pairs (a, b), shape (dim, 2)."""
    if degree < 0:
        raise ValueError("degree must be non-negative")
    out = [(t - b, b) for t in range(degree + 1) for b in range(t + 1)]
    arr = np.array(out, dtype=np.int64)
    arr.setflags(write=False)
    return arr


def basis_dim(degree: int) -> int:
    return (degree + 1) * (degree + 2) // 2


@dataclass(frozen=True)
class LocalBasis:
    cell: int
    degree: int
    center: tuple[float, float]
    scale: float

    @property
    def dim(self) -> int:
        return basis_dim(self.degree)

    def values(self, x, y) -> np.ndarray:
        pts = np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), -1)
        return basis_values(pts, np.array(self.center), self.scale, self.degree)

    def gradients(self, x, y) -> np.ndarray:
        pts = np.stack(np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float)), -1)
        return basis_gradients(pts, np.array(self.center), self.scale, self.degree)


def _powers(s: np.ndarray, degree: int) -> np.ndarray:
    out = np.ones(s.shape + (degree + 1,))
    for p in range(1, degree + 1):
        out[..., p] = out[..., p - 1] * s
    return out


def basis_values(points, center, scale, degree: int) -> np.ndarray:
    """Scaled monomials at ``points`` (..., 2) -> (..., dim).

    ``center`` (..., 2) and ``scale`` (...) broadcast against the points.
    """
    points = np.asarray(points, dtype=float)
    scale = np.asarray(scale, dtype=float)
    s = (points - center) / scale[..., None]
    e = exponents(degree)
    px, py = _powers(s[..., 0], degree), _powers(s[..., 1], degree)
    return px[..., e[:, 0]] * py[..., e[:, 1]]


def basis_gradients(points, center, scale, degree: int) -> np.ndarray:
    """Gradients of the scaled monomials -> (..., dim, 2)."""
    points = np.asarray(points, dtype=float)
    scale = np.asarray(scale, dtype=float)
    s = (points - center) / scale[..., None]
    e = exponents(degree)
    px, py = _powers(s[..., 0], degree), _powers(s[..., 1], degree)
    a, b = e[:, 0], e[:, 1]
    # a * s^(a-1); index clamped where a == 0 (coefficient kills it)
    dx = a * px[..., np.maximum(a - 1, 0)] * py[..., b]
    dy = b * px[..., a] * py[..., np.maximum(b - 1, 0)]
    return np.stack([dx, dy], axis=-1) / scale[..., None, None]


@dataclass(frozen=True)
class DofMap:
    """Contiguous per-cell dof blocks; no dofs are shared between cells."""

    n_cells: int
    degree: int

    @property
    def block(self) -> int:
        return basis_dim(self.degree)

    @property
    def offsets(self) -> np.ndarray:
        return np.arange(self.n_cells + 1) * self.block

    @property
    def n_dofs(self) -> int:
        return self.n_cells * self.block

    def cell_dofs(self, k: int) -> np.ndarray:
        return k * self.block + np.arange(self.block)


class DiscreteFunction:
    """Coefficient vector on ``V_h`` for a given mesh and degree."""

    def __init__(self, mesh: Mesh, degree: int, coeffs=None):
        self.mesh = mesh
        self.dofmap = DofMap(mesh.n_cells, degree)
        if coeffs is None:
            coeffs = np.zeros(self.dofmap.n_dofs)
        coeffs = np.asarray(coeffs, dtype=float).ravel()
        if coeffs.shape != (self.dofmap.n_dofs,):
            raise ValueError(
                f"expected {self.dofmap.n_dofs} coefficients, got {coeffs.size}"
            )
        self.coeffs = coeffs

    @property
    def degree(self) -> int:
        return self.dofmap.degree

    @property
    def cell_coeffs(self) -> np.ndarray:
        return self.coeffs.reshape(self.mesh.n_cells, self.dofmap.block)

    def local_basis(self, k: int) -> LocalBasis:
        _check_cell(self.mesh, k)
        return LocalBasis(k, self.degree, tuple(self.mesh.centroid[k]), float(self.mesh.diameter[k]))

    def values_at(self, points, cells) -> np.ndarray:
        """Trace values from the given cells at matching points (..., 2)."""
        cells = np.asarray(cells)
        phi = basis_values(points, self.mesh.centroid[cells], self.mesh.diameter[cells], self.degree)
        return np.einsum("...i,...i->...", phi, self.cell_coeffs[cells])

    def gradients_at(self, points, cells) -> np.ndarray:
        cells = np.asarray(cells)
        g = basis_gradients(points, self.mesh.centroid[cells], self.mesh.diameter[cells], self.degree)
        return np.einsum("...ij,...i->...j", g, self.cell_coeffs[cells])

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "n_cells": self.mesh.n_cells,
            "block": self.dofmap.block,
            "layout": "cell-major; per cell scaled monomials (x-xK)^a (y-yK)^b / hK^(a+b), "
                      "ordered by a+b then a descending",
            "coefficients": self.coeffs.tolist(),
        }

    def __repr__(self) -> str:
        return f"DiscreteFunction(n_cells={self.mesh.n_cells}, degree={self.degree})"


def _check_cell(mesh: Mesh, k) -> None:
    if not 0 <= k < mesh.n_cells:
        raise IndexError(f"cell id {k} out of range [0, {mesh.n_cells})")


def eval(df: DiscreteFunction, cell: int, point) -> float:  # noqa: A001
    """Value of ``df`` at ``point`` using the polynomial of ``cell``."""
    _check_cell(df.mesh, cell)
    return float(df.values_at(np.asarray(point, dtype=float), cell))


def eval_grad(df: DiscreteFunction, cell: int, point) -> tuple[float, float]:
    _check_cell(df.mesh, cell)
    g = df.gradients_at(np.asarray(point, dtype=float), cell)
    return float(g[0]), float(g[1])


def _volume_basis(mesh: Mesh, degree: int, order: int):
    pts, w, cell = cell_quadrature(mesh, order)
    phi = basis_values(pts, mesh.centroid[cell], mesh.diameter[cell], degree)
    return pts, w, cell, phi


def local_mass(mesh: Mesh, degree: int, order: int | None = None) -> np.ndarray:
    """Per-cell mass matrices, shape (n_cells, dim, dim)."""
    order = 2 * degree + 2 if order is None else order
    key = ("mass", degree, order)
    if key not in mesh._cache:
        _, w, cell, phi = _volume_basis(mesh, degree, order)
        nb = basis_dim(degree)
        contrib = np.einsum("p,pi,pj->pij", w, phi, phi).reshape(len(w), nb * nb)
        M = _segment_sum(contrib, cell, mesh.n_cells).reshape(-1, nb, nb)
        mesh._cache[key] = M
    return mesh._cache[key]


def local_stiffness(mesh: Mesh, degree: int, order: int | None = None) -> np.ndarray:
    """Per-cell stiffness matrices ``(grad phi_j, grad phi_i)_K``."""
    order = 2 * degree + 2 if order is None else order
    pts, w, cell = cell_quadrature(mesh, order)
    g = basis_gradients(pts, mesh.centroid[cell], mesh.diameter[cell], degree)
    nb = basis_dim(degree)
    contrib = np.einsum("p,pid,pjd->pij", w, g, g).reshape(len(w), nb * nb)
    return _segment_sum(contrib, cell, mesh.n_cells).reshape(-1, nb, nb)


def _segment_sum(values: np.ndarray, index: np.ndarray, n: int) -> np.ndarray:
    """Sum rows of ``values`` by ``index`` (fixed order, deterministic)."""
    out = np.zeros((n,) + values.shape[1:])
    for j in range(values.shape[1]):
        out[:, j] = np.bincount(index, weights=values[:, j], minlength=n)
    return out


def l2_project(f, mesh: Mesh, degree: int, order: int | None = None) -> DiscreteFunction:
    """Cellwise L2 projection of ``f(x, y)`` onto polynomials of ``degree``."""
    order = 2 * degree + 2 if order is None else order
    pts, w, cell, phi = _volume_basis(mesh, degree, order)
    fv = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float) * np.ones(len(w))
    b = _segment_sum((w * fv)[:, None] * phi, cell, mesh.n_cells)
    M = local_mass(mesh, degree, order)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        for k in range(mesh.n_cells):
            try:
                np.linalg.cholesky(M[k])
            except np.linalg.LinAlgError:
                raise np.linalg.LinAlgError(f"singular local mass matrix on cell {k}") from None
        raise
    y = np.linalg.solve(L, b[..., None])
    c = np.linalg.solve(np.swapaxes(L, -1, -2), y)[..., 0]
    return DiscreteFunction(mesh, degree, c.ravel())
