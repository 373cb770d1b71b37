"""Interior penalty DG assembly for the Poisson problem.

The bilinear form is

    A(u, v) = sum_K (grad u, grad v)_K
              - sum_e <{grad u}, [v]>_e - delta sum_e <{grad v}, [u]>_e
              + alpha sum_e h_e^-1 <[u], [v]>_e

summed over all interfaces including boundary segments, where the average is
one-sided and the jump is ``v n_K`` on the boundary. Dirichlet data ``g`` enters
the right-hand side through the boundary jump terms.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import Mesh
from .poly_space import (
    DiscreteFunction,
    DofMap,
    basis_gradients,
    basis_values,
    local_stiffness,
)
from .quadrature import cell_quadrature, edge_quadrature, integrate_cell, integrate_edge

__all__ = ["DGParams", "SparseSystem", "assemble", "apply_bilinear", "default_orders"]


@dataclass(frozen=True)
class DGParams:
    """``delta`` selects SIPG (1), IIPG (0) or NIPG (-1); ``alpha`` is the penalty."""

    delta: int = 1
    alpha: float = 10.0
    degree: int = 1

    def __post_init__(self):
        if self.delta not in (-1, 0, 1):
            raise ValueError(f"delta must be -1, 0 or 1, got {self.delta!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha!r}")
        if int(self.degree) != self.degree or self.degree < 0:
            raise ValueError(f"degree must be a non-negative integer, got {self.degree!r}")


@dataclass
class SparseSystem:
    matrix: sp.csr_matrix
    rhs: np.ndarray
    symmetric: bool
    dofmap: DofMap | None = None
    mesh: Mesh | None = None
    params: DGParams | None = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def from_matrix(cls, matrix, rhs, symmetric: bool | None = None) -> "SparseSystem":
        A = sp.csr_matrix(matrix, dtype=float)
        if symmetric is None:
            d = abs(A - A.T)
            symmetric = d.nnz == 0 or d.max() <= 1e-12 * abs(A).max()
        return cls(A, np.asarray(rhs, dtype=float), bool(symmetric))

    def asymmetry(self) -> float:
        """``max|A - A^T| / max|A|``."""
        d = abs(self.matrix - self.matrix.T)
        return float(d.max() / abs(self.matrix).max()) if d.nnz else 0.0


def default_orders(degree: int) -> dict:
    return {"volume": 2 * degree + 2, "edge": 2 * degree + 3, "source": max(2 * degree + 2, 7)}


def _face_traces(mesh: Mesh, degree: int, order: int, side: int, faces):
    pts, w = edge_quadrature(mesh, order)
    pts, w = pts[faces], w[faces]
    k = mesh.iface_cells[faces, side]
    c, hk = mesh.centroid[k][:, None, :], mesh.diameter[k][:, None]
    phi = basis_values(pts, c, hk, degree)
    grad = basis_gradients(pts, c, hk, degree)
    dn = np.einsum("eqid,ed->eqi", grad, mesh.iface_normal[faces])
    return pts, w, k, phi, dn


def assemble(mesh: Mesh, params: DGParams, f, g=None, orders: dict | None = None) -> SparseSystem:
    """Assemble the IPDG matrix and load vector.

    ``f(x, y)`` is the source and ``g(x, y)`` the Dirichlet datum (``None``
    means homogeneous). Rows index test functions, columns trial functions.
    """
    if mesh.n_cells == 0:
        raise ValueError("cannot assemble on an empty mesh")
    n, delta, alpha = params.degree, params.delta, params.alpha
    o = default_orders(n) | (orders or {})
    dm = DofMap(mesh.n_cells, n)
    nb = dm.block
    ii, jj = np.meshgrid(np.arange(nb), np.arange(nb), indexing="ij")

    rows, cols, vals = [], [], []

    def add(blocks, ka, kb):
        rows.append((ka[:, None, None] * nb + ii).ravel())
        cols.append((kb[:, None, None] * nb + jj).ravel())
        vals.append(blocks.ravel())

    cells = np.arange(mesh.n_cells)
    add(local_stiffness(mesh, n, o["volume"]), cells, cells)

    inner = np.flatnonzero(~mesh.boundary_mask)
    bnd = np.flatnonzero(mesh.boundary_mask)

    if len(inner):
        _, w, k1, phi1, dn1 = _face_traces(mesh, n, o["edge"], 0, inner)
        _, _, k2, phi2, dn2 = _face_traces(mesh, n, o["edge"], 1, inner)
        pen = alpha / mesh.iface_length[inner][:, None]
        side = {0: (k1, phi1, dn1, 1.0), 1: (k2, phi2, dn2, -1.0)}
        for a in (0, 1):
            ka, pa, ga, sa = side[a]
            for b in (0, 1):
                kb, pb, gb, sb = side[b]
                blk = (
                    -0.5 * sa * np.einsum("eq,eqi,eqj->eij", w, pa, gb)
                    - 0.5 * delta * sb * np.einsum("eq,eqi,eqj->eij", w, ga, pb)
                    + sa * sb * np.einsum("eq,eqi,eqj->eij", w * pen, pa, pb)
                )
                add(blk, ka, kb)

    if len(bnd):
        bpts, w, kb_, phi, dn = _face_traces(mesh, n, o["edge"], 0, bnd)
        pen = alpha / mesh.iface_length[bnd][:, None]
        blk = (
            -np.einsum("eq,eqi,eqj->eij", w, phi, dn)
            - delta * np.einsum("eq,eqi,eqj->eij", w, dn, phi)
            + np.einsum("eq,eqi,eqj->eij", w * pen, phi, phi)
        )
        add(blk, kb_, kb_)

    N = dm.n_dofs
    A = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N, N)
    ).tocsr()
    A.sum_duplicates()
    A.sort_indices()

    pts, wv, cell = cell_quadrature(mesh, o["source"])
    phi = basis_values(pts, mesh.centroid[cell], mesh.diameter[cell], n)
    fv = np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float) * np.ones(len(wv))
    b = np.zeros((mesh.n_cells, nb))
    contrib = (wv * fv)[:, None] * phi
    for i in range(nb):
        b[:, i] = np.bincount(cell, weights=contrib[:, i], minlength=mesh.n_cells)

    if g is not None and len(bnd):
        bpts, w, kb_, phi, dn = _face_traces(mesh, n, o["edge"], 0, bnd)
        gv = np.asarray(g(bpts[..., 0], bpts[..., 1]), dtype=float) * np.ones(w.shape)
        pen = alpha / mesh.iface_length[bnd][:, None]
        gb = np.einsum("eq,eqi->ei", w * gv * pen, phi) - delta * np.einsum("eq,eqi->ei", w * gv, dn)
        for i in range(nb):
            b[:, i] += np.bincount(kb_, weights=gb[:, i], minlength=mesh.n_cells)

    return SparseSystem(A, b.ravel(), delta == 1, dm, mesh, params)


def apply_bilinear(u: DiscreteFunction, v: DiscreteFunction, params: DGParams,
                   order: int | None = None) -> float:
    """Evaluate ``A(u, v)`` by quadrature, interface by interface.

    Deliberately independent of :func:`assemble`: it works with the vector
    jumps ``u1 n1 + u2 n2`` and averaged gradients directly.
    """
    if u.mesh is not v.mesh or u.degree != v.degree:
        raise ValueError("u and v must live on the same mesh with the same degree")
    mesh = u.mesh
    order = 2 * u.degree + 3 if order is None else order
    delta, alpha = params.delta, params.alpha
    total = 0.0
    for k in range(mesh.n_cells):
        def integrand(x, y, k=k):
            p = np.stack([x, y], -1)
            return (u.gradients_at(p, np.full(x.shape, k)) * v.gradients_at(p, np.full(x.shape, k))).sum(-1)
        total += integrate_cell(mesh.cell_coords(k), integrand, order)

    for e in range(mesh.n_interfaces):
        k1, k2 = (int(c) for c in mesh.iface_cells[e])
        n1 = mesh.iface_normal[e]
        he = mesh.iface_length[e]

        def traces(fn, p):
            sides = [(k1, n1)] if k2 < 0 else [(k1, n1), (k2, -n1)]
            vals = [(fn.values_at(p, np.full(len(p), k)), fn.gradients_at(p, np.full(len(p), k)), nn)
                    for k, nn in sides]
            jump = sum(val[:, None] * nn[None, :] for val, _, nn in vals)
            avg = sum(grd for _, grd, _ in vals) / len(vals)
            return jump, avg

        def integrand(x, y):
            p = np.stack([x, y], -1)
            ju, au = traces(u, p)
            jv, av = traces(v, p)
            return (-(au * jv).sum(-1) - delta * (av * ju).sum(-1)
                    + alpha / he * (ju * jv).sum(-1))

        total += integrate_edge(mesh.iface_points[e], integrand, order)
    return float(total)
