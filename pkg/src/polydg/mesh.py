"""Polygonal meshes: construction, interface extraction, generators, audit.

Cells are stored in a flat compressed layout (``cell_ptr`` / ``cell_vertices``)
so every geometric quantity can be computed with array operations grouped by
vertex count. Interfaces are extracted from cell boundaries; an edge that
contains a vertex of a neighbouring cell in its interior (a hanging node) is
split at that vertex so each interface has exactly one cell on each side.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "Point",
    "Cell",
    "Interface",
    "Mesh",
    "MeshError",
    "ShapeReport",
    "build_mesh",
    "cell_geometry",
    "generate_hybrid",
    "generate_dual_hex",
    "audit_shape",
    "load_mesh",
    "save_mesh",
]

REL_TOL = 1e-12


class MeshError(ValueError):
    """Raised for invalid cells or an inconsistent cell-boundary covering."""


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Cell:
    vertex_ids: tuple[int, ...]
    area: float
    diameter: float
    centroid: Point


@dataclass(frozen=True)
class Interface:
    endpoints: tuple[Point, Point]
    k1: int
    k2: int | None
    normal: tuple[float, float]
    length: float

    @property
    def is_boundary(self) -> bool:
        return self.k2 is None

    @property
    def h_e(self) -> float:
        return self.length


def _polygon_arrays(pts: np.ndarray):
    """Signed area, centroid and diameter for a stack of k-gons, shape (m, k, 2)."""
    x, y = pts[..., 0], pts[..., 1]
    xn, yn = np.roll(x, -1, axis=-1), np.roll(y, -1, axis=-1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        cx = ((x + xn) * cross).sum(axis=-1) / (6.0 * area)
        cy = ((y + yn) * cross).sum(axis=-1) / (6.0 * area)
    diff = pts[:, :, None, :] - pts[:, None, :, :]
    diam = np.sqrt((diff**2).sum(axis=-1)).max(axis=(-1, -2))
    return area, np.stack([cx, cy], axis=-1), diam


def cell_geometry(vertices) -> tuple[float, float, Point]:
    """Area (shoelace), diameter (max vertex distance) and centroid of a polygon."""
    pts = np.asarray(vertices, dtype=float).reshape(1, -1, 2)
    if pts.shape[1] < 3:
        raise MeshError("a cell needs at least 3 vertices")
    area, cen, diam = _polygon_arrays(pts)
    if not abs(area[0]) > 1e-14 * diam[0] ** 2:
        raise MeshError("degenerate polygon with zero area")
    return float(area[0]), float(diam[0]), Point(float(cen[0, 0]), float(cen[0, 1]))


def _orient(a, b, c):
    return (b[..., 0] - a[..., 0]) * (c[..., 1] - a[..., 1]) - (b[..., 1] - a[..., 1]) * (
        c[..., 0] - a[..., 0]
    )


def _segments_touch(p1, p2, q1, q2, tol):
    """Vectorized closed-segment intersection test."""
    o1, o2 = _orient(p1, p2, q1), _orient(p1, p2, q2)
    o3, o4 = _orient(q1, q2, p1), _orient(q1, q2, p2)
    lp = np.linalg.norm(p2 - p1, axis=-1)
    lq = np.linalg.norm(q2 - q1, axis=-1)
    z1, z2 = np.abs(o1) <= tol * lp, np.abs(o2) <= tol * lp
    z3, z4 = np.abs(o3) <= tol * lq, np.abs(o4) <= tol * lq
    proper = (o1 * o2 < 0) & (o3 * o4 < 0) & ~(z1 | z2 | z3 | z4)

    def on_seg(a, b, c, z):
        lo, hi = np.minimum(a, b) - tol, np.maximum(a, b) + tol
        return z & np.all((c >= lo) & (c <= hi), axis=-1)

    return (
        proper
        | on_seg(p1, p2, q1, z1)
        | on_seg(p1, p2, q2, z2)
        | on_seg(q1, q2, p1, z3)
        | on_seg(q1, q2, p2, z4)
    )


def _crossing_edges(pts: np.ndarray, tol: float):
    """First pair of non-adjacent edges that touch, for a stack of k-gons (m, k, 2).

    Returns a boolean mask over the stack and the offending local edge pair.
    """
    k = pts.shape[1]
    nxt = np.roll(pts, -1, axis=1)
    for i in range(k):
        for j in range(i + 2, k):
            if i == 0 and j == k - 1:
                continue
            hit = _segments_touch(pts[:, i], nxt[:, i], pts[:, j], nxt[:, j], tol)
            if hit.any():
                return hit, (i, j)
    return np.zeros(len(pts), dtype=bool), (-1, -1)


@dataclass(eq=False)
class Mesh:
    """Immutable polygonal mesh with extracted interfaces.

    Array attributes are the primary storage; ``cells`` and ``interfaces``
    materialize the per-entity records on demand.
    """

    vertices: np.ndarray
    cell_ptr: np.ndarray
    cell_vertices: np.ndarray
    area: np.ndarray
    diameter: np.ndarray
    centroid: np.ndarray
    iface_points: np.ndarray
    iface_cells: np.ndarray
    iface_normal: np.ndarray
    iface_length: np.ndarray
    tol: float
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_cells(self) -> int:
        return len(self.area)

    @property
    def n_interfaces(self) -> int:
        return len(self.iface_length)

    @property
    def h(self) -> float:
        return float(self.diameter.max())

    @property
    def boundary_mask(self) -> np.ndarray:
        return self.iface_cells[:, 1] < 0

    @property
    def n_boundary(self) -> int:
        return int(self.boundary_mask.sum())

    @property
    def n_interior(self) -> int:
        return self.n_interfaces - self.n_boundary

    @property
    def cell_sizes(self) -> np.ndarray:
        return np.diff(self.cell_ptr)

    def cell_vertex_ids(self, k: int) -> np.ndarray:
        if not 0 <= k < self.n_cells:
            raise IndexError(f"cell id {k} out of range [0, {self.n_cells})")
        return self.cell_vertices[self.cell_ptr[k] : self.cell_ptr[k + 1]]

    def cell_coords(self, k: int) -> np.ndarray:
        return self.vertices[self.cell_vertex_ids(k)]

    def cell(self, k: int) -> Cell:
        ids = self.cell_vertex_ids(k)
        return Cell(
            tuple(int(i) for i in ids),
            float(self.area[k]),
            float(self.diameter[k]),
            Point(*map(float, self.centroid[k])),
        )

    @property
    def cells(self) -> list[Cell]:
        return [self.cell(k) for k in range(self.n_cells)]

    def interface(self, i: int) -> Interface:
        a, b = self.iface_points[i]
        k1, k2 = (int(c) for c in self.iface_cells[i])
        return Interface(
            (Point(*map(float, a)), Point(*map(float, b))),
            k1,
            None if k2 < 0 else k2,
            tuple(map(float, self.iface_normal[i])),
            float(self.iface_length[i]),
        )

    @property
    def interfaces(self) -> list[Interface]:
        return [self.interface(i) for i in range(self.n_interfaces)]

    def cell_groups(self):
        """Yield ``(k, cell_ids, coords)`` with coords of shape (m, k, 2)."""
        sizes = self.cell_sizes
        for k in np.unique(sizes):
            ids = np.flatnonzero(sizes == k)
            idx = self.cell_ptr[ids][:, None] + np.arange(k)
            yield int(k), ids, self.vertices[self.cell_vertices[idx]]

    def cell_list(self) -> list[list[int]]:
        return [self.cell_vertex_ids(k).tolist() for k in range(self.n_cells)]

    def perimeter(self) -> np.ndarray:
        out = np.zeros(self.n_cells)
        for _, ids, pts in self.cell_groups():
            out[ids] = np.linalg.norm(np.roll(pts, -1, axis=1) - pts, axis=-1).sum(axis=1)
        return out


def _merge_vertices(verts: np.ndarray, tol: float) -> np.ndarray:
    """Map each vertex to a representative id; coincident points share one."""
    pairs = cKDTree(verts).query_pairs(tol, output_type="ndarray")
    rep = np.arange(len(verts))
    if len(pairs) == 0:
        return rep

    def find(i):
        while rep[i] != i:
            rep[i] = rep[rep[i]]
            i = rep[i]
        return i

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            rep[max(ra, rb)] = min(ra, rb)
    return np.array([find(i) for i in range(len(verts))])


def build_mesh(vertices, cells: Sequence[Sequence[int]]) -> Mesh:
    """Validate polygonal cells and extract interior and boundary interfaces.

    Parameters
    ----------
    vertices : array-like, shape (n, 2)
    cells : sequence of counter-clockwise vertex-id lists

    Raises
    ------
    MeshError
        On a non-simple, clockwise or degenerate cell (naming the cell id), or
        when a boundary segment is covered by more than two cells or twice
        from the same side (naming the segment).
    """
    verts = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if len(cells) == 0:
        raise MeshError("mesh has no cells")
    if not np.all(np.isfinite(verts)):
        raise MeshError("vertex coordinates must be finite")
    span = verts.max(axis=0) - verts.min(axis=0)
    tol = REL_TOL * max(float(np.hypot(*span)), 1e-300)

    sizes = np.fromiter((len(c) for c in cells), dtype=np.int64, count=len(cells))
    if np.any(sizes < 3):
        raise MeshError(f"cell {int(np.argmax(sizes < 3))} has fewer than 3 vertices")
    ptr = np.concatenate([[0], np.cumsum(sizes)])
    flat = np.fromiter((v for c in cells for v in c), dtype=np.int64, count=int(ptr[-1]))
    if flat.min() < 0 or flat.max() >= len(verts):
        raise MeshError("cell references a vertex id out of range")
    flat = _merge_vertices(verts, tol)[flat]

    nc = len(sizes)
    area = np.empty(nc)
    diam = np.empty(nc)
    cen = np.empty((nc, 2))
    for k in np.unique(sizes):
        ids = np.flatnonzero(sizes == k)
        vid = flat[ptr[ids][:, None] + np.arange(k)]
        pts = verts[vid]
        a, c, d = _polygon_arrays(pts)
        srt = np.sort(vid, axis=1)
        dup = np.any(srt[:, 1:] == srt[:, :-1], axis=1)
        if dup.any():
            raise MeshError(f"cell {ids[np.argmax(dup)]} repeats a vertex (non-simple polygon)")
        bad = ~(a > 1e-14 * d**2)
        if bad.any():
            j = int(np.argmax(bad))
            what = "clockwise" if a[j] < 0 else "degenerate (zero area)"
            raise MeshError(f"cell {ids[j]} is {what}")
        hit, (i, j) = _crossing_edges(pts, tol)
        if hit.any():
            raise MeshError(
                f"cell {ids[np.argmax(hit)]} is not a simple polygon "
                f"(edges {i} and {j} intersect)"
            )
        area[ids], diam[ids], cen[ids] = a, d, c

    # directed cell edges
    owner = np.repeat(np.arange(nc), sizes)
    local = np.arange(len(flat)) - ptr[owner]
    nxt_idx = ptr[owner] + (local + 1) % sizes[owner]
    ea, eb = flat, flat[nxt_idx]

    ea, eb, owner = _split_hanging(verts, ea, eb, owner, tol)
    return _assemble_interfaces(verts, ptr, flat, area, diam, cen, ea, eb, owner, tol)


def _match(ea, eb):
    key = np.stack([np.minimum(ea, eb), np.maximum(ea, eb)], axis=1)
    uniq, inv, counts = np.unique(key, axis=0, return_inverse=True, return_counts=True)
    return uniq, inv.ravel(), counts


def _split_hanging(verts, ea, eb, owner, tol):
    """Split unmatched edges at vertices lying in their interior."""
    _, inv, counts = _match(ea, eb)
    lonely = np.flatnonzero(counts[inv] == 1)
    if len(lonely) == 0:
        return ea, eb, owner
    used = np.unique(np.concatenate([ea, eb]))
    tree = cKDTree(verts[used])
    a, b = verts[ea[lonely]], verts[eb[lonely]]
    mid, d = 0.5 * (a + b), b - a
    length = np.linalg.norm(d, axis=1)
    cands = tree.query_ball_point(mid, 0.5 * length + tol)
    keep = np.ones(len(ea), dtype=bool)
    new_a, new_b, new_o = [], [], []
    for j, cand in enumerate(cands):
        if len(cand) <= 2:
            continue
        e = lonely[j]
        vid = used[np.asarray(cand)]
        vid = vid[(vid != ea[e]) & (vid != eb[e])]
        rel = verts[vid] - a[j]
        L2 = length[j] ** 2
        t = rel @ d[j] / L2
        dist = np.abs(d[j, 0] * rel[:, 1] - d[j, 1] * rel[:, 0]) / length[j]
        eps = tol / length[j]
        on = (dist <= tol) & (t > eps) & (t < 1 - eps)
        if not on.any():
            continue
        order = np.argsort(t[on])
        chain = np.concatenate([[ea[e]], vid[on][order], [eb[e]]])
        keep[e] = False
        new_a.append(chain[:-1])
        new_b.append(chain[1:])
        new_o.append(np.full(len(chain) - 1, owner[e]))
    if not new_a:
        return ea, eb, owner
    return (
        np.concatenate([ea[keep], *new_a]),
        np.concatenate([eb[keep], *new_b]),
        np.concatenate([owner[keep], *new_o]),
    )


def _assemble_interfaces(verts, ptr, flat, area, diam, cen, ea, eb, owner, tol):
    uniq, inv, counts = _match(ea, eb)
    if np.any(counts > 2):
        i = int(np.argmax(counts > 2))
        raise MeshError(
            f"segment {verts[uniq[i, 0]].tolist()} -> {verts[uniq[i, 1]].tolist()} "
            f"is shared by {counts[i]} cells (overlapping cells)"
        )
    ne = len(uniq)
    # order edges so that, per interface, the lower cell id comes first
    order = np.lexsort((owner, inv))
    first = np.ones(len(order), dtype=bool)
    first[1:] = inv[order][1:] != inv[order][:-1]
    e1 = order[first]
    cells = np.full((ne, 2), -1, dtype=np.int64)
    cells[inv[e1], 0] = owner[e1]
    e2 = order[~first]
    cells[inv[e2], 1] = owner[e2]
    same_dir = ea[e2] == ea[e1[inv[e2]]] if len(e2) else np.zeros(0, dtype=bool)
    if np.any(same_dir):
        i = int(inv[e2][np.argmax(same_dir)])
        raise MeshError(
            f"segment {verts[uniq[i, 0]].tolist()} -> {verts[uniq[i, 1]].tolist()} "
            f"is covered twice from the same side (overlapping cells)"
        )
    start = np.empty(ne, dtype=np.int64)
    stop = np.empty(ne, dtype=np.int64)
    start[inv[e1]], stop[inv[e1]] = ea[e1], eb[e1]
    pts = np.stack([verts[start], verts[stop]], axis=1)
    d = pts[:, 1] - pts[:, 0]
    length = np.linalg.norm(d, axis=1)
    if np.any(length <= tol):
        raise MeshError(f"zero-length interface {int(np.argmax(length <= tol))}")
    normal = np.stack([d[:, 1], -d[:, 0]], axis=1) / length[:, None]
    return Mesh(
        vertices=verts,
        cell_ptr=ptr,
        cell_vertices=flat,
        area=area,
        diameter=diam,
        centroid=cen,
        iface_points=pts,
        iface_cells=cells,
        iface_normal=normal,
        iface_length=length,
        tol=tol,
    )


# ---------------------------------------------------------------- generators


def _dedupe_int(coords: np.ndarray, cells: np.ndarray):
    uniq, inv = np.unique(coords.reshape(-1, 2), axis=0, return_inverse=True)
    return uniq, inv.reshape(cells.shape)


def generate_hybrid(n: int) -> Mesh:
    """Non-conformal triangle/quad mesh of the unit square with hanging nodes.

    The left half carries ``n/2 x n`` squares of side ``1/n`` each cut into two
    triangles; the right half carries squares of side ``1/(2n)``. Every other
    right-half vertex on ``x = 1/2`` is a hanging node. ``h = sqrt(2)/n``.
    """
    if not isinstance(n, (int, np.integer)) or n < 2 or n % 2:
        raise ValueError(f"hybrid mesh needs an even n >= 2, got {n!r}")
    n = int(n)
    # integer lattice in units of 1/(2n)
    i, j = np.meshgrid(np.arange(n // 2), np.arange(n), indexing="ij")
    i, j = 2 * i.ravel(), 2 * j.ravel()
    p00 = np.stack([i, j], -1)
    p10 = np.stack([i + 2, j], -1)
    p11 = np.stack([i + 2, j + 2], -1)
    p01 = np.stack([i, j + 2], -1)
    tris = np.concatenate(
        [np.stack([p00, p10, p11], 1), np.stack([p00, p11, p01], 1)], axis=0
    )
    i, j = np.meshgrid(np.arange(n), np.arange(2 * n), indexing="ij")
    i, j = n + i.ravel(), j.ravel()
    quads = np.stack(
        [np.stack([i, j], -1), np.stack([i + 1, j], -1),
         np.stack([i + 1, j + 1], -1), np.stack([i, j + 1], -1)], 1
    )
    coords = np.concatenate([tris.reshape(-1, 2), quads.reshape(-1, 2)])
    uniq, inv = np.unique(coords, axis=0, return_inverse=True)
    inv = inv.ravel()
    nt = 3 * len(tris)
    cells = inv[:nt].reshape(-1, 3).tolist() + inv[nt:].reshape(-1, 4).tolist()
    return build_mesh(uniq / (2.0 * n), cells)


def _structured_triangles(n: int):
    x = np.linspace(0.0, 1.0, n + 1)
    X, Y = np.meshgrid(x, x, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], -1)
    idx = np.arange((n + 1) ** 2).reshape(n + 1, n + 1)
    a, b = idx[:-1, :-1].ravel(), idx[1:, :-1].ravel()
    c, d = idx[1:, 1:].ravel(), idx[:-1, 1:].ravel()
    tris = np.concatenate([np.stack([a, b, c], 1), np.stack([a, c, d], 1)])
    return pts, tris


def generate_dual_hex(n: int) -> Mesh:
    """Centroid dual of the structured ``n x n`` diagonal triangulation.

    One cell per primal vertex: interior vertices give hexagons through the
    centroids of their six triangles; boundary vertices also use the adjacent
    boundary-edge midpoints and the vertex itself.
    """
    if not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"dual mesh needs n >= 2, got {n!r}")
    n = int(n)
    pts, tris = _structured_triangles(n)
    nv, nt = len(pts), len(tris)
    centroids = pts[tris].mean(axis=1)

    edges = np.concatenate([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
    key = np.sort(edges, axis=1)
    uk, cnt = np.unique(key, axis=0, return_counts=True)
    bedges = uk[cnt == 1]
    mids = pts[bedges].mean(axis=1)
    on_bnd = np.zeros(nv, dtype=bool)
    on_bnd[bedges.ravel()] = True

    # dual vertex pool: centroids, boundary midpoints, boundary primal vertices
    bverts = np.flatnonzero(on_bnd)
    pool = np.concatenate([centroids, mids, pts[bverts]])
    mid_off, bv_off = nt, nt + len(mids)
    bv_id = np.full(nv, -1)
    bv_id[bverts] = bv_off + np.arange(len(bverts))

    owner = np.concatenate([tris.ravel(), bedges.ravel()])
    member = np.concatenate([np.repeat(np.arange(nt), 3), mid_off + np.repeat(np.arange(len(mids)), 2)])
    rel = pool[member] - pts[owner]
    ref = np.zeros((nv, 2))
    np.add.at(ref, owner, rel)
    # interior rings are centrally symmetric, so their offset sum vanishes
    r = np.where(on_bnd[owner][:, None], ref[owner], np.array([1.0, 0.0]))
    ang = np.arctan2(r[:, 0] * rel[:, 1] - r[:, 1] * rel[:, 0], (r * rel).sum(axis=1))
    order = np.lexsort((ang, owner))
    owner, member = owner[order], member[order]
    splits = np.flatnonzero(np.diff(owner)) + 1
    cells = []
    for v, ring in zip(owner[np.r_[0, splits]], np.split(member, splits)):
        ring = ring.tolist()
        if on_bnd[v]:
            ring = [int(bv_id[v])] + ring
        cells.append(ring)
    return build_mesh(pool, cells)


# --------------------------------------------------------------------- audit


@dataclass
class ShapeReport:
    """Computable witnesses for the shape-regularity assumptions.

    ``sigma_star``/``theta0`` use the cell centroid as the pyramid apex and
    ``a4_overlap_proxy`` counts bounding-box overlaps; both are surrogates.
    """

    rho_v: float
    rho_e: float
    kappa: float
    sigma_star: float
    theta0: float
    a4_overlap_proxy: int
    worst: dict
    non_star_cells: list
    warnings: list
    surrogate_checks: tuple = ("sigma_star", "theta0", "a4_overlap_proxy")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["surrogate_checks"] = list(self.surrogate_checks)
        return d


def _incidences(mesh: Mesh):
    """(interface, cell, outward normal sign) for every incident pair."""
    ic = mesh.iface_cells
    e = np.arange(mesh.n_interfaces)
    inner = ic[:, 1] >= 0
    eid = np.concatenate([e, e[inner]])
    cid = np.concatenate([ic[:, 0], ic[inner, 1]])
    sgn = np.concatenate([np.ones(len(e)), -np.ones(int(inner.sum()))])
    return eid, cid, sgn


def audit_shape(mesh: Mesh) -> ShapeReport:
    rv = mesh.area / mesh.diameter**2
    eid, cid, sgn = _incidences(mesh)
    hK = mesh.diameter[cid]
    kap = mesh.iface_length[eid] / hK

    a, b = mesh.iface_points[eid, 0], mesh.iface_points[eid, 1]
    apex = mesh.centroid[cid]
    d = b - a
    height = np.abs(d[:, 0] * (apex[:, 1] - a[:, 1]) - d[:, 1] * (apex[:, 0] - a[:, 0]))
    sig = height / mesh.iface_length[eid] / hK

    nrm = mesh.iface_normal[eid] * sgn[:, None]
    theta = np.zeros(len(eid))
    for x in (a, 0.5 * (a + b), b):
        v = x - apex
        c = (v * nrm).sum(axis=1) / np.linalg.norm(v, axis=1)
        theta = np.maximum(theta, np.arccos(np.clip(c, -1.0, 1.0)))

    non_star = []
    for _, ids, pts in mesh.cell_groups():
        c = mesh.centroid[ids][:, None, :]
        o = _orient(c, pts, np.roll(pts, -1, axis=1))
        bad = np.any(o <= 0, axis=1)
        non_star.extend(int(i) for i in ids[bad])

    lo = np.full((mesh.n_cells, 2), np.inf)
    hi = np.full((mesh.n_cells, 2), -np.inf)
    for _, ids, pts in mesh.cell_groups():
        lo[ids], hi[ids] = pts.min(axis=1), pts.max(axis=1)
    ctr, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
    radius = 2.0 * float(np.linalg.norm(half, axis=1).max())
    pairs = cKDTree(ctr).query_pairs(radius, output_type="ndarray")
    overlap_count = np.zeros(mesh.n_cells, dtype=np.int64)
    if len(pairs):
        p, q = pairs[:, 0], pairs[:, 1]
        ov = np.all(
            (np.minimum(hi[p], hi[q]) - np.maximum(lo[p], lo[q])) > mesh.tol, axis=1
        )
        np.add.at(overlap_count, p[ov], 1)
        np.add.at(overlap_count, q[ov], 1)

    i_rv, i_k, i_s, i_t = (int(np.argmin(rv)), int(np.argmin(kap)),
                           int(np.argmin(sig)), int(np.argmax(theta)))
    warnings = []
    if non_star:
        warnings.append(f"{len(non_star)} cell(s) not star-shaped w.r.t. their centroid")
    if theta[i_t] >= 0.5 * math.pi:
        warnings.append("pyramid angle condition fails (theta0 >= pi/2)")
    worst = {
        "rho_v": {"cell": i_rv, "value": float(rv[i_rv])},
        "kappa": {"interface": int(eid[i_k]), "cell": int(cid[i_k]), "value": float(kap[i_k])},
        "sigma_star": {"interface": int(eid[i_s]), "cell": int(cid[i_s]), "value": float(sig[i_s])},
        "theta0": {"interface": int(eid[i_t]), "cell": int(cid[i_t]), "value": float(theta[i_t])},
        "a4_overlap_proxy": {"cell": int(np.argmax(overlap_count)),
                             "value": int(overlap_count.max())},
    }
    return ShapeReport(
        rho_v=float(rv[i_rv]),
        rho_e=float(np.min(mesh.iface_length / mesh.iface_length)),
        kappa=float(kap[i_k]),
        sigma_star=float(sig[i_s]),
        theta0=float(theta[i_t]),
        a4_overlap_proxy=int(overlap_count.max()),
        worst=worst,
        non_star_cells=non_star,
        warnings=warnings,
    )


# ------------------------------------------------------------------------ io


def mesh_to_dict(mesh: Mesh) -> dict:
    return {"vertices": mesh.vertices.tolist(), "cells": mesh.cell_list()}


def save_mesh(mesh: Mesh, path) -> None:
    Path(path).write_text(json.dumps(mesh_to_dict(mesh)))


def load_mesh(path) -> Mesh:
    data = json.loads(Path(path).read_text())
    try:
        return build_mesh(data["vertices"], data["cells"])
    except KeyError as exc:
        raise MeshError(f"mesh file lacks the {exc.args[0]!r} field") from None
