"""Quadrature on triangles, polygons (centroid fans) and segments.

Triangle rules are collapsed Gauss products (Gauss-Jacobi in the collapsed
direction, Gauss-Legendre along it): every weight is positive and a rule with
``m`` points per direction is exact to total degree ``2m - 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi

from .mesh import Mesh, MeshError, _crossing_edges, _orient

__all__ = [
    "MAX_ORDER",
    "QuadRule",
    "triangle_rule",
    "segment_rule",
    "triangulate",
    "integrate_triangle",
    "integrate_cell",
    "integrate_edge",
    "cell_quadrature",
    "edge_quadrature",
]

MAX_ORDER = 30


@dataclass(frozen=True)
class QuadRule:
    points: np.ndarray
    weights: np.ndarray
    degree: int


def _check_order(order: int) -> int:
    if not isinstance(order, (int, np.integer)) or not 0 <= order <= MAX_ORDER:
        raise ValueError(f"unsupported quadrature order {order!r} (0..{MAX_ORDER})")
    return int(order)


@lru_cache(maxsize=None)
def triangle_rule(order: int) -> QuadRule:
    """Rule on the reference triangle (0,0), (1,0), (0,1); weights sum to 1/2."""
    order = _check_order(order)
    m = max(1, (order + 2) // 2)
    xs, ws = roots_jacobi(m, 1.0, 0.0)
    s, w_s = 0.5 * (xs + 1.0), ws / 4.0
    xt, wt = leggauss(m)
    t, w_t = 0.5 * (xt + 1.0), wt / 2.0
    S, T = np.meshgrid(s, t, indexing="ij")
    pts = np.stack([(1.0 - S) * T, S], axis=-1).reshape(-1, 2)
    w = np.outer(w_s, w_t).ravel()
    pts.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(pts, w, 2 * m - 1)


@lru_cache(maxsize=None)
def segment_rule(order: int) -> QuadRule:
    """Gauss-Legendre on [-1, 1]; weights sum to 2."""
    order = _check_order(order)
    m = max(1, (order + 2) // 2)
    x, w = leggauss(m)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(x, w, 2 * m - 1)


def _ear_clip(pts: np.ndarray) -> np.ndarray:
    idx = list(range(len(pts)))
    out = []
    while len(idx) > 3:
        for j in range(len(idx)):
            a, b, c = idx[j - 1], idx[j], idx[(j + 1) % len(idx)]
            if _orient(pts[a], pts[b], pts[c]) <= 0:
                continue
            others = [i for i in idx if i not in (a, b, c)]
            if others:
                q = pts[others]
                inside = (
                    (_orient(pts[a], pts[b], q) >= 0)
                    & (_orient(pts[b], pts[c], q) >= 0)
                    & (_orient(pts[c], pts[a], q) >= 0)
                )
                if inside.any():
                    continue
            out.append(pts[[a, b, c]])
            idx.pop(j)
            break
        else:
            raise MeshError("ear clipping failed: polygon is not simple")
    out.append(pts[idx])
    return np.array(out)


def triangulate(vertices) -> np.ndarray:
    """Split a CCW polygon into triangles, shape (t, 3, 2).

    Triangles pass through unchanged; otherwise a fan around the centroid is
    used, falling back to ear clipping when the polygon is not star-shaped with
    respect to its centroid.
    """
    pts = np.asarray(vertices, dtype=float)
    if len(pts) == 3:
        return pts[None].copy()
    x, y = pts[:, 0], pts[:, 1]
    cross = x * np.roll(y, -1) - np.roll(x, -1) * y
    a = 0.5 * cross.sum()
    c = np.array([((x + np.roll(x, -1)) * cross).sum(), ((y + np.roll(y, -1)) * cross).sum()]) / (6 * a)
    nxt = np.roll(pts, -1, axis=0)
    fan = np.stack([np.broadcast_to(c, pts.shape), pts, nxt], axis=1)
    if np.all(_orient(fan[:, 0], fan[:, 1], fan[:, 2]) > 0):
        return fan
    scale = float(np.ptp(pts, axis=0).max())
    if _crossing_edges(pts[None], 1e-12 * scale)[0].any():
        raise MeshError("cannot triangulate a polygon whose edges intersect")
    return _ear_clip(pts)


def _map_triangles(tris: np.ndarray, rule: QuadRule):
    """Physical points (t, q, 2) and weights (t, q) on a stack of triangles."""
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    p, q = rule.points[:, 0], rule.points[:, 1]
    pts = a[:, None] + (b - a)[:, None] * p[None, :, None] + (c - a)[:, None] * q[None, :, None]
    jac = np.abs(_orient(a, b, c))
    return pts, jac[:, None] * rule.weights[None, :]


def integrate_triangle(tri, f, order: int) -> float:
    pts, w = _map_triangles(np.asarray(tri, dtype=float)[None], triangle_rule(order))
    return float((w * f(pts[..., 0], pts[..., 1])).sum())


def integrate_cell(vertices, f, order: int) -> float:
    """Integrate ``f(x, y)`` (vectorized) over a polygon given by its vertices."""
    tris = triangulate(vertices)
    pts, w = _map_triangles(tris, triangle_rule(order))
    return float((w * f(pts[..., 0], pts[..., 1])).sum())


def integrate_edge(endpoints, f, order: int) -> float:
    """Integrate ``f(x, y)`` along a straight segment."""
    (ax, ay), (bx, by) = endpoints
    rule = segment_rule(order)
    t = 0.5 * (rule.points + 1.0)
    x, y = ax + t * (bx - ax), ay + t * (by - ay)
    half = 0.5 * np.hypot(bx - ax, by - ay)
    return float(half * (rule.weights * f(x, y)).sum())


def _fan_triangles(mesh: Mesh):
    if "fan" in mesh._cache:
        return mesh._cache["fan"]
    tris, owner = [], []
    for k, ids, pts in mesh.cell_groups():
        if k == 3:
            tris.append(pts)
            owner.append(ids)
            continue
        c = np.broadcast_to(mesh.centroid[ids][:, None, :], pts.shape)
        fan = np.stack([c, pts, np.roll(pts, -1, axis=1)], axis=2)
        ok = np.all(_orient(fan[..., 0, :], fan[..., 1, :], fan[..., 2, :]) > 0, axis=1)
        tris.append(fan[ok].reshape(-1, 3, 2))
        owner.append(np.repeat(ids[ok], k))
        for i in ids[~ok]:
            t = _ear_clip(mesh.cell_coords(i))
            tris.append(t)
            owner.append(np.full(len(t), i))
    out = np.concatenate(tris), np.concatenate(owner)
    mesh._cache["fan"] = out
    return out


def cell_quadrature(mesh: Mesh, order: int):
    """Flattened volume rule over every cell.

    Returns ``(points (P, 2), weights (P,), cell (P,))``; cached per order.
    """
    key = ("cellq", order)
    if key not in mesh._cache:
        tris, owner = _fan_triangles(mesh)
        rule = triangle_rule(order)
        pts, w = _map_triangles(tris, rule)
        cell = np.repeat(owner, len(rule.weights))
        mesh._cache[key] = (pts.reshape(-1, 2), w.ravel(), cell)
    return mesh._cache[key]


def edge_quadrature(mesh: Mesh, order: int):
    """Points (E, q, 2) and weights (E, q) on every interface."""
    key = ("edgeq", order)
    if key not in mesh._cache:
        rule = segment_rule(order)
        t = 0.5 * (rule.points + 1.0)
        a, b = mesh.iface_points[:, 0], mesh.iface_points[:, 1]
        pts = a[:, None] + (b - a)[:, None] * t[None, :, None]
        w = 0.5 * mesh.iface_length[:, None] * rule.weights[None, :]
        mesh._cache[key] = (pts, w)
    return mesh._cache[key]
