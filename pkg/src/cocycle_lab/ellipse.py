"""Maximal-area ellipse inscribed in a centrally symmetric polygon.

The inscribed problem is the polar dual of the minimum-volume enclosing
ellipse of the dual polygon's vertices, which Khachiyan's algorithm with away steps solves.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .errors import Degenerate, NotConverged, PreconditionViolated

__all__ = ["john_ellipse", "mvee_centered"]


def mvee_centered(points, tol: float = 1e-8, max_iter: int = 100_000) -> np.ndarray:
    """``M`` with ``{y : y^T M y <= 1}`` the least-volume origin-centred ellipsoid containing the points."""
    p = np.asarray(points, dtype=float)
    m, d = p.shape
    u = np.full(m, 1.0 / m)
    for _ in range(max_iter):
        x = p.T @ (u[:, None] * p)
        g = np.einsum("ij,jk,ik->i", p, np.linalg.inv(x), p)
        j = int(np.argmax(g))
        support = np.flatnonzero(u > 0)
        i = int(support[np.argmin(g[support])])
        if g[j] <= d * (1 + tol) and g[i] >= d * (1 - tol):
            break
        if g[j] - d >= d - g[i]:
            step = (g[j] / d - 1) / (g[j] - 1)
            u *= 1 - step
            u[j] += step
        else:
            # away step (Todd-Yildirim): shrink the weight of the least active point
            cap = u[i] / (1 - u[i])
            step = cap if g[i] <= 1 else min(cap, (1 - g[i] / d) / (g[i] - 1))
            u *= 1 + step
            u[i] -= step
            if step == cap:
                u[i] = 0.0
    mat = np.linalg.inv(p.T @ (u[:, None] * p)) / d
    # rescale so the extreme point lies exactly on the boundary
    return mat / np.max(np.einsum("ij,jk,ik->i", p, mat, p))


def john_ellipse(vertices, tol: float = 1e-8) -> np.ndarray:
    """``Q`` such that ``{v : v^T Q v <= 1}`` is the largest ellipse inside the polygon."""
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2:
        raise PreconditionViolated("john_ellipse works in the plane")
    scale = np.abs(v).max() if v.size else 0.0
    if scale == 0 or np.linalg.matrix_rank(v, tol=1e-12 * scale) < 2:
        raise Degenerate("vertices are collinear")
    for p in v:
        if np.min(np.abs(v + p).max(axis=1)) > 1e-9 * scale:
            raise PreconditionViolated("polygon must be centrally symmetric")
    try:
        hull = ConvexHull(v)
    except QhullError as err:
        raise Degenerate("vertices are collinear") from err
    uniq = np.unique(np.round(v / scale, 12), axis=0)
    if len(hull.vertices) < len(uniq):
        raise PreconditionViolated("vertices are not in convex position")
    normals, offsets = hull.equations[:, :2], -hull.equations[:, 2]
    dual = normals / offsets[:, None]
    return np.linalg.inv(mvee_centered(dual, tol))
