"""Norm fields: a norm on the fiber over each point of the base.

Constant variants (Euclidean, max, polytope, ellipse) ignore the point and
provide exact operator norms. The Barabanov evaluator depends on the point.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .cocycle import Cocycle, fiber_bunching_check
from .errors import Degenerate, NotBunched, PreconditionViolated, TooLarge
from .holonomy import unstable_holonomy
from .symbolic import Point, splice

__all__ = [
    "NormField",
    "EuclideanNorm",
    "MaxNorm",
    "PolytopeNorm",
    "EllipseNorm",
    "BarabanovNorm",
    "WordSupNorm",
    "barabanov_eval",
    "EVAL_CAP",
]

EVAL_CAP = 10 ** 7


class NormField:
    """Base class. ``value(u, x)`` accepts one vector or a stack of row vectors."""

    constant = True
    name = "norm"

    def value(self, u, x: Point | None = None):
        raise NotImplementedError

    def __call__(self, u, x: Point | None = None):
        return self.value(u, x)

    def operator_norms(self, mats) -> np.ndarray:
        raise NotImplementedError


def _rows(u):
    u = np.asarray(u, dtype=float)
    return u[None, :] if u.ndim == 1 else u, u.ndim == 1


class EuclideanNorm(NormField):
    name = "euclidean"

    def value(self, u, x=None):
        u, single = _rows(u)
        out = np.linalg.norm(u, axis=1)
        return float(out[0]) if single else out

    def operator_norms(self, mats):
        return np.linalg.svd(np.asarray(mats, dtype=float), compute_uv=False)[..., 0]

    def worst_direction(self, mat):
        _, _, vt = np.linalg.svd(mat)
        return vt[0]


class MaxNorm(NormField):
    name = "max"

    def value(self, u, x=None):
        u, single = _rows(u)
        out = np.abs(u).max(axis=1)
        return float(out[0]) if single else out

    def operator_norms(self, mats):
        return np.abs(np.asarray(mats, dtype=float)).sum(axis=-1).max(axis=-1)

    def worst_direction(self, mat):
        i = int(np.argmax(np.abs(mat).sum(axis=1)))
        v = np.sign(mat[i])
        v[v == 0] = 1.0
        return v


class PolytopeNorm(NormField):
    """Gauge of a centrally symmetric polytope given by its vertices."""

    name = "polytope"

    def __init__(self, vertices, tol=1e-9, hull_only=False):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[0] < 2:
            raise Degenerate("need a list of vertices")
        d = v.shape[1]
        scale = np.abs(v).max()
        if d == 1:
            r = np.abs(v).max()
            if r == 0:
                raise Degenerate("zero polytope")
            self.vertices = np.array([[r], [-r]])
            self._a = np.array([[1.0], [-1.0]])
            self._b = np.array([r, r])
            self.dimension = 1
            return
        for p in v:
            if np.min(np.abs(v + p).max(axis=1)) > tol * scale:
                raise PreconditionViolated("vertex list must be symmetric under negation")
        try:
            hull = ConvexHull(v)
        except QhullError as err:
            raise Degenerate("vertices do not span the space") from err
        if not hull_only and len(hull.vertices) < len(_dedupe(v, tol * scale)):
            raise PreconditionViolated("vertices are not in convex position")
        self.vertices = v[np.sort(hull.vertices)]
        eq = hull.equations
        if np.any(eq[:, -1] >= 0):
            raise Degenerate("origin is not interior")
        self._a = eq[:, :-1]
        self._b = -eq[:, -1]
        self.dimension = d

    @classmethod
    def from_points(cls, points):
        """Polytope norm of the convex hull of ``+-points`` (interior points dropped)."""
        p = np.asarray(points, dtype=float)
        return cls(np.vstack([p, -p]), hull_only=True)

    def value(self, u, x=None):
        u, single = _rows(u)
        out = np.max((u @ self._a.T) / self._b, axis=1)
        out = np.maximum(out, 0.0)
        return float(out[0]) if single else out

    def operator_norms(self, mats):
        mats = np.asarray(mats, dtype=float)
        img = mats @ self.vertices.T  # (..., d, m)
        g = np.einsum("fd,...dm->...fm", self._a, img) / self._b[:, None]
        return g.max(axis=(-2, -1))

    def worst_direction(self, mat):
        g = (self._a @ (mat @ self.vertices.T)) / self._b[:, None]
        return self.vertices[int(np.argmax(g.max(axis=0)))]


def _dedupe(v, tol):
    out = []
    for p in v:
        if not any(np.abs(p - q).max() <= tol for q in out):
            out.append(p)
    return np.array(out)


class EllipseNorm(NormField):
    """``sqrt(u^T Q u)`` for a positive-definite ``Q``."""

    name = "ellipse"

    def __init__(self, q):
        q = np.asarray(q, dtype=float)
        q = 0.5 * (q + q.T)
        w, vecs = np.linalg.eigh(q)
        if w[0] <= 0:
            raise PreconditionViolated("ellipse matrix must be positive definite")
        self.q = q
        self._half = vecs @ np.diag(np.sqrt(w)) @ vecs.T
        self._ihalf = vecs @ np.diag(1 / np.sqrt(w)) @ vecs.T

    def value(self, u, x=None):
        u, single = _rows(u)
        out = np.sqrt(np.maximum(np.einsum("ij,jk,ik->i", u, self.q, u), 0.0))
        return float(out[0]) if single else out

    def operator_norms(self, mats):
        m = self._half @ np.asarray(mats, dtype=float) @ self._ihalf
        return np.linalg.svd(m, compute_uv=False)[..., 0]

    def worst_direction(self, mat):
        _, _, vt = np.linalg.svd(self._half @ mat @ self._ihalf)
        return self._ihalf @ vt[0]


def _prune_grams(grams, tol=1e-12):
    """Extreme points of a set of Gram matrices (exact for maximizing ``v^T G v``)."""
    d = grams.shape[-1]
    iu = np.triu_indices(d)
    flat = grams[:, iu[0], iu[1]]
    flat = np.unique(np.round(flat / max(np.abs(flat).max(), 1e-300), 13), axis=0, return_index=True)[1]
    grams = grams[np.sort(flat)]
    if d > 2 or len(grams) <= 8:
        return grams
    pts = grams[:, iu[0], iu[1]]
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return grams
    return grams[np.sort(hull.vertices)]


class BarabanovNorm(NormField):
    """Finite-depth Barabanov formula.

    ``|||u|||_x = max_{n in [n_max/2, n_max]} e^{-beta n} max_y ||Phi^n_y H^u_{y<-x} u||``
    with ``y`` ranging over admissible futures glued to the past of ``x``. For
    one-step cocycles the holonomy is the identity and the value depends on
    ``x_0`` only.
    """

    constant = False
    name = "barabanov"

    def __init__(self, c: Cocycle, beta: float, n_max: int = 12, theta: float = 1.0,
                 check_bunching: bool = True):
        if n_max < 1:
            raise PreconditionViolated("n_max must be positive")
        if check_bunching:
            rep = fiber_bunching_check(c, theta)
            if not rep.bunched:
                raise NotBunched(f"max log bolicity {rep.max_log_bolicity:.4g} exceeds "
                                 f"theta*lambda = {rep.threshold:.4g}")
        _, trans, _ = c.one_step_view()
        total = int(np.linalg.matrix_power(trans.astype(np.int64), n_max - 1).sum())
        if total > EVAL_CAP:
            raise TooLarge("Barabanov evaluation would enumerate too many words")
        self.c, self.beta, self.n_max = c, float(beta), int(n_max)
        self.n_min = max(1, n_max // 2)
        self._cache = {}

    def _grams_from(self, b):
        """Pruned Gram matrices ``e^{-2 beta n} P^T P`` of block paths starting at ``b``."""
        mats, trans, _ = self.c.one_step_view()
        last = np.array([b])
        prods = mats[[b]]
        grams = []
        for n in range(1, self.n_max + 1):
            if n > 1:
                nl, npd = [], []
                for t in range(len(mats)):
                    mask = trans[last, t]
                    if mask.any():
                        npd.append(mats[t] @ prods[mask])
                        nl.append(np.full(int(mask.sum()), t))
                last, prods = np.concatenate(nl), np.concatenate(npd)
            if n >= self.n_min:
                scaled = prods * math.exp(-self.beta * n)
                grams.append(_prune_grams(np.einsum("kji,kjl->kil", scaled, scaled)))
        return _prune_grams(np.concatenate(grams))

    def _context(self, x: Point):
        c = self.c
        r = c.step_radius
        past = x.block(-r, 1)
        if past not in self._cache:
            _, _, windows = c.one_step_view()
            firsts = [i for i, w in enumerate(windows) if w[: r + 1] == past]
            if not firsts:
                raise PreconditionViolated("point is not admissible for the cocycle")
            self._cache[past] = [(b, self._grams_from(b)) for b in firsts]
        return self._cache[past]

    def value(self, u, x: Point | None = None):
        if x is None:
            raise PreconditionViolated("the Barabanov norm depends on the base point")
        u, single = _rows(u)
        c = self.c
        r = c.step_radius
        _, _, windows = c.one_step_view()
        best = np.zeros(u.shape[0])
        for b, grams in self._context(x):
            if r == 0:
                vecs = u.T
            else:
                future = windows[b][r + 1:]
                y = splice(x, c.base.extend_word(future, 1), 1)
                vecs = unstable_holonomy(c, x, y, tol=1e-13).matrix @ u.T
            q = np.einsum("iu,kij,ju->ku", vecs, grams, vecs)
            best = np.maximum(best, q.max(axis=0))
        out = np.sqrt(best)
        return float(out[0]) if single else out


class WordSupNorm(NormField):
    """Constant norm ``max_x |||u|||_x`` of a one-step full-shift Barabanov evaluator."""

    name = "word-sup"

    def __init__(self, matrices, beta: float, n_max: int = 12):
        self._field = BarabanovNorm(Cocycle.from_matrices(matrices), beta, n_max,
                                    check_bunching=False)
        self._points = [Point.fixed(a) for a in range(len(matrices))]

    def value(self, u, x=None):
        vals = [np.atleast_1d(self._field.value(u, p)) for p in self._points]
        out = np.max(vals, axis=0)
        return float(out[0]) if np.asarray(u).ndim == 1 else out


def barabanov_eval(c: Cocycle, beta: float, x: Point, u, n_max: int = 12,
                   theta: float = 1.0) -> float:
    """Truncated Barabanov formula at ``(x, u)``; see :class:`BarabanovNorm`."""
    return BarabanovNorm(c, beta, n_max, theta).value(np.asarray(u, dtype=float), x)
