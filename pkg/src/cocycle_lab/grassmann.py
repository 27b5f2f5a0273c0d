"""Grassmannian subspaces and the frame metric.

The distance between ``p``-dimensional subspaces is
``inf ||F1 - F2||`` over matrices ``F_i`` whose columns span ``V_i`` and whose
singular values are all at least 1. Aligning principal vectors makes the
columns of ``F1 - F2`` orthogonal, and any admissible pair has a column
difference of length at least ``2 sin(phi/2)`` for the largest principal angle,
so the infimum equals ``2 sin(phi_max / 2)`` for every ``p``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.optimize import minimize

from .cocycle import bolicity
from .errors import DimensionMismatch, PreconditionViolated

__all__ = [
    "Subspace",
    "principal_angles",
    "grassmann_distance",
    "grassmann_distance_numeric",
    "lipschitz_bolicity_property",
    "random_subspace",
]


class Subspace:
    """Orthonormal basis (columns) of a subspace of ``R^d``."""

    __slots__ = ("basis",)

    def __init__(self, basis):
        b = np.asarray(basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if b.shape[1] == 0 or b.shape[1] > b.shape[0]:
            raise PreconditionViolated("need 1 <= p <= d basis columns")
        q, r = np.linalg.qr(b)
        if np.min(np.abs(np.diag(r))) <= 1e-12 * max(np.abs(r).max(), 1e-300):
            raise PreconditionViolated("basis is rank deficient")
        self.basis = q * np.sign(np.diag(r))

    @property
    def d(self) -> int:
        return self.basis.shape[0]

    @property
    def p(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def image(self, m) -> "Subspace":
        return Subspace(np.asarray(m, dtype=float) @ self.basis)

    def __repr__(self):
        return f"Subspace(d={self.d}, p={self.p})"


def _as_subspace(v):
    return v if isinstance(v, Subspace) else Subspace(v)


def principal_angles(v1, v2) -> np.ndarray:
    """Principal angles in increasing order, accurate for small and large angles."""
    a, b = _as_subspace(v1).basis, _as_subspace(v2).basis
    if a.shape != b.shape:
        raise DimensionMismatch("subspaces must have equal ambient dimension and rank")
    cos = np.clip(np.linalg.svd(a.T @ b, compute_uv=False), 0.0, 1.0)
    resid = b - a @ (a.T @ b)
    sin = np.sort(np.clip(np.linalg.svd(resid, compute_uv=False), 0.0, 1.0))
    # cos is sorted decreasing, sin increasing; pair them by angle
    return np.arctan2(sin, cos)


def grassmann_distance(v1, v2) -> float:
    """``2 sin(phi_max / 2)`` with ``phi_max`` the largest principal angle."""
    phi = principal_angles(v1, v2)
    return float(2.0 * math.sin(phi[-1] / 2.0))


def _clip_frame(m):
    u, s, vt = np.linalg.svd(m)
    return u @ np.diag(np.maximum(s, 1.0)) @ vt


def grassmann_distance_numeric(v1, v2, restarts: int = 3, rng=None) -> float:
    """Direct minimization of ``||U1 G1 - U2 G2||`` over ``G_i`` with singular values >= 1.

    Seeded at frames aligned by principal vectors, plus random restarts; returns
    an upper bound on the infimum.
    """
    s1, s2 = _as_subspace(v1), _as_subspace(v2)
    if (s1.d, s1.p) != (s2.d, s2.p):
        raise DimensionMismatch("subspaces must have equal ambient dimension and rank")
    p = s1.p
    u, _, vt = np.linalg.svd(s1.basis.T @ s2.basis)
    rng = np.random.default_rng(0) if rng is None else rng

    def cost(z):
        g1 = _clip_frame(z[: p * p].reshape(p, p))
        g2 = _clip_frame(z[p * p:].reshape(p, p))
        return np.linalg.norm(s1.basis @ g1 - s2.basis @ g2, 2)

    seeds = [np.concatenate([u.reshape(-1), vt.T.reshape(-1)])]
    seeds += [rng.standard_normal(2 * p * p) * 2 for _ in range(restarts)]
    best = math.inf
    for z0 in seeds:
        res = minimize(cost, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000 * p})
        best = min(best, float(res.fun), float(cost(z0)))
    return best


def random_subspace(d: int, p: int, rng) -> Subspace:
    return Subspace(rng.standard_normal((d, p)))


def lipschitz_bolicity_property(m, trials: int = 1000, p: int = 1, rng=None) -> float:
    """Largest observed ``dist(L V1, L V2) / dist(V1, V2)`` over random pairs.

    The ratio never exceeds ``bol(L)``.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[0]
    if not 1 <= p < d:
        raise PreconditionViolated("need 1 <= p < d")
    bolicity(m)
    rng = np.random.default_rng(0) if rng is None else rng
    worst = 0.0
    for _ in range(trials):
        a, b = random_subspace(d, p, rng), random_subspace(d, p, rng)
        base = grassmann_distance(a, b)
        if base < 1e-8:
            continue
        worst = max(worst, grassmann_distance(a.image(m), b.image(m)) / base)
    return worst
