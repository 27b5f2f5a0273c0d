"""Stable and unstable holonomies.

The stable holonomy ``H^s_{y<-x} = lim (Phi^n_y)^{-1} Phi^n_x`` is built from
exact telescoping increments

    H_{n+1} - H_n = (Phi^{n+1}_y)^{-1} (F(T^n x) - F(T^n y)) Phi^n_x,

which vanish identically once the windows of ``T^n x`` and ``T^n y`` agree
when the cocycle is locally constant. Any object with ``dimension`` and
``matrix_at`` is accepted, so genuinely Holder cocycles work too. The unstable
holonomy is the mirror image along the backward orbit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cocycle import Cocycle
from .errors import (
    Diverging,
    NotHomoclinic,
    NotOnStableSet,
    NotOnUnstableSet,
    NotRotationFixedPoint,
)
from .symbolic import Point, in_stable, in_unstable

__all__ = [
    "HolonomyResult",
    "stable_holonomy",
    "unstable_holonomy",
    "loop_holonomy",
    "riemannian_obstruction",
    "ObstructionReport",
    "CERT_WINDOW",
    "DIVERGENCE_RUN",
]

CERT_WINDOW = 5
DIVERGENCE_RUN = 5


@dataclass
class HolonomyResult:
    matrix: np.ndarray
    iterations_used: int
    last_increment_norm: float
    certified: bool
    increments: list = field(default_factory=list)


def _certified_at(incs, tol):
    """Start of a trailing window of small, nonincreasing increments, else None."""
    if len(incs) < CERT_WINDOW:
        return None
    tail = incs[-CERT_WINDOW:]
    if max(tail) > tol:
        return None
    if any(b > a for a, b in zip(tail, tail[1:])):
        return None
    return len(incs) - CERT_WINDOW


def _generators(c, xn, yn):
    """``(F(xn), F(yn), differ)``, deciding ``differ`` by windows when available."""
    if isinstance(c, Cocycle):
        wx, wy = c.window(xn), c.window(yn)
        return c.table[wx], c.table[wy], wx != wy
    fx, fy = c.matrix_at(xn), c.matrix_at(yn)
    return fx, fy, not np.array_equal(fx, fy)


def _iterate(step, d, tol, n_max):
    """Shared driver: ``step(n, state)`` returns the increment and the new state."""
    h = np.eye(d)
    incs = []
    state = None
    run = 0
    for n in range(n_max):
        inc, state = step(n, state)
        if inc is not None:
            h = h + inc
            val = float(np.linalg.norm(inc, 2))
        else:
            val = 0.0
        if incs and val > incs[-1] and val > tol:
            run += 1
        else:
            run = 0
        incs.append(val)
        if run >= DIVERGENCE_RUN:
            raise Diverging(f"holonomy increments grew for {run} consecutive steps "
                            f"(last norm {val:.3e})")
        start = _certified_at(incs, tol)
        if start is not None:
            return HolonomyResult(h, start + 1, incs[-1], True, incs)
    return HolonomyResult(h, n_max, incs[-1] if incs else 0.0, False, incs)


def stable_holonomy(c: Cocycle, x: Point, y: Point, tol: float = 1e-10,
                    n_max: int = 200) -> HolonomyResult:
    """Stable holonomy ``H^s_{y<-x}`` for ``y`` forward asymptotic to ``x``.

    ``iterations_used`` is the index ``n`` from which all observed increments
    stay below ``tol``; ``certified`` requires a trailing window of five such
    increments that do not increase. Raises Diverging after five consecutive
    increasing increments above ``tol``.
    """
    if not in_stable(x, y):
        raise NotOnStableSet("y is not on the stable set of x")
    d = c.dimension
    if x == y:
        return HolonomyResult(np.eye(d), 0, 0.0, True, [])

    def step(n, state):
        px, py = state if state is not None else (np.eye(d), np.eye(d))
        fx, fy, differ = _generators(c, x.shifted(n), y.shifted(n))
        py_next = fy @ py
        inc = None
        if differ:
            inc = np.linalg.solve(py_next, (fx - fy) @ px)
        px_next = fx @ px
        s = np.linalg.norm(py_next, 2)
        return inc, (px_next / s, py_next / s)

    return _iterate(step, d, tol, n_max)


def unstable_holonomy(c: Cocycle, x: Point, y: Point, tol: float = 1e-10,
                      n_max: int = 200) -> HolonomyResult:
    """Unstable holonomy ``H^u_{y<-x} = lim Phi^n_{T^-n y} (Phi^n_{T^-n x})^{-1}``."""
    if not in_unstable(x, y):
        raise NotOnUnstableSet("y is not on the unstable set of x")
    d = c.dimension
    if x == y:
        return HolonomyResult(np.eye(d), 0, 0.0, True, [])

    def step(n, state):
        qx, qy = state if state is not None else (np.eye(d), np.eye(d))
        fx, fy, differ = _generators(c, x.shifted(-(n + 1)), y.shifted(-(n + 1)))
        qx_next = qx @ fx
        inc = None
        if differ:
            inc = np.linalg.solve(qx_next.T, (qy @ (fy - fx)).T).T
        qy_next = qy @ fy
        s = np.linalg.norm(qx_next, 2)
        return inc, (qx_next / s, qy_next / s)

    return _iterate(step, d, tol, n_max)


def loop_holonomy(c: Cocycle, p: Point, q: Point, k: int, tol: float = 1e-12,
                  n_max: int = 200) -> np.ndarray:
    """Holonomy loop at a fixed point ``p`` through a homoclinic point ``q``.

    ``Phi_p^{-k} H^s_{p<-T^k q} Phi^{2k}_{T^-k q} H^u_{T^-k q<-p} Phi_p^{-k}``.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not p.is_fixed():
        raise NotHomoclinic("p must be a fixed point")
    if q == p or not (in_stable(p, q) and in_unstable(p, q)):
        raise NotHomoclinic("q must be homoclinic to p and distinct from it")
    qk, qmk = q.shifted(k), q.shifted(-k)
    hs = stable_holonomy(c, qk, p, tol, n_max)
    hu = unstable_holonomy(c, p, qmk, tol, n_max)
    fp_inv_k = np.linalg.matrix_power(np.linalg.inv(c.matrix_at(p)), k)
    middle = c.product(qmk, 2 * k)
    return fp_inv_k @ hs.matrix @ middle @ hu.matrix @ fp_inv_k


@dataclass(frozen=True)
class ObstructionReport:
    loop: np.ndarray
    loop_norm: float
    obstructed: bool
    k: int
    norms: tuple


def riemannian_obstruction(c: Cocycle, p: Point, q: Point, ks=(1, 2, 3, 4, 5),
                           margin: float = 1e-9) -> ObstructionReport:
    """Test whether a holonomy loop fails to be a Euclidean isometry.

    Applies when ``d = 2`` and ``F(p)`` is a scalar multiple of an orthogonal
    matrix without real eigenvalues, so the only invariant inner product at
    ``p`` is the Euclidean one. Loops must then be orthogonal; a spectral norm
    above ``1 + margin`` obstructs every continuous invariant Riemannian metric.
    """
    if c.dimension != 2:
        raise NotRotationFixedPoint("the test needs d = 2")
    if not p.is_fixed():
        raise NotHomoclinic("p must be a fixed point")
    a = c.matrix_at(p)
    s = np.linalg.svd(a, compute_uv=False)
    conformal = abs(s[0] - s[1]) <= 1e-12 * s[0]
    ev = np.linalg.eigvals(a)
    real_ev = np.max(np.abs(ev.imag)) <= 1e-12 * s[0]
    if not conformal or real_ev:
        raise NotRotationFixedPoint("F(p) is not a non-real rotation up to scale")
    norms = []
    best = None
    for k in ks:
        loop = loop_holonomy(c, p, q, k)
        nrm = float(np.linalg.norm(loop, 2))
        norms.append(nrm)
        if best is None or nrm > best[1]:
            best = (loop, nrm, k)
    loop, nrm, k = best
    return ObstructionReport(loop, nrm, nrm > 1 + margin, k, tuple(norms))
