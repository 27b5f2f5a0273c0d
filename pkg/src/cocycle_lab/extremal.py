"""Extremal and Barabanov norms: construction and verification.

A norm field is extremal for ``beta`` when ``log sup ||F(x)||`` (operator norm
from the fiber at ``x`` to the fiber at ``Tx``) equals ``beta``. The functions
here never estimate ``beta`` themselves; it is always an argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .cocycle import Cocycle
from .errors import NotConverged, PreconditionViolated
from .holonomy import ObstructionReport, riemannian_obstruction, unstable_holonomy
from .norms import NormField, PolytopeNorm, WordSupNorm
from .symbolic import Point, splice

__all__ = [
    "ExtremalityReport",
    "extremality_check",
    "BarabanovIterate",
    "constant_barabanov_iterate",
    "calibration_check",
    "riemannian_obstruction",
    "ObstructionReport",
    "perturbed_example",
    "PerturbedExample",
    "rotation",
]

EXACT_TOL = 1e-6
GRID_TOL = 1e-3


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


@dataclass(frozen=True)
class ExtremalityReport:
    sup_log_operator_norm: float
    beta_used: float
    slack: float
    worst_window: str
    worst_direction: np.ndarray
    extremal: bool
    exact: bool

    def as_dict(self):
        return {"sup_log_operator_norm": self.sup_log_operator_norm, "beta_used": self.beta_used,
                "slack": self.slack, "worst_window": self.worst_window,
                "worst_direction": [float(v) for v in self.worst_direction],
                "extremal": self.extremal, "exact": self.exact}


def _directions(d, count, rng):
    if d == 2:
        t = np.pi * np.arange(count) / count
        return np.column_stack([np.cos(t), np.sin(t)])
    v = rng.standard_normal((count, d))
    return v / np.linalg.norm(v, axis=1)[:, None]


def _contexts(c: Cocycle):
    """Points ``x`` covering every window context ``x_{-r} ... x_{r+1}``."""
    r = c.step_radius
    words = c.base.admissible_words(2 * r + 2)
    return [(w, c.base.extend_word(w, -r)) for w in words]


def extremality_check(c: Cocycle, norm: NormField, beta: float, grid: int = 10_000,
                      rng=None) -> ExtremalityReport:
    """``sup log ||F(x)||`` in the given norm field and its slack over ``beta``.

    Constant norms use exact operator norms. Point-dependent norms maximize
    ``|||F(x) v|||_{Tx} / |||v|||_x`` over a direction grid (half circle when
    ``d = 2``, random directions otherwise) with a local refinement.
    """
    if norm.constant:
        ops = norm.operator_norms(c.matrices)
        i = int(np.argmax(ops))
        sup = math.log(ops[i])
        slack = sup - beta
        return ExtremalityReport(sup, beta, slack, "".join(map(str, c.windows[i])),
                                 np.asarray(norm.worst_direction(c.matrices[i]), dtype=float),
                                 slack <= EXACT_TOL, True)
    rng = np.random.default_rng(0) if rng is None else rng
    d = c.dimension
    dirs = _directions(d, grid, rng)
    best = (-math.inf, "", None)
    for word, x in _contexts(c):
        f = c.matrix_at(x)
        tx = x.shifted(1)

        def log_ratio(v, f=f, x=x, tx=tx):
            v = np.atleast_2d(v)
            return np.log(norm.value(v @ f.T, tx)) - np.log(norm.value(v, x))

        vals = log_ratio(dirs)
        i = int(np.argmax(vals))
        val, vec = float(vals[i]), dirs[i]
        if d == 2:
            t0 = math.pi * i / grid
            h = math.pi / grid
            res = minimize_scalar(lambda t: -log_ratio(np.array([math.cos(t), math.sin(t)]))[0],
                                  bounds=(t0 - h, t0 + h), method="bounded",
                                  options={"xatol": 1e-10})
            if -res.fun > val:
                val, vec = float(-res.fun), np.array([math.cos(res.x), math.sin(res.x)])
        if val > best[0]:
            best = (val, "".join(map(str, word)), vec)
    sup, win, vec = best
    slack = sup - beta
    return ExtremalityReport(sup, beta, slack, win, vec, slack <= GRID_TOL, False)


@dataclass
class BarabanovIterate:
    norm: NormField
    residual: float
    residuals: list
    iterations: int


def constant_barabanov_iterate(matrices, beta: float, grid: int = 720, iters: int = 500,
                               tol: float = 1e-12, stall: int = 50,
                               accept: float = 1e-3) -> BarabanovIterate:
    """Value iteration ``g <- e^{-beta} max_i g o A_i`` for a constant Barabanov norm.

    For ``d = 2`` the norm is represented on ``grid`` directions of the circle
    and evaluated between them as the gauge of the convex hull of ``u_j / g_j``,
    so each iterate is a genuine polytope norm. The residual is the sup over
    the grid of ``|e^{-beta} max_i |||A_i u||| - |||u|||| / max |||u|||``. After
    ``stall`` iterations without improvement the iteration stops, raising
    NotConverged if the residual is still above ``accept``. For ``d >= 3`` the
    truncated word-supremum formula is returned instead, with its residual on
    sampled directions.
    """
    mats = [np.asarray(a, dtype=float) for a in matrices]
    d = mats[0].shape[0]
    scale = math.exp(-beta)
    if d != 2:
        norm = WordSupNorm(mats, beta, n_max=min(iters, 10))
        dirs = _directions(d, 2000, np.random.default_rng(0))
        cur = norm.value(dirs)
        new = scale * np.max([norm.value(dirs @ a.T) for a in mats], axis=0)
        res = float(np.max(np.abs(new - cur)) / np.max(cur))
        return BarabanovIterate(norm, res, [res], 0)
    t = 2 * np.pi * np.arange(grid) / grid
    dirs = np.column_stack([np.cos(t), np.sin(t)])
    images = [dirs @ a.T for a in mats]
    g = np.ones(grid)
    history = []
    best, since = math.inf, 0
    norm = PolytopeNorm.from_points(dirs / g[:, None])
    for it in range(1, iters + 1):
        cur = norm.value(dirs)
        new = scale * np.max([norm.value(im) for im in images], axis=0)
        res = float(np.max(np.abs(new - cur)) / np.max(cur))
        history.append(res)
        if res < best * (1 - 1e-9):
            best, since = res, 0
        else:
            since += 1
        g = new / np.max(new)
        norm = PolytopeNorm.from_points(dirs / g[:, None])
        if res < tol:
            break
        if since >= stall:
            if best > accept:
                raise NotConverged(f"residual stuck at {best:.3e} for {stall} iterations "
                                   "(wrong beta or reducible set?)")
            break  # stalled at the grid resolution
    cur = norm.value(dirs)
    new = scale * np.max([norm.value(im) for im in images], axis=0)
    res = float(np.max(np.abs(new - cur)) / np.max(cur))
    return BarabanovIterate(norm, res, history, len(history))


def calibration_check(c: Cocycle, norm: NormField, beta: float, samples: int = 200,
                      rng=None, rtol: float = 1e-6) -> float:
    """Fraction of random ``(x, u)`` admitting a calibrated one-step continuation.

    For a constant norm the admissible choices are the windows compatible with
    the past ``x_{<0}``: the test is ``max |||F(w) u||| = e^beta |||u|||``. For a
    point-dependent norm the past ``x_{<=0}`` is kept and the future symbols are
    chosen, transporting ``u`` by the unstable holonomy.
    """
    rng = np.random.default_rng(0) if rng is None else rng
    r = c.step_radius
    d = c.dimension
    base = c.base
    hits = 0
    for _ in range(samples):
        word = [int(rng.integers(base.n_symbols))]
        while len(word) < 2 * r + 3:
            nxt = [b for b in range(base.n_symbols) if base.allowed(word[-1], b)]
            word.append(int(rng.choice(nxt)))
        x = base.extend_word(word, -(r + 1))
        u = rng.standard_normal(d)
        target = math.exp(beta) * norm.value(u, x)
        if norm.constant:
            past = x.block(-r, 0)
            cands = [w for w in c.windows if w[:r] == past]
            got = max(norm.value(c.table[w] @ u) for w in cands)
        else:
            past = x.block(-r, 1)
            got = -math.inf
            for w in c.windows:
                if w[: r + 1] != past:
                    continue
                tail = w[r + 1:] if r > 0 else ()
                y = x if r == 0 else splice(x, base.extend_word(tail, 1), 1)
                v = u if r == 0 else unstable_holonomy(c, x, y, tol=1e-13).matrix @ u
                for b in range(base.n_symbols):
                    if not base.allowed(y.symbol(r), b):
                        continue
                    yb = splice(y, base.extend_word((y.symbol(r), b), r), r + 1)
                    got = max(got, norm.value(c.matrix_at(yb) @ v, yb.shifted(1)))
        if abs(got - target) <= rtol * max(target, 1e-300):
            hits += 1
    return hits / samples


@dataclass(frozen=True)
class PerturbedExample:
    matrices: tuple
    product: np.ndarray
    exponent: float
    word: str


def perturbed_example(m: int) -> PerturbedExample:
    """Rotation ``A0~`` by ``pi/2 - pi/(4m)`` paired with ``A1``; needs ``m = 2 mod 4``.

    Returns ``A0~^m A1`` and the top exponent of the periodic word ``1 0^m``
    computed from the cycle product.
    """
    if m < 2 or m % 4 != 2:
        raise PreconditionViolated("m must be congruent to 2 mod 4")
    a0 = rotation(math.pi / 2 - math.pi / (4 * m))
    a1 = np.array([[0.8, -0.1], [0.8, 0.1]])
    c = Cocycle.from_matrices([a0, a1])
    prod = np.linalg.matrix_power(a0, m) @ a1
    word = "1" + "0" * m
    cyc = c.cycle_product(word)
    exponent = math.log(np.abs(np.linalg.eigvals(cyc)).max()) / (m + 1)
    return PerturbedExample((a0, a1), prod, exponent, word)
