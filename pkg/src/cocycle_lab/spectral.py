"""Two-sided estimates of the maximal Lyapunov exponent ``beta``.

Upper bounds come from ``(1/n) log max_w ||A_w||`` over admissible words of
length ``n`` (valid in any operator norm, by subadditivity). Lower bounds come
from periodic orbits, ``(1/|w|) log rho(A_w)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cocycle import Cocycle, c0_distance, check_irreducible, exterior_power
from .errors import PreconditionViolated, TooLarge
from .symbolic import PeriodicWord, enumerate_periodic_words

__all__ = [
    "WORD_CAP",
    "BetaBracket",
    "PeriodicExponent",
    "operator_norms",
    "count_words",
    "max_product_norm",
    "beta_upper",
    "beta_upper_table",
    "periodic_exponents",
    "beta_lower_periodic",
    "estimate_beta",
    "berger_wang_table",
    "lyapunov_spectrum_periodic",
    "log_singular_values_of_product",
    "GrowthFit",
    "polynomial_growth_fit",
    "lipschitz_beta_test",
]

WORD_CAP = 10 ** 8
_LEVEL_FLOATS = 4_000_000


@dataclass(frozen=True)
class BetaBracket:
    lower: float
    upper: float
    n_lower: int
    n_upper: int
    upper_norm: str = "euclidean"
    lower_witness: str = ""
    upper_witness: str = ""

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lower + self.upper)

    @property
    def width(self) -> float:
        return self.upper - self.lower


@dataclass(frozen=True)
class PeriodicExponent:
    word: PeriodicWord
    exponent: float


def operator_norms(mats, norm="euclidean") -> np.ndarray:
    """Operator norms of a stack of matrices for ``euclidean``, ``max`` or a NormField."""
    mats = np.asarray(mats, dtype=float)
    if isinstance(norm, str):
        if norm == "euclidean":
            if mats.shape[-1] == 2:
                fro = np.einsum("...ij,...ij->...", mats, mats)
                det = mats[..., 0, 0] * mats[..., 1, 1] - mats[..., 0, 1] * mats[..., 1, 0]
                disc = np.sqrt(np.maximum(fro * fro - 4 * det * det, 0.0))
                return np.sqrt(0.5 * (fro + disc))
            return np.linalg.svd(mats, compute_uv=False)[..., 0]
        if norm == "max":
            return np.abs(mats).sum(axis=-1).max(axis=-1)
        raise PreconditionViolated(f"unknown norm {norm!r}")
    if not getattr(norm, "constant", False):
        raise PreconditionViolated("upper bounds need a constant norm")
    return norm.operator_norms(mats)


def _norm_name(norm):
    return norm if isinstance(norm, str) else getattr(norm, "name", type(norm).__name__)


def count_words(c: Cocycle, n: int) -> int:
    """Number of admissible length-``n`` words of the one-step recoding."""
    _, trans, _ = c.one_step_view()
    t = trans.astype(object)
    v = np.ones(trans.shape[0], dtype=object)
    for _ in range(n - 1):
        v = t.dot(v)
    return int(sum(v))


def _levels(c: Cocycle, n_max: int):
    """Yield ``(n, last, products, words)`` for every word length ``1..n_max``."""
    mats, trans, _ = c.one_step_view()
    m = len(mats)
    last = np.arange(m)
    words = last[:, None]
    prods = mats.copy()
    yield 1, last, prods, words
    for n in range(2, n_max + 1):
        new_last, new_prods, new_words = [], [], []
        for t in range(m):
            mask = trans[last, t]
            if not mask.any():
                continue
            new_prods.append(mats[t] @ prods[mask])
            new_last.append(np.full(int(mask.sum()), t))
            new_words.append(np.hstack([words[mask], new_last[-1][:, None]]))
        last = np.concatenate(new_last)
        prods = np.concatenate(new_prods)
        words = np.concatenate(new_words)
        yield n, last, prods, words


def _decode(c: Cocycle, blocks) -> str:
    _, _, windows = c.one_step_view()
    r = c.step_radius
    return "".join(str(windows[b][r]) for b in blocks) if c.base.n_symbols <= 10 else ".".join(
        str(windows[b][r]) for b in blocks)


def beta_upper_table(c: Cocycle, n_max: int, norm="euclidean"):
    """``[(n, (1/n) log max ||A_w||, witness)]`` for ``n = 1..n_max`` by level-wise enumeration."""
    if n_max < 1:
        raise PreconditionViolated("n must be at least 1")
    total = count_words(c, n_max)
    if total > WORD_CAP:
        raise TooLarge(f"{total} words of length {n_max} exceed the cap {WORD_CAP:g}")
    d2 = c.dimension ** 2
    if total * d2 > 8 * _LEVEL_FLOATS:
        raise TooLarge("level-wise table too large; use beta_upper for single lengths")
    rows = []
    for n, _, prods, words in _levels(c, n_max):
        vals = operator_norms(prods, norm)
        k = int(np.argmax(vals))
        rows.append((n, math.log(vals[k]) / n, _decode(c, words[k])))
    return rows


def max_product_norm(c: Cocycle, n: int, norm="euclidean"):
    """``(max_w ||A_w||, witness)`` over admissible words of length ``n``.

    Small instances enumerate level by level. Larger ones combine a precomputed
    suffix level with a depth-first prefix search, pruned by submultiplicativity.
    """
    if n < 1:
        raise PreconditionViolated("n must be at least 1")
    total = count_words(c, n)
    if total > WORD_CAP:
        raise TooLarge(f"{total} words of length {n} exceed the cap {WORD_CAP:g}")
    d2 = c.dimension ** 2
    if total * d2 <= 2 * _LEVEL_FLOATS:
        for k, _, prods, words in _levels(c, n):
            if k == n:
                vals = operator_norms(prods, norm)
                i = int(np.argmax(vals))
                return float(vals[i]), _decode(c, words[i])
    mats, trans, _ = c.one_step_view()
    s = 1
    while s < n and count_words(c, s + 1) * d2 <= _LEVEL_FLOATS:
        s += 1
    # exact maxima for short lengths give pruning bounds
    u_exact = {}
    suffix = None
    for k, last, prods, words in _levels(c, s):
        u_exact[k] = float(operator_norms(prods, norm).max())
        if k == s:
            suffix = (words[:, 0], prods, words)
    u_hat = [1.0] + [u_exact[k] for k in range(1, s + 1)]
    for k in range(s + 1, n + 1):
        u_hat.append(min(u_hat[a] * u_hat[k - a] for a in range(1, k)))
    first, sprods, swords = suffix
    groups = {}
    for a in range(len(mats)):
        idx = np.nonzero(trans[a][first])[0]
        groups[a] = (sprods[idx], swords[idx])
    m = n - s
    best = [0.0, None]

    def dfs(prefix, prod, depth):
        if depth == m:
            sp, sw = groups[prefix[-1]]
            if len(sp) == 0:
                return
            vals = operator_norms(sp @ prod, norm)
            i = int(np.argmax(vals))
            if vals[i] > best[0]:
                best[0] = float(vals[i])
                best[1] = list(prefix) + list(sw[i])
            return
        for t in range(len(mats)):
            if prefix and not trans[prefix[-1], t]:
                continue
            p2 = mats[t] @ prod
            bound = float(operator_norms(p2[None], norm)[0]) * u_hat[n - depth - 1]
            if bound <= best[0]:
                continue
            dfs(prefix + [t], p2, depth + 1)

    dfs([], np.eye(c.dimension), 0)
    return best[0], _decode(c, best[1])


def beta_upper(c: Cocycle, n: int, norm="euclidean") -> float:
    """``(1/n) log max ||A_w||`` over admissible length-``n`` words; an upper bound for beta."""
    value, _ = max_product_norm(c, n, norm)
    return math.log(value) / n


def periodic_exponents(c: Cocycle, max_period: int):
    """``[(PeriodicWord, top exponent)]`` for every periodic orbit of period <= max_period."""
    if max_period < 1:
        raise PreconditionViolated("max_period must be at least 1")
    n_words = c.base.n_symbols ** max_period
    if n_words > WORD_CAP and count_words(c, max_period) > WORD_CAP:
        raise TooLarge("periodic enumeration exceeds the cap")
    words = enumerate_periodic_words(c.base, max_period)
    out = []
    by_len = {}
    for w in words:
        by_len.setdefault(w.period, []).append(w)
    for k in sorted(by_len):
        group = by_len[k]
        arr = np.array([w.word for w in group], dtype=np.int64)
        prods = c.cycle_products(arr)
        rho = np.abs(np.linalg.eigvals(prods)).max(axis=1)
        with np.errstate(divide="ignore"):
            expo = np.log(rho) / k
        out.extend(zip(group, expo.tolist()))
    return out


def beta_lower_periodic(c: Cocycle, max_period: int):
    """``beta_n``: the best periodic exponent up to period ``max_period``, with its witness."""
    best = None
    for w, e in periodic_exponents(c, max_period):
        if best is None or e > best.exponent:
            best = PeriodicExponent(w, e)
    return best.exponent, best


def _affordable_length(c: Cocycle, budget: int, cap=64) -> int:
    n = 1
    while n < cap and count_words(c, n + 1) <= budget:
        n += 1
    return n


def estimate_beta(c: Cocycle, budget: int = 2 ** 16, norms=None) -> BetaBracket:
    """Bracket ``[beta_n, min_k U_k]`` at the largest affordable word length.

    ``norms`` defaults to Euclidean and max; a user polytope norm may be added.
    """
    n = _affordable_length(c, budget)
    candidates = ["euclidean", "max"] + list(norms or [])
    best_u = (math.inf, "", "")
    for norm in candidates:
        for k, val, wit in beta_upper_table(c, n, norm):
            if val < best_u[0]:
                best_u = (val, _norm_name(norm), wit)
    lower, witness = beta_lower_periodic(c, n)
    return BetaBracket(lower, best_u[0], n, n, best_u[1], str(witness.word), best_u[2])


def berger_wang_table(c: Cocycle, max_period: int, norm="euclidean"):
    """Rows ``(n, beta_n, upper_n, gap, witness)`` with ``upper_n = min_{k<=n} U_k``.

    ``beta_n`` is a running maximum, so it is nondecreasing by construction.
    """
    exps = periodic_exponents(c, max_period)
    uppers = beta_upper_table(c, max_period, norm)
    rows = []
    best_lower, best_word = -math.inf, None
    best_upper = math.inf
    i = 0
    for n in range(1, max_period + 1):
        while i < len(exps) and exps[i][0].period <= n:
            if exps[i][1] > best_lower:
                best_lower, best_word = exps[i][1], exps[i][0]
            i += 1
        best_upper = min(best_upper, uppers[n - 1][1])
        rows.append((n, best_lower, best_upper, best_upper - best_lower, str(best_word)))
    return rows


def lyapunov_spectrum_periodic(c: Cocycle, w) -> list:
    """``(1/|w|) log |eigenvalue|`` of the cycle product, in decreasing order."""
    if not isinstance(w, PeriodicWord):
        w = PeriodicWord(w)
    if not c.base.is_cyclic_admissible(w.word):
        raise PreconditionViolated("word is not cyclically admissible")
    prod = c.cycle_product(w.word)
    mods = np.sort(np.abs(np.linalg.eigvals(prod)))[::-1]
    return (np.log(mods) / w.period).tolist()


def log_singular_values_of_product(mats) -> np.ndarray:
    """``log sigma_i`` of ``mats[-1] @ ... @ mats[0]`` without overflow.

    Uses ``log sigma_p = log ||wedge^p P|| - log ||wedge^{p-1} P||`` with each
    exterior-power product renormalized at every step.
    """
    mats = [np.asarray(a, dtype=float) for a in mats]
    d = mats[0].shape[0]
    logs = np.zeros(d + 1)
    for p in range(1, d + 1):
        acc = np.eye(math.comb(d, p))
        lg = 0.0
        for a in mats:
            acc = exterior_power(a, p) @ acc
            s = np.linalg.norm(acc, 2)
            acc /= s
            lg += math.log(s)
        logs[p] = lg + math.log(np.linalg.norm(acc, 2))
    return np.diff(logs)


@dataclass(frozen=True)
class GrowthFit:
    degree: float
    log_c: float
    residual: float
    log_norms: tuple


def polynomial_growth_fit(c: Cocycle, beta: float, n_max: int = 16) -> GrowthFit:
    """Least-squares fit ``log max ||A_w|| - n beta ~ degree log n + log C`` over ``n <= n_max``."""
    if n_max < 2:
        raise PreconditionViolated("need n_max >= 2")
    ys, xs = [], []
    for n in range(1, n_max + 1):
        val, _ = max_product_norm(c, n, "euclidean")
        ys.append(math.log(val) - n * beta)
        xs.append(math.log(n))
    a = np.vstack([xs, np.ones(len(xs))]).T
    coef, *_ = np.linalg.lstsq(a, np.array(ys), rcond=None)
    resid = float(np.sqrt(np.mean((a @ coef - ys) ** 2)))
    return GrowthFit(float(coef[0]), float(coef[1]), resid, tuple(ys))


def lipschitz_beta_test(c1: Cocycle, c2: Cocycle, budget: int = 2 ** 12):
    """``(|e^b1 - e^b2|, ||c1 - c2||_0, ratio)`` with bracket midpoints; 0/0 reads as 0."""
    if c1.step_radius == 0 and c2.step_radius == 0:
        if not (check_irreducible(c1.matrices) and check_irreducible(c2.matrices)):
            raise PreconditionViolated("both cocycles must be irreducible")
    b1 = estimate_beta(c1, budget).midpoint
    b2 = estimate_beta(c2, budget).midpoint
    diff = abs(math.exp(b1) - math.exp(b2))
    dist = c0_distance(c1, c2)
    if dist == 0:
        return diff, 0.0, 0.0
    return diff, dist, diff / dist
