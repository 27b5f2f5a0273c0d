"""Mather sets, calibrated vectors and dominated splittings.

Mather sets are represented by their periodic skeleton: the periodic orbits
(up to a period bound) whose top ``p`` Lyapunov exponents are all maximal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .cocycle import exterior_power
from .errors import MatherSetEmpty, NotOnUnstableSet, PreconditionViolated
from .grassmann import Subspace, grassmann_distance
from .norms import NormField
from .scenarios import ExampleNonSpaceCocycle
from .symbolic import Point, PeriodicWord, _parse_word, _word_str, enumerate_periodic_words

__all__ = [
    "MatherApprox",
    "mather_set_approx",
    "periodic_spectra",
    "SplittingReport",
    "dominated_splitting_test",
    "splitting_series",
    "fit_gap",
    "equivariance_defect",
    "calibrated_check",
    "calibrated_cone_slope",
    "SubordinationReport",
    "subordination_check",
]


def periodic_spectra(c, max_period: int):
    """``[(PeriodicWord, exponents)]``, exponents sorted in decreasing order."""
    out = []
    for w in enumerate_periodic_words(c.base, max_period):
        prod = c.cycle_product(w.word)
        mods = np.sort(np.abs(np.linalg.eigvals(prod)))[::-1]
        out.append((w, np.log(mods) / w.period))
    return out


@dataclass
class MatherApprox:
    index_p: int
    orbits: list
    tol: float
    beta_used: float
    exponents: dict = field(default_factory=dict)
    wedge_beta: float = math.nan
    wedge_consistent: bool = True


def mather_set_approx(c, p: int, max_period: int = 8, tol: float = 1e-9) -> MatherApprox:
    """Periodic orbits whose first ``p`` exponents are within ``tol`` of the empirical beta.

    ``wedge_beta`` is the periodic lower bound for the ``p``-th exterior power;
    when the set is nonempty it should equal ``p`` times beta, which is
    recorded in ``wedge_consistent``.
    """
    d = c.dimension
    if not 1 <= p <= d:
        raise PreconditionViolated("need 1 <= p <= d")
    spectra = periodic_spectra(c, max_period)
    beta = max(float(e[0]) for _, e in spectra)
    kept = [w for w, e in spectra if np.all(e[:p] >= beta - tol)]
    exps = {str(w): e.tolist() for w, e in spectra}
    wedge_beta = max(float(np.sum(e[:p])) for _, e in spectra)
    consistent = abs(wedge_beta - p * beta) <= 2 * tol
    if not kept:
        raise MatherSetEmpty(f"no periodic orbit up to period {max_period} has "
                             f"{p} maximal exponents")
    return MatherApprox(p, kept, tol, beta, exps, wedge_beta, consistent)


@dataclass
class SplittingReport:
    p: int
    tau: float
    c: float
    r_squared: float
    subspaces: list
    series: list
    samples: list


def _log_wedge_series(c, x: Point, n_max: int, powers):
    """``log ||wedge^k Phi^n_x||`` for ``n = 1..n_max`` and each ``k`` in ``powers``."""
    d = c.dimension
    acc = {k: np.eye(math.comb(d, k)) for k in powers}
    logs = {k: 0.0 for k in powers}
    out = {k: [] for k in powers}
    for i in range(n_max):
        f = c.matrix_at(x.shifted(i))
        for k in powers:
            if k == 0:
                out[k].append(0.0)
                continue
            a = exterior_power(f, k) @ acc[k]
            s = np.linalg.norm(a, 2)
            acc[k] = a / s
            logs[k] += math.log(s)
            out[k].append(logs[k])
    return out


def _dominating_space(c, x: Point, p: int, n: int) -> Subspace:
    """Top-``p`` left singular space of ``Phi^n_{T^-n x}``."""
    start = x.shifted(-n)
    acc = np.eye(c.dimension)
    for i in range(n):
        acc = c.matrix_at(start.shifted(i)) @ acc
        acc /= np.linalg.norm(acc, 2)
    u, _, _ = np.linalg.svd(acc)
    return Subspace(u[:, :p])


def splitting_series(c, samples, p: int, n_max: int = 40) -> np.ndarray:
    """``log(sigma_{p+1}/sigma_p)(Phi^n_x)``, one row per sample, columns ``n = 1..n_max``."""
    d = c.dimension
    if not 1 <= p < d:
        raise PreconditionViolated("need 1 <= p < d")
    samples = list(samples)
    if not samples:
        raise PreconditionViolated("need at least one sample point")
    data = []
    for x in samples:
        w = _log_wedge_series(c, x, n_max, (p - 1, p, p + 1))
        data.append([w[p + 1][i] - 2 * w[p][i] + w[p - 1][i] for i in range(n_max)])
    return np.array(data)


def fit_gap(data, tau_min: float = 1e-8, r2_min: float = 0.9, slack: float = 0.5):
    """Least-squares line through the per-``n`` maxima of ``data``.

    Returns ``(tau, c, r_squared, accepted)``.
    """
    n_max = data.shape[1]
    ns = np.arange(1, n_max + 1)
    ymax = data.max(axis=0)
    a = np.vstack([ns, np.ones(n_max)]).T
    (slope, icpt), *_ = np.linalg.lstsq(a, ymax, rcond=None)
    fit = a @ np.array([slope, icpt])
    ss_res = float(np.sum((ymax - fit) ** 2))
    ss_tot = float(np.sum((ymax - ymax.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else (1.0 if ss_res == 0 else 0.0)
    tau = -float(slope)
    ok = tau > tau_min and r2 >= r2_min and not np.any(data > fit[None, :] + slack)
    return tau, math.exp(float(icpt)), r2, bool(ok)


def dominated_splitting_test(c, samples, p: int, n_max: int = 40, tau_min: float = 1e-8,
                             r2_min: float = 0.9, slack: float = 0.5):
    """Fit ``log(sigma_{p+1}/sigma_p)(Phi^n_x) ~ log c - tau n`` on per-``n`` maxima.

    Reports a splitting when ``tau > tau_min``, ``r^2 >= r2_min`` and every data
    point lies below the fitted line plus ``slack``; otherwise returns None.
    """
    samples = list(samples)
    data = splitting_series(c, samples, p, n_max)
    tau, const, r2, ok = fit_gap(data, tau_min, r2_min, slack)
    if not ok:
        return None
    series = list(zip(range(1, n_max + 1), data.max(axis=0).tolist()))
    spaces = [(x, _dominating_space(c, x, p, n_max)) for x in samples]
    return SplittingReport(p, tau, const, r2, spaces, series, samples)


def equivariance_defect(c, report: SplittingReport, n_max: int = 40) -> float:
    """``max dist(F(x) E_x, E_{Tx})`` over the report's samples."""
    worst = 0.0
    for x, space in report.subspaces:
        nxt = _dominating_space(c, x.shifted(1), report.p, n_max)
        worst = max(worst, grassmann_distance(space.image(c.matrix_at(x)), nxt))
    return worst


def calibrated_check(c, norm: NormField, beta: float, x: Point, u, n_window: int = 10,
                     rtol: float = 1e-6) -> bool:
    """Whether ``|||Phi^n_x u||| = e^{n beta} |||u|||`` for all ``|n| <= n_window``."""
    u = np.asarray(u, dtype=float)
    if not np.any(u):
        return True
    base = norm.value(u, x)
    fwd, bwd = u.copy(), u.copy()
    for n in range(1, n_window + 1):
        fwd = c.matrix_at(x.shifted(n - 1)) @ fwd
        bwd = np.linalg.solve(c.matrix_at(x.shifted(-n)), bwd)
        for k, v in ((n, fwd), (-n, bwd)):
            want = math.exp(k * beta) * base
            if abs(norm.value(v, x.shifted(k)) - want) > rtol * want:
                return False
    return True


def calibrated_cone_slope(c: ExampleNonSpaceCocycle, x: Point, n_terms: int = 50) -> float:
    """``exp(sum_{n>=1} f(T^-n x))`` for ``x`` backward asymptotic to the fixed point.

    The first ``n_terms`` terms are summed directly; once all non-background
    symbols have moved to positive indices the terms form an exact geometric
    series, which is added in closed form.
    """
    x0 = c.x0
    if not all(s == 0 for s in x.left):
        raise NotOnUnstableSet("x is not backward asymptotic to the fixed point")
    if x == x0:
        return 1.0
    i_min = next(n for n in range(x.core_start - 1, x.core_end + len(x.right) + 1)
                 if x.symbol(n) != 0)
    n_terms = max(n_terms, -i_min)
    total = sum(c.f(x.shifted(-n)) for n in range(1, n_terms + 1))
    q = math.exp(-c.theta * c.base.lam)
    total += q ** (n_terms + 1 + i_min) / (1 - q)
    return math.exp(total)


@dataclass
class SubordinationReport:
    passed: bool
    exponents: dict
    violations: list
    block_length: int


def _cyclic_blocks(word, k):
    w = tuple(word)
    return {tuple(w[(i + j) % len(w)] for j in range(k)) for i in range(len(w))}


def subordination_check(c, mather: MatherApprox, extra_orbits, block_length: int = 1):
    """Check that orbits supported inside the Mather skeleton are maximizing.

    Support containment is tested on cyclic blocks of ``block_length`` symbols.
    """
    allowed = set()
    for w in mather.orbits:
        allowed |= _cyclic_blocks(w.word, block_length)
    exps, bad = {}, []
    for w in extra_orbits:
        # non-primitive words such as "00" are accepted as given
        word = w.word if isinstance(w, PeriodicWord) else _parse_word(w)
        name = _word_str(word)
        if not c.base.is_cyclic_admissible(word):
            raise PreconditionViolated(f"orbit {name} is not cyclically admissible")
        if not _cyclic_blocks(word, block_length) <= allowed:
            raise PreconditionViolated(f"orbit {name} leaves the Mather set support")
        prod = c.cycle_product(word)
        chi = math.log(np.abs(np.linalg.eigvals(prod)).max()) / len(word)
        exps[name] = chi
        if abs(chi - mather.beta_used) > mather.tol:
            bad.append(name)
    return SubordinationReport(not bad, exps, bad, block_length)
