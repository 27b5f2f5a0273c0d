"""Locally constant linear cocycles over SFTs.

A cocycle of step radius ``r`` assigns an invertible ``d x d`` matrix to each
admissible window ``x_{-r} ... x_r``. Products follow the cocycle convention
``Phi^n_x = F(T^{n-1} x) ... F(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    ConfigError,
    DimensionMismatch,
    NotInvariant,
    PreconditionViolated,
    SingularMatrix,
)
from .symbolic import Point, Sft, _parse_word, _word_str

__all__ = [
    "Cocycle",
    "singular_values",
    "bolicity",
    "exterior_power",
    "fiber_bunching_check",
    "BunchingReport",
    "algebra_basis",
    "check_irreducible",
    "check_irreducible_onestep",
    "cocycle_product",
    "has_common_real_eigenvector",
    "split_by_invariant_subspace",
    "c0_distance",
    "COND_LIMIT",
]

COND_LIMIT = 1e12


def singular_values(m) -> np.ndarray:
    """Singular values in decreasing order (stacks allowed)."""
    return np.linalg.svd(np.asarray(m, dtype=float), compute_uv=False)


def bolicity(m) -> float:
    """``sigma_1 / sigma_d``; raises SingularMatrix beyond the conditioning limit."""
    s = singular_values(m)
    if s[-1] <= 0 or s[0] / s[-1] > COND_LIMIT:
        raise SingularMatrix(f"matrix is singular or ill-conditioned (cond > {COND_LIMIT:g})")
    return float(s[0] / s[-1])


def exterior_power(m, p: int) -> np.ndarray:
    """``p``-th exterior power in the basis ``e_I``, ``I`` increasing ``p``-subsets.

    Entry ``(I, J)`` is the minor ``det m[I, J]``. Accepts stacks ``(..., d, d)``.
    """
    m = np.asarray(m, dtype=float)
    d = m.shape[-1]
    if not 0 <= p <= d:
        raise PreconditionViolated(f"exterior power {p} out of range for dimension {d}")
    if p == 0:
        return np.ones(m.shape[:-2] + (1, 1))
    combos = np.array(list(combinations(range(d), p)))
    rows = combos[:, None, :, None]
    cols = combos[None, :, None, :]
    return np.linalg.det(m[..., rows, cols])


def _as_matrix(value, d=None, path=""):
    try:
        a = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("matrix entries must be numbers", path) from None
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ConfigError("expected a square matrix", path)
    if d is not None and a.shape[0] != d:
        raise ConfigError(f"expected a {d}x{d} matrix", path)
    if not np.isfinite(a).all():
        raise ConfigError("matrix entries must be finite", path)
    return a


class _ProductMixin:
    """Products built from ``matrix_at``; shared by all cocycle types."""

    def product(self, x: Point, n: int) -> np.ndarray:
        d = self.dimension
        if n >= 0:
            out = np.eye(d)
            for i in range(n):
                out = self.matrix_at(x.shifted(i)) @ out
            return out
        return np.linalg.inv(self.product(x.shifted(n), -n))

    def cycle_product(self, word) -> np.ndarray:
        """``Phi^p`` at the periodic point with period word ``word``."""
        word = _parse_word(word)
        return self.product(Point.periodic(word), len(word))


class Cocycle(_ProductMixin):
    """Locally constant cocycle given by a table of window matrices."""

    def __init__(self, base: Sft, table, step_radius: int = 0, check_conditioning=True):
        if step_radius < 0:
            raise ConfigError("step radius must be nonnegative", "r")
        self.base = base
        self.step_radius = r = int(step_radius)
        width = 2 * r + 1
        windows = base.admissible_words(width)
        if not windows:
            raise ConfigError("the SFT has no admissible windows", "entries")
        norm_table = {}
        d = None
        for key, val in table.items():
            k = _parse_word(key)
            path = f"entries.{_word_str(k)}"
            if len(k) != width:
                raise ConfigError(f"window must have length {width}", path)
            if not base.is_admissible(k):
                raise ConfigError("window is not admissible", path)
            a = _as_matrix(val, d, path)
            d = a.shape[0]
            norm_table[k] = a
        missing = [w for w in windows if w not in norm_table]
        if missing:
            raise ConfigError("missing matrix for window", f"entries.{_word_str(missing[0])}")
        self.dimension = d
        self.windows = windows
        self.table = {w: norm_table[w] for w in windows}
        self.matrices = np.array([self.table[w] for w in windows])
        if check_conditioning:
            s = singular_values(self.matrices)
            bad = np.nonzero((s[:, -1] <= 0) | (s[:, 0] > COND_LIMIT * s[:, -1]))[0]
            if bad.size:
                raise SingularMatrix(f"matrix for window {_word_str(windows[bad[0]])} is singular")
        n = base.n_symbols
        self._radix = n ** np.arange(width - 1, -1, -1)
        self._lut = None
        if n ** width <= 2_000_000:
            lut = np.full(n ** width, -1, dtype=np.int64)
            for i, w in enumerate(windows):
                lut[int(np.dot(w, self._radix))] = i
            self._lut = lut
        self._index = {w: i for i, w in enumerate(windows)}

    # construction -----------------------------------------------------------

    @classmethod
    def from_matrices(cls, matrices, lam=1.0, transitions=None):
        """One-step cocycle with ``F(x) = matrices[x_0]``."""
        mats = list(matrices)
        base = Sft(transitions, lam) if transitions is not None else Sft.full_shift(len(mats), lam)
        if base.n_symbols != len(mats):
            raise DimensionMismatch("one matrix per symbol is required")
        return cls(base, {(i,): m for i, m in enumerate(mats)}, 0)

    @classmethod
    def from_dict(cls, data, base: Sft | None = None, path="cocycle"):
        if not isinstance(data, dict):
            raise ConfigError("expected an object", path)
        d = data.get("d")
        r = data.get("r", 0)
        entries = data.get("entries")
        if not isinstance(d, int) or d < 1:
            raise ConfigError("d must be a positive integer", f"{path}.d")
        if not isinstance(r, int) or r < 0:
            raise ConfigError("r must be a nonnegative integer", f"{path}.r")
        if not isinstance(entries, dict) or not entries:
            raise ConfigError("entries must be a nonempty object", f"{path}.entries")
        table = {}
        for key, val in entries.items():
            try:
                k = _parse_word(key)
            except ValueError:
                raise ConfigError("window keys must be digit strings", f"{path}.entries.{key}") from None
            table[k] = _as_matrix(val, d, f"{path}.entries.{key}")
        if base is None:
            n = 1 + max(max(k) for k in table)
            base = Sft.full_shift(n)
        try:
            return cls(base, table, r)
        except ConfigError as err:
            raise ConfigError(str(err).split(": ", 1)[-1], f"{path}.{err.path}") from None

    def to_dict(self):
        return {"d": self.dimension, "r": self.step_radius,
                "entries": {_word_str(w): self.table[w].tolist() for w in self.windows}}

    def with_matrices(self, matrices) -> "Cocycle":
        """Same base and windows, new matrices (in ``self.windows`` order)."""
        return Cocycle(self.base, dict(zip(self.windows, matrices)), self.step_radius)

    # evaluation -------------------------------------------------------------

    def window(self, x: Point, n: int = 0) -> tuple:
        r = self.step_radius
        return x.block(n - r, n + r + 1)

    def matrix_at(self, x: Point) -> np.ndarray:
        return self.table[self.window(x)]

    def window_indices(self, words: np.ndarray) -> np.ndarray:
        """Table indices of every cyclic window of each row of ``words`` (shape K x k)."""
        words = np.asarray(words, dtype=np.int64)
        k = words.shape[1]
        r = self.step_radius
        cols = (np.arange(k)[:, None] + np.arange(-r, r + 1)[None, :]) % k
        win = words[:, cols]  # K x k x width
        if self._lut is not None:
            idx = self._lut[win @ self._radix]
        else:
            idx = np.array([[self._index.get(tuple(w), -1) for w in row] for row in win])
        if (idx < 0).any():
            raise PreconditionViolated("word is not cyclically admissible")
        return idx

    def cycle_products(self, words) -> np.ndarray:
        """Cycle products ``Phi^k`` of a batch of period words of equal length ``k``."""
        words = np.atleast_2d(np.asarray(words, dtype=np.int64))
        idx = self.window_indices(words)
        out = self.matrices[idx[:, 0]]
        for i in range(1, words.shape[1]):
            out = self.matrices[idx[:, i]] @ out
        return out

    def cycle_product(self, word) -> np.ndarray:
        word = _parse_word(word)
        return self.cycle_products([word])[0]

    def one_step_view(self):
        """``(matrices, transitions, blocks)`` of the recoding as a one-step cocycle.

        Symbols of the recoded SFT are the admissible ``2r+1`` windows; block
        ``b`` may follow ``a`` iff they overlap in ``2r`` symbols.
        """
        if self.step_radius == 0:
            return self.matrices, np.array(self.base.transitions, dtype=bool), self.windows
        m = len(self.windows)
        trans = np.zeros((m, m), dtype=bool)
        by_prefix = {}
        for j, w in enumerate(self.windows):
            by_prefix.setdefault(w[:-1], []).append(j)
        for i, w in enumerate(self.windows):
            for j in by_prefix.get(w[1:], ()):
                trans[i, j] = True
        return self.matrices, trans, self.windows

    def exterior_power(self, p: int) -> "Cocycle":
        return Cocycle(self.base, dict(zip(self.windows, exterior_power(self.matrices, p))),
                       self.step_radius, check_conditioning=False)

    def __repr__(self):
        return (f"Cocycle(d={self.dimension}, r={self.step_radius}, "
                f"symbols={self.base.n_symbols}, windows={len(self.windows)})")


def c0_distance(c1: Cocycle, c2: Cocycle) -> float:
    """``max`` over windows of the spectral-norm distance of the generators."""
    if c1.windows != c2.windows or c1.dimension != c2.dimension:
        raise DimensionMismatch("cocycles have different windows or dimensions")
    return float(np.max(np.linalg.norm(c1.matrices - c2.matrices, ord=2, axis=(1, 2))))


@dataclass(frozen=True)
class BunchingReport:
    theta: float
    max_log_bolicity: float
    threshold: float
    bunched: bool
    margin: float
    strongly_bunched: bool


def fiber_bunching_check(c: Cocycle, theta: float = 1.0) -> BunchingReport:
    """Compare ``max log bol(F)`` with ``theta * lam``.

    Strong bunching uses the threshold ``theta * lam / 3`` when ``d >= 3``; in
    dimension at most two it coincides with fiber bunching.
    """
    if theta <= 0:
        raise PreconditionViolated("theta must be positive")
    s = singular_values(c.matrices)
    if (s[:, -1] <= 0).any() or (s[:, 0] > COND_LIMIT * s[:, -1]).any():
        raise SingularMatrix("cocycle has a singular or ill-conditioned generator")
    worst = float(np.max(np.log(s[:, 0]) - np.log(s[:, -1])))
    threshold = theta * c.base.lam
    bunched = worst < threshold
    strongly = bunched if c.dimension <= 2 else worst < threshold / 3.0
    return BunchingReport(theta, worst, threshold, bunched, threshold - worst, strongly)


# ----------------------------------------------------------------------------
# irreducibility


def algebra_basis(matrices, tol=1e-9) -> np.ndarray:
    """Orthonormal basis (rows, flattened) of the unital algebra generated by ``matrices``."""
    mats = [np.asarray(a, dtype=float) for a in matrices]
    d = mats[0].shape[0]
    scale = max(np.linalg.norm(a, 2) for a in mats) or 1.0
    gens = [a / scale for a in mats]
    basis = np.eye(d).reshape(1, -1) / math.sqrt(d)
    frontier = [np.eye(d)]
    while frontier:
        new = []
        for b in frontier:
            for g in gens:
                v = (g @ b).reshape(-1)
                nv = np.linalg.norm(v)
                if nv == 0:
                    continue
                res = v - basis.T @ (basis @ v)
                if np.linalg.norm(res) > tol * max(nv, 1.0):
                    res = res - basis.T @ (basis @ res)
                    basis = np.vstack([basis, res / np.linalg.norm(res)])
                    new.append(res.reshape(d, d) / np.linalg.norm(res))
        frontier = new
        if basis.shape[0] == d * d:
            break
    return basis


def _commutant(mats, tol=1e-9):
    d = mats[0].shape[0]
    eye = np.eye(d)
    rows = [np.kron(a, eye) - np.kron(eye, a.T) for a in mats]  # row-major vec(AX - XA)
    big = np.vstack(rows)
    _, s, vt = np.linalg.svd(big)
    rank = int(np.sum(s > tol * max(s[0], 1.0)))
    return vt[rank:]


def has_common_real_eigenvector(matrices, tol=1e-9) -> bool:
    """2x2 test: some real eigenvector of one generator is shared by all."""
    mats = [np.asarray(a, dtype=float) for a in matrices]
    for a in mats:
        w, v = np.linalg.eig(a)
        if np.iscomplexobj(w) and np.max(np.abs(w.imag)) > tol * max(np.abs(w).max(), 1.0):
            continue
        if np.allclose(a, a[0, 0] * np.eye(a.shape[0]), atol=tol * max(np.abs(a).max(), 1.0)):
            continue
        for k in range(v.shape[1]):
            u = np.real(v[:, k])
            u = u / np.linalg.norm(u)
            if all(abs(b[0] @ u * u[1] - b[1] @ u * u[0]) <= tol * max(np.linalg.norm(b), 1.0)
                   for b in mats):
                return True
        return False
    # every generator is scalar or has non-real spectrum
    scalar = all(np.allclose(a, a[0, 0] * np.eye(a.shape[0]), atol=tol * max(np.abs(a).max(), 1.0))
                 for a in mats)
    return scalar


def check_irreducible(matrices, tol=1e-9) -> bool:
    """Whether the matrices have no common proper invariant subspace over the reals.

    A full matrix algebra is irreducible. Otherwise a degenerate trace form means
    a nonzero radical (reducible). A semisimple algebra acts irreducibly iff its
    commutant is a real division algebra. The commutant is semisimple and the
    form ``x -> tr(x^2)`` on it has one positive direction per simple factor
    ``M_m(D)`` only when ``m = 1``, so division means exactly one positive
    eigenvalue of that Gram matrix.
    """
    mats = [np.asarray(a, dtype=float) for a in matrices]
    if not mats:
        raise PreconditionViolated("need at least one matrix")
    d = mats[0].shape[0]
    if any(a.shape != (d, d) for a in mats):
        raise DimensionMismatch("matrices must share one square shape")
    if d == 1:
        return True
    basis = algebra_basis(mats, tol)
    if basis.shape[0] == d * d:
        return True
    bmats = basis.reshape(-1, d, d)
    gram = np.einsum("iab,jba->ij", bmats, bmats)
    sv = np.linalg.svd(gram, compute_uv=False)
    if sv[-1] <= 1e-8 * max(sv[0], 1.0):
        return False
    comm = _commutant(mats, tol).reshape(-1, d, d)
    cgram = np.einsum("iab,jba->ij", comm, comm)
    ev = np.linalg.eigvalsh((cgram + cgram.T) / 2)
    return int(np.sum(ev > 1e-8 * np.abs(ev).max())) == 1


def split_by_invariant_subspace(matrices, subspace, tol=1e-10):
    """Restriction and quotient matrices for a common invariant subspace.

    ``subspace`` is a ``d x p`` basis. With ``Q`` orthonormal (QR, positive
    diagonal) the restriction is ``Q^T A Q``; the quotient acts on the orthogonal
    complement as ``Qp^T A Qp``. Accepts a list of matrices (returns two lists,
    the second empty when ``p = d``) or a :class:`Cocycle` (returns two cocycles,
    the second None when ``p = d``).
    """
    if isinstance(matrices, Cocycle):
        c = matrices
        res, quo = split_by_invariant_subspace(list(c.matrices), subspace, tol)
        restriction = Cocycle(c.base, dict(zip(c.windows, res)), c.step_radius,
                              check_conditioning=False)
        if not quo:
            return restriction, None
        return restriction, Cocycle(c.base, dict(zip(c.windows, quo)), c.step_radius,
                                    check_conditioning=False)
    mats = [np.asarray(a, dtype=float) for a in matrices]
    f = np.asarray(subspace, dtype=float)
    if f.ndim == 1:
        f = f[:, None]
    d = mats[0].shape[0]
    if f.shape[0] != d or any(a.shape != (d, d) for a in mats):
        raise DimensionMismatch("subspace basis and matrices disagree in dimension")
    p = f.shape[1]
    if np.linalg.matrix_rank(f) < p:
        raise PreconditionViolated("subspace basis is rank deficient")
    q_full, rr = np.linalg.qr(f, mode="complete")
    signs = np.sign(np.diag(rr)[:p])
    signs[signs == 0] = 1.0
    q = q_full[:, :p] * signs
    qp = q_full[:, p:]
    for i, a in enumerate(mats):
        leak = np.linalg.norm(a @ q - q @ (q.T @ a @ q), 2)
        if leak > tol * max(np.linalg.norm(a, 2), 1.0):
            raise NotInvariant(f"subspace is not invariant under matrix {i}")
    restriction = [q.T @ a @ q for a in mats]
    quotient = [qp.T @ a @ qp for a in mats] if p < d else []
    return restriction, quotient


def cocycle_product(c, x: Point, n: int) -> np.ndarray:
    """``Phi^n_x``; negative ``n`` gives ``(Phi^{-n}_{T^n x})^{-1}``."""
    if n < 0:
        m = c.product(x.shifted(n), -n)
        s = singular_values(m)
        if s[-1] <= 0 or s[0] > COND_LIMIT * s[-1]:
            raise SingularMatrix("product is too ill-conditioned to invert")
        return np.linalg.inv(m)
    return c.product(x, n)


check_irreducible_onestep = check_irreducible
