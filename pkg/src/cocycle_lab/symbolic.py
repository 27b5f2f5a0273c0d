"""Subshifts of finite type and eventually periodic points.

Points of a two-sided SFT are represented exactly as eventually periodic
bi-infinite sequences: a periodic left tail, a finite core and a periodic right
tail. This makes shifts, distances, brackets and stable/unstable membership
exact combinatorial operations.

The metric is ``d(x, y) = exp(-lam * k)`` with ``k = min{|n| : x_n != y_n}``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import (
    ConfigError,
    NoPseudoorbit,
    NotFound,
    PreconditionViolated,
)

__all__ = [
    "Sft",
    "Point",
    "PeriodicWord",
    "distance",
    "bowen_distance",
    "shift",
    "bracket",
    "splice",
    "in_local_stable",
    "in_local_unstable",
    "in_stable",
    "in_unstable",
    "last_disagreement",
    "first_disagreement",
    "enumerate_periodic_words",
    "count_periodic_orbits",
    "canonical_rotation",
    "is_primitive",
    "min_pseudoorbit_period",
    "max_separated_set",
    "separated_subset",
    "bq_inequality_check",
    "BQReport",
    "closing_periodic_orbit",
    "orbit_distance_to_sample",
]


def _parse_word(word):
    if isinstance(word, str):
        if "." in word:
            return tuple(int(s) for s in word.split(".") if s)
        return tuple(int(ch) for ch in word)
    if isinstance(word, PeriodicWord):
        return word.word
    return tuple(int(s) for s in word)


def _word_str(word):
    if all(s < 10 for s in word):
        return "".join(str(s) for s in word)
    return ".".join(str(s) for s in word)


def _primitive_root(word):
    n = len(word)
    for p in range(1, n + 1):
        if n % p == 0 and word == word[:p] * (n // p):
            return word[:p]
    return word


def is_primitive(word) -> bool:
    word = _parse_word(word)
    return len(word) > 0 and len(_primitive_root(word)) == len(word)


def canonical_rotation(word) -> tuple:
    """Lexicographically least rotation."""
    word = _parse_word(word)
    if not word:
        return word
    return min(word[i:] + word[:i] for i in range(len(word)))


@dataclass(frozen=True)
class Sft:
    """Two-sided SFT on ``{0, ..., N-1}`` with 0/1 transition matrix."""

    transitions: tuple
    lam: float = 1.0

    def __post_init__(self):
        t = np.asarray(self.transitions, dtype=int)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ConfigError("transition matrix must be square and nonempty", "transitions")
        if not np.isin(t, (0, 1)).all():
            raise ConfigError("transition matrix must be 0/1", "transitions")
        if not (t.any(axis=0).all() and t.any(axis=1).all()):
            raise ConfigError("every symbol needs a successor and a predecessor", "transitions")
        if not (self.lam > 0 and math.isfinite(self.lam)):
            raise ConfigError("lambda must be positive", "lambda")
        object.__setattr__(self, "transitions", tuple(tuple(int(v) for v in row) for row in t))
        object.__setattr__(self, "lam", float(self.lam))

    @classmethod
    def full_shift(cls, n_symbols=2, lam=1.0):
        return cls(tuple((1,) * n_symbols for _ in range(n_symbols)), lam)

    @classmethod
    def from_dict(cls, data, path="sft"):
        if not isinstance(data, dict):
            raise ConfigError("expected an object", path)
        n = data.get("alphabet")
        if not isinstance(n, int) or n < 1:
            raise ConfigError("alphabet must be a positive integer", f"{path}.alphabet")
        trans = data.get("transitions", [[1] * n for _ in range(n)])
        lam = data.get("lambda", 1.0)
        try:
            sft = cls(trans, lam)
        except ConfigError as err:
            raise ConfigError(str(err).split(": ", 1)[-1], f"{path}.{err.path}") from None
        if sft.n_symbols != n:
            raise ConfigError("size disagrees with alphabet", f"{path}.transitions")
        return sft

    def to_dict(self):
        return {"alphabet": self.n_symbols, "transitions": [list(r) for r in self.transitions],
                "lambda": self.lam}

    @property
    def n_symbols(self) -> int:
        return len(self.transitions)

    alphabet_size = n_symbols

    @property
    def eps0(self) -> float:
        return math.exp(-self.lam)

    @property
    def eps1(self) -> float:
        return math.exp(-self.lam) / 2

    @property
    def matrix(self) -> np.ndarray:
        return np.array(self.transitions, dtype=int)

    @property
    def is_full(self) -> bool:
        return all(all(row) for row in self.transitions)

    def allowed(self, a, b) -> bool:
        return bool(self.transitions[a][b])

    def is_admissible(self, word) -> bool:
        word = _parse_word(word)
        if any(not 0 <= s < self.n_symbols for s in word):
            return False
        return all(self.transitions[a][b] for a, b in zip(word, word[1:]))

    def is_cyclic_admissible(self, word) -> bool:
        word = _parse_word(word)
        return len(word) > 0 and self.is_admissible(word) and bool(
            self.transitions[word[-1]][word[0]])

    def admissible_words(self, length):
        """All admissible words of the given length, in lexicographic order."""
        if length <= 0:
            return [()]
        words = [(a,) for a in range(self.n_symbols)]
        for _ in range(length - 1):
            words = [w + (b,) for w in words for b in range(self.n_symbols)
                     if self.transitions[w[-1]][b]]
        return words

    def count_words(self, length) -> int:
        if length <= 0:
            return 1
        m = np.array(self.transitions, dtype=object)
        v = np.ones(self.n_symbols, dtype=object)
        for _ in range(length - 1):
            v = m.dot(v)
        return int(sum(v))

    def _cycle_from(self, start, reverse=False):
        """A path from ``start`` into a cycle (forward) or from a cycle into ``start``."""
        n = self.n_symbols
        succ = [[b for b in range(n) if (self.transitions[b][a] if reverse else self.transitions[a][b])]
                for a in range(n)]
        parent = {start: None}
        queue = deque([start])
        order = []
        while queue:
            a = queue.popleft()
            order.append(a)
            for b in succ[a]:
                if b not in parent:
                    parent[b] = a
                    queue.append(b)
        for c in order:
            cyc = _shortest_cycle_through(succ, c)
            if cyc is not None:
                path = []
                node = c
                while node is not None:
                    path.append(node)
                    node = parent[node]
                path.reverse()
                return tuple(path), tuple(cyc)
        raise PreconditionViolated(f"symbol {start} cannot be extended to a bi-infinite sequence")

    def extend_word(self, word, start=0) -> "Point":
        """Eventually periodic point carrying ``word`` at indices ``start, start+1, ...``."""
        word = _parse_word(word)
        if not word or not self.is_admissible(word):
            raise PreconditionViolated("word is empty or not admissible")
        rpath, rcyc = self._cycle_from(word[-1])
        lpath, lcyc = self._cycle_from(word[0], reverse=True)
        # rpath runs word[-1] -> ... -> c, rcyc is c -> ... (returning to c)
        right_core = rpath[1:]
        core_r = word + right_core
        right = rcyc[1:] + rcyc[:1] if len(rcyc) > 1 else rcyc
        # lpath runs word[0] <- ... <- c in reverse order
        left_core = tuple(reversed(lpath[1:]))
        lcyc_f = tuple(reversed(lcyc))
        left = lcyc_f[-1:] + lcyc_f[:-1] if len(lcyc_f) > 1 else lcyc_f
        return Point(left, left_core + core_r, right, origin=len(left_core) - start)


def _shortest_cycle_through(succ, c):
    parent = {c: None}
    queue = deque([c])
    while queue:
        a = queue.popleft()
        for b in succ[a]:
            if b == c:
                path = [a]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            if b not in parent:
                parent[b] = a
                queue.append(b)
    return None


class Point:
    """Eventually periodic bi-infinite sequence.

    Symbol ``n`` lives at core position ``j = n + origin``: ``core[j]`` for
    ``0 <= j < len(core)``, ``left[j mod len(left)]`` for ``j < 0`` and
    ``right[(j - len(core)) mod len(right)]`` beyond the core.
    """

    __slots__ = ("left", "core", "right", "origin")

    def __init__(self, left, core, right, origin=0):
        left, core, right = _parse_word(left), _parse_word(core), _parse_word(right)
        if not left or not right:
            raise ConfigError("left and right tails must be nonempty")
        left, right = _primitive_root(left), _primitive_root(right)
        origin = int(origin)
        # absorb the core into the tails where possible
        core = list(core)
        while core and core[-1] == right[-1]:
            core.pop()
            right = right[-1:] + right[:-1]
        while core and core[0] == left[0]:
            core.pop(0)
            left = left[1:] + left[:1]
            origin -= 1
        self.left, self.core, self.right, self.origin = left, tuple(core), right, origin

    @classmethod
    def periodic(cls, word):
        word = _parse_word(word)
        return cls(word, (), word, 0)

    @classmethod
    def fixed(cls, symbol):
        return cls((symbol,), (), (symbol,), 0)

    @classmethod
    def from_dict(cls, data, path="point"):
        if not isinstance(data, dict):
            raise ConfigError("expected an object", path)
        try:
            left = _parse_word(data["left"])
            right = _parse_word(data["right"])
            core = _parse_word(data.get("core", ""))
            origin = int(data.get("origin", 0))
        except KeyError as err:
            raise ConfigError("missing field", f"{path}.{err.args[0]}") from None
        except (TypeError, ValueError):
            raise ConfigError("symbols must be digits", path) from None
        if not left:
            raise ConfigError("tail must be nonempty", f"{path}.left")
        if not right:
            raise ConfigError("tail must be nonempty", f"{path}.right")
        return cls(left, core, right, origin)

    def to_dict(self):
        return {"left": _word_str(self.left), "core": _word_str(self.core),
                "right": _word_str(self.right), "origin": self.origin}

    @property
    def core_start(self) -> int:
        return -self.origin

    @property
    def core_end(self) -> int:
        return len(self.core) - self.origin

    def symbol(self, n) -> int:
        j = n + self.origin
        if j < 0:
            return self.left[j % len(self.left)]
        if j < len(self.core):
            return self.core[j]
        return self.right[(j - len(self.core)) % len(self.right)]

    def block(self, lo, hi) -> tuple:
        """Symbols at indices ``lo, ..., hi - 1``."""
        return tuple(self.symbol(n) for n in range(lo, hi))

    def shifted(self, n=1) -> "Point":
        p = Point.__new__(Point)
        p.left, p.core, p.right, p.origin = self.left, self.core, self.right, self.origin + n
        return p

    def is_admissible(self, sft: Sft) -> bool:
        seq = self.left + self.left + self.core + self.right + self.right
        return sft.is_admissible(seq)

    def periodic_word(self):
        """The period word (canonical rotation) if the point is periodic, else None."""
        if self.core or len(self.left) != len(self.right):
            return None
        p = len(self.right)
        word = self.block(0, p)
        if all(self.symbol(-k) == word[(-k) % p] for k in range(1, p + 1)):
            return canonical_rotation(word)
        return None

    def is_fixed(self) -> bool:
        w = self.periodic_word()
        return w is not None and len(w) == 1

    def __eq__(self, other):
        if not isinstance(other, Point):
            return NotImplemented
        return first_disagreement_abs(self, other) is None

    def __hash__(self):
        # invariant under the normalisation performed in __init__
        return hash((canonical_rotation(self.left), canonical_rotation(self.right)))

    def __repr__(self):
        return (f"Point(left={_word_str(self.left)!r}, core={_word_str(self.core)!r}, "
                f"right={_word_str(self.right)!r}, origin={self.origin})")


def shift(x: Point, n=1) -> Point:
    return x.shifted(n)


def _right_bound(x, y):
    return max(x.core_end, y.core_end, 0) + math.lcm(len(x.right), len(y.right))


def _left_bound(x, y):
    return min(x.core_start, y.core_start, 0) - math.lcm(len(x.left), len(y.left))


def first_disagreement_abs(x: Point, y: Point):
    """Index ``n`` of smallest ``|n|`` with ``x_n != y_n`` (ties favour ``n >= 0``)."""
    rb, lb = _right_bound(x, y), _left_bound(x, y)
    k = 0
    while k < rb or -k >= lb:
        if k < rb and x.symbol(k) != y.symbol(k):
            return k
        if k > 0 and -k >= lb and x.symbol(-k) != y.symbol(-k):
            return -k
        k += 1
    return None


def distance(sft: Sft | float, x: Point, y: Point) -> float:
    """``exp(-lam k)`` with ``k`` the least ``|n|`` where the sequences differ."""
    lam = sft.lam if isinstance(sft, Sft) else float(sft)
    n = first_disagreement_abs(x, y)
    if n is None:
        return 0.0
    return math.exp(-lam * abs(n))


def bowen_distance(sft: Sft | float, x: Point, y: Point, n: int) -> float:
    """``max_{0 <= i < n} d(T^i x, T^i y)``."""
    return max(distance(sft, x.shifted(i), y.shifted(i)) for i in range(max(n, 1)))


def last_disagreement(x: Point, y: Point):
    """Largest index where x and y differ, None if equal; requires eventual agreement to the right."""
    if not in_stable(x, y):
        raise PreconditionViolated("points are not forward asymptotic")
    lb = _left_bound(x, y)
    for n in range(max(x.core_end, y.core_end, 0), lb - 1, -1):
        if x.symbol(n) != y.symbol(n):
            return n
    return None


def first_disagreement(x: Point, y: Point):
    """Smallest index where x and y differ, None if equal; requires eventual agreement to the left."""
    if not in_unstable(x, y):
        raise PreconditionViolated("points are not backward asymptotic")
    rb = _right_bound(x, y)
    for n in range(min(x.core_start, y.core_start, 0), rb + 1):
        if x.symbol(n) != y.symbol(n):
            return n
    return None


def in_stable(x: Point, y: Point) -> bool:
    m = max(x.core_end, y.core_end, 0)
    span = math.lcm(len(x.right), len(y.right))
    return all(x.symbol(n) == y.symbol(n) for n in range(m, m + span))


def in_unstable(x: Point, y: Point) -> bool:
    m = min(x.core_start, y.core_start, 0)
    span = math.lcm(len(x.left), len(y.left))
    return all(x.symbol(n) == y.symbol(n) for n in range(m - span, m))


def in_local_stable(x: Point, y: Point) -> bool:
    """``y_n = x_n`` for all ``n >= 0``."""
    return all(x.symbol(n) == y.symbol(n) for n in range(0, _right_bound(x, y)))


def in_local_unstable(x: Point, y: Point) -> bool:
    """``y_n = x_n`` for all ``n <= 0``."""
    return all(x.symbol(n) == y.symbol(n) for n in range(_left_bound(x, y), 1))


def splice(x: Point, y: Point, cut: int) -> Point:
    """Sequence equal to ``x`` at indices ``< cut`` and to ``y`` at indices ``>= cut``."""
    lo = min(cut, x.core_start)
    hi = max(cut, y.core_end)
    core = tuple(x.symbol(n) if n < cut else y.symbol(n) for n in range(lo, hi))
    lx, ry = len(x.left), len(y.right)
    left = tuple(x.left[(k + lo + x.origin) % lx] for k in range(lx))
    right = tuple(y.right[(k + hi + y.origin - len(y.core)) % ry] for k in range(ry))
    return Point(left, core, right, -lo)


def bracket(sft: Sft | None, x: Point, y: Point) -> Point:
    """``[x, y]``: the past of ``x`` glued to the future of ``y``; needs ``x_0 = y_0``."""
    if x.symbol(0) != y.symbol(0):
        raise PreconditionViolated("bracket needs x_0 == y_0")
    return splice(x, y, 1)


@dataclass(frozen=True)
class PeriodicWord:
    """Primitive periodic word, stored as its canonical rotation."""

    word: tuple

    def __post_init__(self):
        w = _parse_word(self.word)
        if not w:
            raise ConfigError("periodic word must be nonempty")
        if not is_primitive(w):
            raise PreconditionViolated("periodic word must be primitive")
        object.__setattr__(self, "word", canonical_rotation(w))

    @property
    def period(self) -> int:
        return len(self.word)

    def point(self) -> Point:
        return Point.periodic(self.word)

    def orbit(self):
        p = self.point()
        return [p.shifted(i) for i in range(self.period)]

    def __str__(self):
        return _word_str(self.word)

    def __len__(self):
        return len(self.word)


def _lyndon_words_full(n_symbols, max_len):
    """Duval's generation of Lyndon words of length <= max_len."""
    w = [-1]
    while w:
        w[-1] += 1
        yield tuple(w)
        m = len(w)
        while len(w) < max_len:
            w.append(w[len(w) - m])
        while w and w[-1] == n_symbols - 1:
            w.pop()


def _is_lyndon(word):
    return all(word < word[i:] + word[:i] for i in range(1, len(word)))


def enumerate_periodic_words(sft: Sft, max_period: int):
    """All primitive periodic orbits of period <= max_period, one canonical word each.

    Sorted by (period, word). Words are returned as :class:`PeriodicWord`.
    """
    if max_period < 1:
        return []
    out = []
    n = sft.n_symbols
    if sft.is_full:
        out = [w for w in _lyndon_words_full(n, max_period)]
    else:
        t = sft.transitions
        # depth-first over admissible paths starting at their minimal symbol
        for a in range(n):
            stack = [(a,)]
            while stack:
                w = stack.pop()
                if t[w[-1]][a] and _is_lyndon(w):
                    out.append(w)
                if len(w) < max_period:
                    for b in range(n - 1, a - 1, -1):
                        if t[w[-1]][b]:
                            stack.append(w + (b,))
    out.sort(key=lambda w: (len(w), w))
    return [PeriodicWord(w) for w in out]


def _mobius(n):
    res, m, p = 1, n, 2
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            res = -res
        p += 1
    if m > 1:
        res = -res
    return res


def count_periodic_orbits(sft: Sft, period: int) -> int:
    """Number of primitive periodic orbits of exact period, via Moebius inversion of traces."""
    a = np.array(sft.transitions, dtype=object)

    def trace_pow(k):
        m = np.identity(sft.n_symbols, dtype=object)
        for _ in range(k):
            m = m.dot(a)
        return int(sum(m[i, i] for i in range(sft.n_symbols)))

    total = sum(_mobius(d) * trace_pow(period // d) for d in range(1, period + 1) if period % d == 0)
    return total // period


# ----------------------------------------------------------------------------
# pseudoorbits and separated sets


def _bowen_matrix(points, depth, sft):
    m = len(points)
    dm = np.zeros((m, m))
    for i, j in combinations(range(m), 2):
        dm[i, j] = dm[j, i] = bowen_distance(sft, points[i], points[j], depth)
    return dm


def min_pseudoorbit_period(points, epsilon, metric_depth: int, sft: Sft) -> int:
    """Least ``k`` admitting a periodic ``epsilon``-pseudoorbit of period ``k`` in the sample.

    A pseudoorbit is ``y_0, ..., y_{k-1}`` in the sample with
    ``d_depth(T y_i, y_{i+1 mod k}) < epsilon``. Raises NoPseudoorbit if none exists.
    """
    pts = list(points)
    m = len(pts)
    if m == 0:
        raise NoPseudoorbit("empty sample")
    images = [p.shifted(1) for p in pts]
    succ = [[j for j in range(m) if bowen_distance(sft, images[i], pts[j], metric_depth) < epsilon]
            for i in range(m)]
    best = None
    for s in range(m):
        dist = {s: 0}
        queue = deque([s])
        found = None
        while queue and found is None:
            a = queue.popleft()
            if best is not None and dist[a] + 1 >= best:
                break
            for b in succ[a]:
                if b == s:
                    found = dist[a] + 1
                    break
                if b not in dist:
                    dist[b] = dist[a] + 1
                    queue.append(b)
        if found is not None and (best is None or found < best):
            best = found
            if best == 1:
                break
    if best is None:
        raise NoPseudoorbit(f"no periodic {epsilon}-pseudoorbit in the sample")
    return best


def separated_subset(points, epsilon, metric_depth: int, sft: Sft, exact_limit=20):
    """Indices of an ``epsilon``-separated subset for ``d_depth``.

    Exact maximum for samples of at most ``exact_limit`` points, otherwise greedy
    (which is maximal, hence also ``epsilon``-spanning).
    """
    pts = list(points)
    m = len(pts)
    if m == 0:
        return []
    dm = _bowen_matrix(pts, metric_depth, sft)
    conflict = (dm < epsilon) & ~np.eye(m, dtype=bool)
    if m <= exact_limit:
        nbr = [sum(1 << j for j in range(m) if conflict[i, j]) for i in range(m)]
        best = [0]

        def popcount(v):
            return bin(v).count("1")

        def search(cand, chosen):
            if cand == 0:
                if popcount(chosen) > popcount(best[0]):
                    best[0] = chosen
                return
            if popcount(chosen) + popcount(cand) <= popcount(best[0]):
                return
            i = (cand & -cand).bit_length() - 1
            search(cand & ~(1 << i) & ~nbr[i], chosen | (1 << i))
            search(cand & ~(1 << i), chosen)

        search((1 << m) - 1, 0)
        return [i for i in range(m) if best[0] >> i & 1]
    chosen = []
    for i in range(m):
        if not any(conflict[i, j] for j in chosen):
            chosen.append(i)
    return chosen


def max_separated_set(points, epsilon, metric_depth: int, sft: Sft) -> int:
    """Cardinality ``S(epsilon, d_depth)`` of a maximal separated subset of the sample."""
    return len(separated_subset(points, epsilon, metric_depth, sft))


@dataclass(frozen=True)
class BQReport:
    holds: bool
    lhs: float
    rhs: float
    min_period: float
    s_half: int
    s_bowen: int


def bq_inequality_check(m, epsilon, points, sft: Sft) -> BQReport:
    """Check ``log m <= log S(eps/2, d) - (1/m) log S(eps, d_m) + 1``.

    Requires ``m`` below the minimal pseudoorbit period of the sample. The
    inequality is a theorem when the sample is shift-invariant.
    """
    if m < 1:
        raise PreconditionViolated("m must be positive")
    points = list(points)
    if not points:
        raise PreconditionViolated("empty sample")
    try:
        r = min_pseudoorbit_period(points, epsilon, 1, sft)
    except NoPseudoorbit:
        r = math.inf
    if m >= r:
        raise PreconditionViolated(f"m={m} is not below the minimal pseudoorbit period {r}")
    s_half = max_separated_set(points, epsilon / 2, 1, sft)
    s_bowen = max_separated_set(points, epsilon, m, sft)
    lhs = math.log(m)
    rhs = math.log(s_half) - math.log(s_bowen) / m + 1.0
    return BQReport(lhs <= rhs + 1e-12, lhs, rhs, r, s_half, s_bowen)


def orbit_distance_to_sample(word, points, sft: Sft) -> float:
    """``max`` over the orbit of the periodic point of the distance to the nearest sample point."""
    z = Point.periodic(_parse_word(word))
    p = len(_parse_word(word))
    return max(min(distance(sft, z.shifted(i), y) for y in points) for i in range(p))


def closing_periodic_orbit(points, n: int, tau: float, sft: Sft) -> PeriodicWord:
    """Periodic orbit of period <= n whose points lie within ``n**-tau`` of the sample.

    Agreement on ``|i| < k`` with ``k = ceil((tau/lam) log n)`` forces distance
    ``<= exp(-lam k) <= n**-tau``. The orbit is the shortest cycle (ties broken by
    canonical word) of the pseudoorbit graph on centred ``2k-1`` blocks: ``b -> b'``
    when some sample point with block ``b`` has ``T y`` with block ``b'``.
    """
    pts = list(points)
    if n < 1 or tau <= 0:
        raise PreconditionViolated("need n >= 1 and tau > 0")
    if not pts:
        raise NotFound("empty sample")
    k = math.ceil(tau / sft.lam * math.log(n) - 1e-12)
    if k <= 0:
        for a in range(sft.n_symbols):
            if sft.allowed(a, a):
                return PeriodicWord((a,))
        raise NotFound("no fixed point")
    blocks = sorted({y.block(-(k - 1), k) for y in pts})
    index = {b: i for i, b in enumerate(blocks)}
    edges = set()
    for y in pts:
        nb = y.block(-(k - 2), k + 1)
        if nb in index:
            edges.add((index[y.block(-(k - 1), k)], index[nb]))
    succ = [[] for _ in blocks]
    for a, b in sorted(edges):
        succ[a].append(b)
    best = None
    for s in range(len(blocks)):
        parent = {s: None}
        queue = deque([s])
        depth = {s: 0}
        cycle = None
        while queue and cycle is None:
            a = queue.popleft()
            if depth[a] + 1 > n:
                break
            for b in succ[a]:
                if b == s:
                    path = [a]
                    while parent[path[-1]] is not None:
                        path.append(parent[path[-1]])
                    cycle = path[::-1]
                    break
                if b not in parent:
                    parent[b] = a
                    depth[b] = depth[a] + 1
                    queue.append(b)
        if cycle is None:
            continue
        word = canonical_rotation(tuple(blocks[i][k - 1] for i in cycle))
        word = _primitive_root(word)
        key = (len(word), word)
        if best is None or key < best:
            best = key
    if best is None:
        raise NotFound(f"no periodic orbit of period <= {n} within {n ** -tau:g} of the sample")
    return PeriodicWord(best[1])
