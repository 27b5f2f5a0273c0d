"""Named example cocycles used by the CLI and the test-suite."""

from __future__ import annotations

import math

import numpy as np

from .cocycle import Cocycle, _ProductMixin
from .symbolic import Point, Sft, distance

__all__ = [
    "A0",
    "A1",
    "two_matrix_pair",
    "homoclinic_point",
    "ExampleNonSpaceCocycle",
    "HolderTwistCocycle",
]

A0 = np.array([[0.0, -1.0], [1.0, 0.0]])
A1 = np.array([[0.8, -0.1], [0.8, 0.1]])


def two_matrix_pair(lam: float = 1.0) -> Cocycle:
    """One-step cocycle over the full 2-shift: rotation by a right angle and ``A1``."""
    return Cocycle.from_matrices([A0, A1], lam=lam)


def homoclinic_point(symbol: int = 1, background: int = 0) -> Point:
    """``... b b [symbol] b b ...`` with the distinguished symbol at index 0."""
    return Point((background,), (symbol,), (background,), 0)


class ExampleNonSpaceCocycle(_ProductMixin):
    """``F(x) = diag(1, exp(-f(x)))`` with ``f(x) = d(x, 0^inf)^theta`` over the full 2-shift.

    Not locally constant: ``f`` is evaluated exactly on eventually periodic points.
    """

    dimension = 2
    step_radius = None

    def __init__(self, lam: float = 1.0, theta: float = 1.0):
        self.base = Sft.full_shift(2, lam)
        self.theta = float(theta)
        self.x0 = Point.fixed(0)

    def f(self, x: Point) -> float:
        return distance(self.base, x, self.x0) ** self.theta

    def matrix_at(self, x: Point) -> np.ndarray:
        return np.diag([1.0, math.exp(-self.f(x))])


class HolderTwistCocycle(_ProductMixin):
    """``F(x) = diag(e^kappa, e^-kappa) R(g(x))`` over the full 2-shift, not locally constant.

    ``g(x) = eps * sum_n (2 x_n - 1) e^{-theta lam |n|}`` is theta-Holder, and it is
    evaluated exactly on eventually periodic points by summing the periodic
    tails as geometric series. ``bol F = e^{2 kappa}``, so the cocycle is fiber
    bunched iff ``2 kappa < theta lam``. Passing ``matrices`` replaces the
    diagonal factor by ``matrices[x_0]``, and ``bol F`` is then ``bol`` of that
    matrix.
    """

    dimension = 2
    step_radius = None

    def __init__(self, lam: float = 1.0, theta: float = 1.0, kappa: float | None = None,
                 eps: float = 0.1, matrices=None):
        self.base = Sft.full_shift(2, lam)
        self.theta = float(theta)
        self.kappa = self.theta * lam if kappa is None else float(kappa)
        self.eps = float(eps)
        self._q = math.exp(-self.theta * lam)
        self._diag = np.diag([math.exp(self.kappa), math.exp(-self.kappa)])
        self._mats = None if matrices is None else [np.asarray(m, dtype=float) for m in matrices]

    def g(self, x: Point) -> float:
        q = self._q
        m = max(abs(x.core_start), abs(x.core_end)) + 1
        total = sum((2 * x.symbol(n) - 1) * q ** abs(n) for n in range(-m, m + 1))
        pr, pl = len(x.right), len(x.left)
        total += sum((2 * x.symbol(m + 1 + i) - 1) * q ** (m + 1 + i)
                     for i in range(pr)) / (1 - q ** pr)
        total += sum((2 * x.symbol(-m - 1 - i) - 1) * q ** (m + 1 + i)
                     for i in range(pl)) / (1 - q ** pl)
        return self.eps * total

    def matrix_at(self, x: Point) -> np.ndarray:
        t = self.g(x)
        c, s = math.cos(t), math.sin(t)
        head = self._diag if self._mats is None else self._mats[x.symbol(0)]
        return head @ np.array([[c, -s], [s, c]])
