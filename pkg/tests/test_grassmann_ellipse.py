import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycle_lab.cocycle import bolicity
from cocycle_lab.ellipse import john_ellipse
from cocycle_lab.errors import Degenerate, DimensionMismatch, PreconditionViolated
from cocycle_lab.grassmann import (
    Subspace,
    grassmann_distance,
    grassmann_distance_numeric,
    lipschitz_bolicity_property,
    principal_angles,
    random_subspace,
)
from cocycle_lab.norms import PolytopeNorm
from cocycle_lab.scenarios import A1

SQUARE = np.array([[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]])


def line(phi):
    return Subspace([math.cos(phi), math.sin(phi)])


def grid_line_distance(phi1, phi2, steps=1000):
    """Oracle: min of |t1 u1 - t2 u2| over t_i in [1, 10] with sign search."""
    u1 = np.array([math.cos(phi1), math.sin(phi1)])
    u2 = np.array([math.cos(phi2), math.sin(phi2)])
    t = np.linspace(1.0, 10.0, steps + 1)
    best = math.inf
    for sign in (1.0, -1.0):
        diff = t[:, None, None] * u1 - sign * t[None, :, None] * u2
        best = min(best, float(np.sqrt((diff ** 2).sum(axis=-1)).min()))
    return best


class TestDistance:
    def test_examples(self):
        assert grassmann_distance(line(0.3), line(0.3)) == 0.0
        assert grassmann_distance(line(0.0), line(math.pi / 2)) == pytest.approx(math.sqrt(2),
                                                                                 abs=1e-6)
        assert grassmann_distance(line(0.0), line(math.pi / 6)) == pytest.approx(
            2 * math.sin(math.pi / 12), rel=1e-12)
        assert 2 * math.sin(math.pi / 12) == pytest.approx(0.5176, abs=1e-4)

    @pytest.mark.parametrize("phi", [math.pi / 2, math.pi / 6, 0.05, 1.2, 2.9])
    def test_grid_oracle(self, phi):
        got = grassmann_distance(line(0.4), line(0.4 + phi))
        assert got == pytest.approx(grid_line_distance(0.4, 0.4 + phi), abs=1e-6)

    def test_numeric_matches_closed_form(self, rng):
        for d, p in ((3, 1), (3, 2), (4, 2), (5, 3)):
            for _ in range(2):
                a, b = random_subspace(d, p, rng), random_subspace(d, p, rng)
                exact = grassmann_distance(a, b)
                num = grassmann_distance_numeric(a, b, restarts=1, rng=rng)
                # the closed form is the infimum, so the minimizer cannot go below it
                assert exact - 1e-12 <= num <= exact + 1e-6

    def test_principal_angles_small(self):
        eps = 1e-10
        assert principal_angles(line(0.0), line(eps))[0] == pytest.approx(eps, rel=1e-6)

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            grassmann_distance(random_subspace(3, 1, rng), random_subspace(3, 2, rng))
        with pytest.raises(DimensionMismatch):
            grassmann_distance(random_subspace(3, 1, rng), random_subspace(2, 1, rng))

    def test_metric_axioms(self, rng):
        for d, p in ((2, 1), (3, 1), (4, 2)):
            for _ in range(1000 // 3 + 1):
                a, b, c = (random_subspace(d, p, rng) for _ in range(3))
                ab, bc, ac = (grassmann_distance(a, b), grassmann_distance(b, c),
                              grassmann_distance(a, c))
                assert ab == pytest.approx(grassmann_distance(b, a), abs=1e-12)
                assert ac <= ab + bc + 1e-8
                assert ab > 0
                assert grassmann_distance(a, Subspace(a.basis @ rng.standard_normal((p, p)))) \
                    <= 1e-7

    @settings(max_examples=200, deadline=None)
    @given(st.floats(0, 0.01), st.integers(0, 2 ** 32 - 1))
    def test_close_to_identity(self, delta, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        e = rng.standard_normal((d, d))
        lmat = np.eye(d) + delta * e / np.linalg.norm(e, 2)
        v = random_subspace(d, int(rng.integers(1, d)), rng)
        assert grassmann_distance(v, v.image(lmat)) <= 4 * delta + 1e-12


class TestLipschitzBolicity:
    def test_examples(self, rng):
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        assert lipschitz_bolicity_property(q) <= 1 + 1e-6
        assert lipschitz_bolicity_property(np.diag([2.0, 0.5])) <= 4 * (1 + 1e-6)
        assert bolicity(A1) == pytest.approx(8.0, rel=1e-12)
        assert lipschitz_bolicity_property(A1) <= 8 * (1 + 1e-6)

    def test_random(self, rng):
        for _ in range(20):
            d = int(rng.integers(2, 5))
            m = rng.standard_normal((d, d))
            ratio = lipschitz_bolicity_property(m, trials=50, p=int(rng.integers(1, d)), rng=rng)
            assert ratio <= bolicity(m) * (1 + 1e-6)

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            lipschitz_bolicity_property(np.eye(2), p=2)


def boundary(q, n=2000):
    t = np.linspace(0, 2 * math.pi, n, endpoint=False)
    w, vecs = np.linalg.eigh(q)
    circ = np.stack([np.cos(t), np.sin(t)], axis=1)
    return circ @ np.diag(1 / np.sqrt(w)) @ vecs.T


class TestJohn:
    def test_examples(self):
        assert np.allclose(john_ellipse(SQUARE), np.eye(2), atol=1e-6)
        a, b = 3.0, 0.5
        rect = SQUARE * [a, b]
        assert np.allclose(john_ellipse(rect), np.diag([1 / a ** 2, 1 / b ** 2]), rtol=1e-6)

    def test_hexagon(self):
        t = np.arange(6) * math.pi / 3
        hexagon = np.stack([np.cos(t), np.sin(t)], axis=1)
        # the inscribed circle of the regular hexagon has radius sqrt(3)/2
        assert np.allclose(john_ellipse(hexagon), np.eye(2) / 0.75, rtol=1e-6)

    def test_inscribed_and_equivariant(self, rng):
        for _ in range(100):
            lmat = rng.standard_normal((2, 2))
            if abs(np.linalg.det(lmat)) < 0.1:
                lmat += np.eye(2)
            poly = SQUARE @ lmat.T
            q = john_ellipse(poly)
            li = np.linalg.inv(lmat)
            assert np.allclose(q, li.T @ li, rtol=1e-5, atol=1e-8 * np.abs(q).max())
            assert PolytopeNorm(poly).value(boundary(q)).max() <= 1 + 1e-7

    def test_inscribed_random_polygons(self, rng):
        for _ in range(20):
            pts = rng.standard_normal((6, 2))
            poly = PolytopeNorm.from_points(pts)
            q = john_ellipse(poly.vertices)
            assert poly.value(boundary(q)).max() <= 1 + 1e-7
            # maximality: an enlarged ellipse leaves the polygon
            assert poly.value(boundary(q / 1.01 ** 2)).max() > 1

    def test_errors(self):
        with pytest.raises(Degenerate):
            john_ellipse([[1.0, 1.0], [-1.0, -1.0], [2.0, 2.0], [-2.0, -2.0]])
        with pytest.raises(PreconditionViolated):
            john_ellipse([[1.0, 0.0], [0.0, 1.0], [-1.0, -0.5]])
