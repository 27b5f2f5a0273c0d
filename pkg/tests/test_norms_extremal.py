import math

import numpy as np
import pytest

from cocycle_lab.cocycle import Cocycle
from cocycle_lab.errors import Degenerate, NotBunched, NotConverged, PreconditionViolated
from cocycle_lab.extremal import (
    calibration_check,
    constant_barabanov_iterate,
    extremality_check,
    perturbed_example,
    rotation,
)
from cocycle_lab.norms import (
    BarabanovNorm,
    EllipseNorm,
    EuclideanNorm,
    MaxNorm,
    PolytopeNorm,
    WordSupNorm,
    barabanov_eval,
)
from cocycle_lab.scenarios import A0, A1, two_matrix_pair
from cocycle_lab.symbolic import Point

S2 = math.sqrt(2)
HEXAGON = np.array([[1.0, 0.0], [0.5, 1.0], [-0.5, 1.0], [-1.0, 0.0], [-0.5, -1.0], [0.5, -1.0]])


def check_axioms(norm, rng, d=2, x=None, n=10_000):
    v, w = rng.standard_normal((n, d)), rng.standard_normal((n, d))
    t = rng.standard_normal(n)
    nv, nw = norm.value(v, x), norm.value(w, x)
    scaled = norm.value(v * t[:, None], x)
    assert np.max(np.abs(scaled - np.abs(t) * nv) / (np.abs(t) * nv)) <= 1e-12
    assert np.max(norm.value(v + w, x) - nv - nw) <= 1e-9
    assert np.all(nv > 0) and float(norm.value(np.zeros(d), x)) == 0.0


class TestNormAxioms:
    def test_constant_variants(self, rng):
        for norm in (EuclideanNorm(), MaxNorm(), PolytopeNorm(HEXAGON),
                     EllipseNorm([[2.0, 0.3], [0.3, 0.5]])):
            check_axioms(norm, rng)

    def test_three_dimensional(self, rng):
        cube = np.array([[a, b, c] for a in (-1, 1) for b in (-1, 1) for c in (-1, 1)], float)
        for norm in (EuclideanNorm(), MaxNorm(), PolytopeNorm(cube), EllipseNorm(np.diag([1, 2, 3]))):
            check_axioms(norm, rng, d=3)

    def test_barabanov_variants(self, rng):
        c = two_matrix_pair(3.0)
        check_axioms(BarabanovNorm(c, 0.0, 8), rng, x=Point.fixed(1), n=2000)
        check_axioms(WordSupNorm([A0, A1], 0.0, 8), rng, n=2000)

    def test_polytope_validation(self):
        with pytest.raises(PreconditionViolated):
            PolytopeNorm([[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        with pytest.raises(PreconditionViolated):
            PolytopeNorm(np.vstack([HEXAGON, [[0.1, 0.1], [-0.1, -0.1]]]))
        with pytest.raises(Degenerate):
            PolytopeNorm([[1.0, 1.0], [-1.0, -1.0], [2.0, 2.0], [-2.0, -2.0]])
        with pytest.raises(PreconditionViolated):
            EllipseNorm([[1.0, 0.0], [0.0, -1.0]])

    def test_operator_norms_are_exact(self, rng):
        th = np.linspace(0, 2 * np.pi, 20_000, endpoint=False)
        u = np.column_stack([np.cos(th), np.sin(th)])
        for norm in (MaxNorm(), PolytopeNorm(HEXAGON), EllipseNorm([[2.0, 0.3], [0.3, 0.5]])):
            for _ in range(5):
                m = rng.standard_normal((2, 2))
                sampled = np.max(norm.value(u @ m.T) / norm.value(u))
                exact = norm.operator_norms(m[None])[0]
                assert sampled <= exact * (1 + 1e-12)
                assert sampled >= exact * (1 - 1e-3)  # grid misses kinks by O(step)
                w = norm.worst_direction(m)
                assert norm.value(m @ w) / norm.value(w) == pytest.approx(exact, rel=1e-12)


class TestBarabanovEval:
    def test_orthogonal_cocycle(self, rng):
        c = Cocycle.from_matrices([rotation(0.3), rotation(2.0)], lam=1.0)
        for _ in range(20):
            u = rng.standard_normal(2)
            for depth in (1, 5, 9):
                assert barabanov_eval(c, 0.0, Point.fixed(0), u, depth) == \
                    pytest.approx(np.linalg.norm(u), rel=1e-14)

    def test_two_matrix_pair_range(self):
        c = two_matrix_pair(3.0)
        val = barabanov_eval(c, 0.0, Point.fixed(0), [1.0, 0.0], n_max=12)
        assert 1.0 <= val <= S2 * 1.1314
        # exhaustive enumeration: the best words all start with A1, whose image
        # (0.8, 0.8) then only rotates; the value is ||A1 e_1|| = 0.8 sqrt 2
        assert val == pytest.approx(0.8 * S2, rel=1e-14)

    def test_homogeneity_exact(self, rng):
        c = two_matrix_pair(3.0)
        for _ in range(20):
            u = rng.standard_normal(2)
            assert barabanov_eval(c, 0.0, Point.fixed(1), 2 * u) == \
                2 * barabanov_eval(c, 0.0, Point.fixed(1), u)

    def test_not_bunched(self):
        with pytest.raises(NotBunched):
            barabanov_eval(two_matrix_pair(1.0), 0.0, Point.fixed(0), [1.0, 0.0])

    def test_past_independence_one_step(self, rng):
        c = two_matrix_pair(3.0)
        xa, xb = Point((0,), (1,), (1,), 0), Point((1, 0), (0, 1), (1,), 2)
        assert xa.symbol(0) == xb.symbol(0) == 1
        for _ in range(20):
            u = rng.standard_normal(2)
            assert barabanov_eval(c, 0.0, xa, u, 10) == barabanov_eval(c, 0.0, xb, u, 10)

    def test_unstable_holonomy_invariance_radius_one(self, rng):
        from cocycle_lab.holonomy import unstable_holonomy
        from cocycle_lab.symbolic import Sft, splice
        base = Sft.full_shift(2, 4.0)
        table = {w: rotation(rng.uniform(0, 6)) @ np.diag([1.5, 1 / 1.5])
                 for w in base.admissible_words(3)}
        c = Cocycle(base, table, 1)
        norm = BarabanovNorm(c, 0.3, 8)
        for _ in range(10):
            x = Point((0, 1), (1, 0, 1), (1,), 1)
            y = splice(x, Point.fixed(int(rng.integers(0, 2))), 1)
            if y == x:
                continue
            u = rng.standard_normal(2)
            h = unstable_holonomy(c, x, y).matrix
            assert norm.value(h @ u, y) == pytest.approx(norm.value(u, x), rel=1e-10)

    def test_depth_convergence_with_exact_beta(self):
        # beta = log 2 exactly; the values approach |u_1| = 0.3 geometrically
        a, b = np.diag([2.0, 0.8]), 1.5 * rotation(0.7) @ np.diag([1.2, 0.7])
        c = Cocycle.from_matrices([a, b], lam=3.0)
        vals = {n: barabanov_eval(c, math.log(2), Point.fixed(0), [0.3, 1.0], n)
                for n in (2, 4, 6, 8, 10, 12)}
        errs = [vals[n] - 0.3 for n in (2, 4, 6, 8, 10, 12)]
        assert all(e >= -1e-12 for e in errs)
        assert all(e2 <= e1 for e1, e2 in zip(errs, errs[1:]))
        assert errs[-1] <= 1e-3


class TestExtremality:
    def test_two_matrix_pair(self):
        c = two_matrix_pair()
        rmax = extremality_check(c, MaxNorm(), 0.0)
        assert rmax.slack == 0.0 and rmax.extremal and rmax.exact
        reuc = extremality_check(c, EuclideanNorm(), 0.0)
        assert reuc.slack == pytest.approx(math.log(0.8 * S2), rel=1e-12) and not reuc.extremal
        assert reuc.worst_window == "1"
        assert set(rmax.as_dict()) >= {"sup_log_operator_norm", "beta_used", "slack"}

    def test_scale_invariance(self, rng):
        c = Cocycle.from_matrices([rng.standard_normal((2, 2)) for _ in range(2)])
        q = np.array([[2.0, 0.3], [0.3, 0.5]])
        for small, big in ((EllipseNorm(q), EllipseNorm(9 * q)),
                           (PolytopeNorm(HEXAGON), PolytopeNorm(3 * HEXAGON))):
            assert extremality_check(c, small, 0.1).slack == \
                pytest.approx(extremality_check(c, big, 0.1).slack, abs=1e-12)

    def test_barabanov_norm_is_extremal(self):
        c = two_matrix_pair(3.0)
        rep = extremality_check(c, BarabanovNorm(c, 0.0, 14), 0.0)
        assert not rep.exact and abs(rep.slack) <= 1e-2

    def test_slack_definition(self, rng):
        c = Cocycle.from_matrices([rng.standard_normal((3, 3)) for _ in range(2)])
        rep = extremality_check(c, EuclideanNorm(), 0.25)
        assert rep.slack == rep.sup_log_operator_norm - rep.beta_used


class TestIterate:
    def test_rotation_recovers_euclidean(self):
        assert constant_barabanov_iterate([A0], 0.0).residual < 1e-6
        it = constant_barabanov_iterate([rotation(1.0)], 0.0)
        # an angle off the grid leaves the polygon interpolation error
        assert it.residual <= 1 - math.cos(math.pi / 720) + 1e-12
        th = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
        vals = it.norm.value(np.column_stack([np.cos(th), np.sin(th)]))
        # gauge of an inscribed 720-gon: within 1 - cos(pi / 720) of a round ball
        assert vals.max() / vals.min() - 1 <= 1 - math.cos(math.pi / 720) + 1e-12

    def test_scalar_matrix_stationary(self):
        it = constant_barabanov_iterate([2 * np.eye(2)], math.log(2))
        assert it.iterations == 1 and it.residuals[0] == 0.0

    def test_two_matrix_pair(self):
        it = constant_barabanov_iterate([A0, A1], 0.0, grid=720, iters=500)
        assert it.residual < 1e-3
        hist = it.residuals
        assert all(b <= a + 1e-15 for a, b in zip(hist, hist[1:]))
        th = np.linspace(0, 2 * np.pi, 3600, endpoint=False)
        u = np.column_stack([np.cos(th), np.sin(th)])
        ratio = it.norm.value(u) / np.abs(u).max(axis=1)
        # unit ball inside the max-norm ball and containing it scaled by 1/1.25
        assert ratio.min() >= 1 - 1e-12 and ratio.max() <= 1.25 + 1e-12
        ops = it.norm.operator_norms(np.array([A0, A1]))
        assert ops.max() == pytest.approx(1.0, abs=1e-3)

    def test_wrong_beta_not_converged(self):
        with pytest.raises(NotConverged):
            constant_barabanov_iterate([rotation(1.0)], 0.5, grid=90)

    def test_three_dimensional_fallback(self):
        r3 = np.eye(3)
        r3[:2, :2] = rotation(0.4)
        it = constant_barabanov_iterate([r3], 0.0, iters=6)
        assert isinstance(it.norm, WordSupNorm) and it.residual <= 1e-12


class TestCalibration:
    def test_examples(self):
        assert calibration_check(two_matrix_pair(), MaxNorm(), 0.0) == 1.0
        assert calibration_check(Cocycle.from_matrices([rotation(0.9)]), EuclideanNorm(), 0.0) == 1.0

    def test_inflated_norm_negative_control(self):
        c = Cocycle.from_matrices([rotation(0.9)])
        assert calibration_check(c, EllipseNorm(np.diag([4.0, 1.0])), 0.0) < 1.0

    def test_barabanov_norm_calibrated(self):
        c = two_matrix_pair(3.0)
        assert calibration_check(c, BarabanovNorm(c, 0.0, 12), 0.0, samples=50) == 1.0

    def test_barabanov_equation_on_grid(self):
        th = 2 * np.pi * np.arange(720) / 720
        u = np.column_stack([np.cos(th), np.sin(th)])
        norm = MaxNorm()
        lhs = np.maximum(norm.value(u @ A0.T), norm.value(u @ A1.T))
        assert np.max(np.abs(lhs - norm.value(u))) <= 1e-15


class TestPerturbedExample:
    @pytest.mark.parametrize("m", [6, 10, 14])
    def test_product_and_exponent(self, m):
        ex = perturbed_example(m)
        assert np.allclose(ex.product, np.diag([-0.8 * S2, -0.1 * S2]), atol=1e-10)
        assert ex.exponent == pytest.approx(math.log(0.8 * S2) / (m + 1), rel=1e-12)
        assert ex.exponent > 0 and ex.word == "1" + "0" * m

    def test_value_m6(self):
        assert perturbed_example(6).exponent == pytest.approx(0.017633, abs=5e-7)

    def test_precondition(self):
        with pytest.raises(PreconditionViolated):
            perturbed_example(4)
