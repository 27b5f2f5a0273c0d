import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import random_point
from cocycle_lab.cocycle import (
    Cocycle,
    bolicity,
    check_irreducible,
    cocycle_product,
    exterior_power,
    fiber_bunching_check,
    has_common_real_eigenvector,
    singular_values,
    split_by_invariant_subspace,
)
from cocycle_lab.errors import ConfigError, NotInvariant, SingularMatrix
from cocycle_lab.scenarios import A0, A1, two_matrix_pair
from cocycle_lab.spectral import beta_lower_periodic, beta_upper
from cocycle_lab.symbolic import Point, Sft


def rotation(t):
    return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])


def well_conditioned(rng, d, cond=20.0):
    u, _ = np.linalg.qr(rng.standard_normal((d, d)))
    v, _ = np.linalg.qr(rng.standard_normal((d, d)))
    s = np.exp(rng.uniform(0, math.log(cond), d))
    return u @ np.diag(s) @ v


square = st.integers(1, 4).flatmap(
    lambda d: arrays(np.float64, (d, d), elements=st.floats(-3, 3, allow_subnormal=False)))


class TestConstruction:
    def test_config_round_trip(self):
        data = {"d": 2, "r": 0, "entries": {"0": A0.tolist(), "1": A1.tolist()}}
        c = Cocycle.from_dict(data)
        assert c.to_dict() == data
        assert np.array_equal(c.matrix_at(Point.fixed(1)), A1)

    def test_missing_window_has_path(self):
        with pytest.raises(ConfigError) as err:
            Cocycle.from_dict({"d": 2, "r": 1, "entries": {"000": np.eye(2).tolist(),
                                                       "111": np.eye(2).tolist()}})
        assert err.value.path.startswith("cocycle.entries.")

    def test_wrong_shape_has_path(self):
        with pytest.raises(ConfigError) as err:
            Cocycle.from_dict({"d": 2, "entries": {"0": [[1.0]]}})
        assert err.value.path == "cocycle.entries.0"

    def test_singular_generator_rejected(self):
        with pytest.raises(SingularMatrix):
            Cocycle.from_matrices([np.eye(2), np.zeros((2, 2))])

    def test_radius_one_matrix_lookup(self):
        base = Sft.full_shift(2)
        table = {(a, b, c): np.diag([1.0 + a + 2 * b + 4 * c, 1.0])
                 for a in (0, 1) for b in (0, 1) for c in (0, 1)}
        cc = Cocycle(base, table, 1)
        x = Point((0,), (1, 1), (0,), 1)  # ... 0 1 [1] 0 ...
        assert cc.matrix_at(x)[0, 0] == 1.0 + 1 + 2 + 0


class TestProducts:
    def test_examples(self):
        c = two_matrix_pair()
        x = Point.periodic((0, 1))
        assert np.array_equal(cocycle_product(c, x, 0), np.eye(2))
        assert np.allclose(cocycle_product(c, x, 2), A1 @ A0, atol=0)
        back = cocycle_product(c, x, -3) @ cocycle_product(c, x.shifted(-3), 3)
        assert np.allclose(back, np.eye(2), atol=1e-10)

    def test_cycle_product_batch_matches_pointwise(self, rng):
        c = two_matrix_pair()
        words = rng.integers(0, 2, (20, 7))
        batch = c.cycle_products(words)
        for w, m in zip(words, batch):
            assert np.allclose(m, c.product(Point.periodic(tuple(w)), 7), atol=1e-14)

    def test_cocycle_identity(self, rng):
        base = Sft.full_shift(2)
        for _ in range(50):
            table = {(a, b, e): well_conditioned(rng, 3)
                     for a in (0, 1) for b in (0, 1) for e in (0, 1)}
            c = Cocycle(base, table, 1)
            x = random_point(rng)
            m, n = (int(v) for v in rng.integers(-6, 7, 2))
            lhs = cocycle_product(c, x, m + n)
            rhs = cocycle_product(c, x.shifted(n), m) @ cocycle_product(c, x, n)
            scale = max(1.0, np.linalg.norm(lhs, 2))
            assert np.linalg.norm(lhs - rhs, 2) <= 1e-10 * scale

    def test_ill_conditioned_inverse(self):
        c = Cocycle(Sft.full_shift(1), {(0,): np.diag([1e5, 1e-5])}, 0)
        with pytest.raises(SingularMatrix):
            cocycle_product(c, Point.fixed(0), -2)


class TestSingularValues:
    def test_examples(self):
        assert np.allclose(singular_values(np.diag([2.0, 0.5])), [2.0, 0.5])
        assert np.allclose(singular_values(A1), [0.8 * math.sqrt(2), 0.1 * math.sqrt(2)],
                           atol=1e-15)
        assert np.allclose(singular_values(A0), [1.0, 1.0])

    def test_random_direction_oracle(self, rng):
        for d in (2, 3, 4):
            for _ in range(5):
                m = rng.standard_normal((d, d))
                u = rng.standard_normal((10_000, d))
                u /= np.linalg.norm(u, axis=1, keepdims=True)
                best = np.linalg.norm(u @ m.T, axis=1).max()
                s1 = singular_values(m)[0]
                assert best <= s1 * (1 + 1e-12)
                if d == 2:
                    assert s1 - best <= 1e-6 * s1

    def test_bolicity_examples(self):
        assert bolicity(np.eye(3)) == 1.0
        assert bolicity(A0) == pytest.approx(1.0, abs=1e-15)
        assert bolicity(A1) == pytest.approx(8.0, rel=1e-14)
        with pytest.raises(SingularMatrix):
            bolicity(np.array([[1.0, 1.0], [1.0, 1.0]]))

    def test_bolicity_submultiplicative(self, rng):
        for _ in range(500):
            d = int(rng.integers(1, 5))
            m, n = well_conditioned(rng, d, 1e3), well_conditioned(rng, d, 1e3)
            assert bolicity(m @ n) <= bolicity(m) * bolicity(n) * (1 + 1e-12)


class TestExteriorPower:
    def test_examples(self, rng):
        m = rng.standard_normal((3, 3))
        assert np.allclose(exterior_power(m, 1), m)
        assert exterior_power(m, 3) == pytest.approx(np.linalg.det(m), rel=1e-12)
        two = exterior_power(np.diag([2.0, 0.5]), 2)
        assert two.shape == (1, 1) and two[0, 0] == pytest.approx(1.0)

    @settings(max_examples=200, deadline=None)
    @given(square, st.integers(1, 4))
    def test_norm_is_product_of_singular_values(self, m, p):
        d = m.shape[0]
        p = min(p, d)
        s = singular_values(m)
        got = np.linalg.norm(exterior_power(m, p), 2)
        assert got == pytest.approx(float(np.prod(s[:p])), rel=1e-9, abs=1e-9)

    def test_multiplicative(self, rng):
        m, n = rng.standard_normal((4, 4)), rng.standard_normal((4, 4))
        for p in range(1, 5):
            assert np.allclose(exterior_power(m @ n, p),
                               exterior_power(m, p) @ exterior_power(n, p), atol=1e-10)


class TestBunching:
    def test_rotation_margin(self):
        for lam in (0.3, 1.0, 2.5):
            for theta in (0.2, 1.0):
                c = Cocycle.from_matrices([A0, rotation(0.4)], lam=lam)
                rep = fiber_bunching_check(c, theta)
                assert rep.bunched and rep.margin == pytest.approx(theta * lam, abs=1e-12)
                assert rep.margin == rep.threshold - rep.max_log_bolicity

    def test_two_matrix_threshold(self):
        log8 = math.log(8.0)
        assert not fiber_bunching_check(two_matrix_pair(log8 - 1e-6), 1.0).bunched
        assert fiber_bunching_check(two_matrix_pair(log8 + 1e-6), 1.0).bunched
        assert fiber_bunching_check(two_matrix_pair(1.0)).max_log_bolicity == \
            pytest.approx(log8, rel=1e-14)

    def test_strong_bunching_in_dimension_three(self):
        lam, theta = 1.5, 1.0
        m = np.diag([math.exp(theta * lam / 2), 1.0, 1.0])
        rep = fiber_bunching_check(Cocycle.from_matrices([m, np.eye(3)], lam=lam), theta)
        assert rep.bunched and not rep.strongly_bunched

    def test_strong_equals_plain_in_dimension_two(self):
        lam = 1.5
        m = np.diag([math.exp(lam / 2), 1.0])
        rep = fiber_bunching_check(Cocycle.from_matrices([m], lam=lam))
        assert rep.bunched and rep.strongly_bunched


def _invariant_line_residual(mats, n_grid=10_000):
    """Grid oracle: min over lines of the worst ``|sin angle(A v, v)|``."""
    phi = np.arange(n_grid) * math.pi / n_grid
    v = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    worst = np.zeros(n_grid)
    for a in mats:
        w = v @ np.asarray(a).T
        cross = np.abs(v[:, 0] * w[:, 1] - v[:, 1] * w[:, 0]) / np.linalg.norm(w, axis=1)
        worst = np.maximum(worst, cross)
    return float(worst.min())


class TestIrreducible:
    def test_examples(self):
        assert check_irreducible([A0])
        assert not check_irreducible([np.diag([2.0, 1.0]), np.diag([1.0, 3.0])])
        assert check_irreducible([A0, A1])
        assert not check_irreducible([np.eye(2)])
        # commutant M_2(R) contains elements with complex spectrum
        assert not check_irreducible([np.eye(4), np.kron(A0, np.eye(2))])
        assert not check_irreducible([np.kron(np.eye(2), A0)])

    def test_grid_oracle_dimension_two(self, rng):
        # sin-angle residual is Lipschitz in the line angle with constant <= 1 + bol^2,
        # so a true invariant line keeps the grid minimum below this bound
        cond = 4.0
        bound = (1 + cond ** 2) * (math.pi / 10_000) / 2
        decisive = 0
        for _ in range(60):
            mats = [well_conditioned(rng, 2, cond) for _ in range(int(rng.integers(1, 3)))]
            res = _invariant_line_residual(mats)
            if res > bound:
                decisive += 1
                assert check_irreducible(mats)
        assert decisive >= 20
        for _ in range(60):
            p = well_conditioned(rng, 2, 2.0)
            tri = [np.array([[rng.uniform(0.5, 2), rng.normal()], [0.0, rng.uniform(0.5, 2)]])
                   for _ in range(2)]
            mats = [p @ t @ np.linalg.inv(p) for t in tri]
            sv = singular_values(mats[0])
            residual_bound = (1 + (sv[0] / sv[1]) ** 2) * (math.pi / 10_000) / 2
            assert _invariant_line_residual(mats) <= residual_bound
            assert not check_irreducible(mats)

    def test_dimension_two_matches_common_eigenvector(self, rng):
        cases = [[A0], [np.eye(2)], [A0, A1], [np.diag([2.0, 1.0]), np.diag([1.0, 3.0])]]
        for _ in range(100):
            p = well_conditioned(rng, 2, 3.0)
            t = np.array([[1.0, rng.normal()], [0.0, rng.uniform(0.5, 2)]])
            cases.append([p @ t @ np.linalg.inv(p), well_conditioned(rng, 2, 3.0)])
            cases.append([p @ t @ np.linalg.inv(p), p @ t @ t @ np.linalg.inv(p)])
        for mats in cases:
            assert check_irreducible(mats) == (not has_common_real_eigenvector(mats))

    def test_higher_dimension_block_triangular(self, rng):
        for _ in range(20):
            p = well_conditioned(rng, 4, 3.0)
            mats = []
            for _ in range(3):
                t = rng.standard_normal((4, 4))
                t[2:, :2] = 0.0
                mats.append(p @ t @ np.linalg.inv(p))
            assert not check_irreducible(mats)
            assert check_irreducible([rng.standard_normal((4, 4)) for _ in range(2)])

    def test_complex_structure_is_irreducible(self):
        # M_2(R) (x) C acting on R^2 (x) R^2 is M_2(C) on C^2: a proper subalgebra
        # (dimension 8) that still has no invariant real subspace
        r = np.kron(np.eye(2), A0)
        swap = np.kron(np.array([[0.0, 1.0], [1.0, 0.0]]), np.eye(2))
        stretch = np.kron(np.diag([2.0, 1.0]), np.eye(2))
        assert not check_irreducible([r])
        assert check_irreducible([r, swap, stretch])
        assert not check_irreducible([swap, stretch])


class TestSplit:
    def test_examples(self):
        a = [np.array([[2.0, 5.0], [0.0, 3.0]])]
        res, quo = split_by_invariant_subspace(a, np.array([1.0, 0.0]))
        assert np.allclose(res[0], [[2.0]]) and np.allclose(quo[0], [[3.0]])
        res, quo = split_by_invariant_subspace([A0, A1], np.eye(2))
        assert np.allclose(res[0], A0) and np.allclose(res[1], A1) and quo == []

    def test_not_invariant(self):
        with pytest.raises(NotInvariant):
            split_by_invariant_subspace([A0], np.array([1.0, 0.0]))

    def test_cocycle_split_whole_space(self):
        c = two_matrix_pair()
        res, quo = split_by_invariant_subspace(c, np.eye(2))
        assert quo is None and np.allclose(res.matrices, c.matrices)

    def test_beta_of_pieces(self, rng):
        for _ in range(5):
            p = well_conditioned(rng, 2, 3.0)
            tri = [np.array([[rng.uniform(0.3, 2), rng.normal()], [0.0, rng.uniform(0.3, 2)]])
                   for _ in range(2)]
            c = Cocycle.from_matrices([p @ t @ np.linalg.inv(p) for t in tri])
            res, quo = split_by_invariant_subspace(c, p[:, 0])
            # periodic lower bounds are exact spectral radii: block triangular
            # eigenvalues are the union of the diagonal blocks' eigenvalues
            whole = beta_lower_periodic(c, 8)[0]
            parts = max(beta_lower_periodic(res, 8)[0], beta_lower_periodic(quo, 8)[0])
            assert whole == pytest.approx(parts, abs=1e-9)
            up_whole = beta_upper(c, 12)
            up_parts = max(beta_upper(res, 12), beta_upper(quo, 12))
            assert up_parts <= up_whole + 1e-12
            assert up_whole - up_parts <= math.log(12 * 4 * bolicity(p)) / 12
