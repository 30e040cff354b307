"""Tests for the small dense linear-algebra kernel."""

import math

import numpy as np
import pytest

from ellipsample import RngStream, random_rotation
from ellipsample.errors import (
    DimensionMismatch,
    DimensionOutOfRange,
    NotPositiveDefinite,
    NotSymmetric,
)
from ellipsample.linalg import (
    cholesky,
    det_triangular,
    invert_spd,
    is_rotation,
    parse_matrix_text,
    solve_lower,
    solve_upper,
)
from helpers import cofactor_det, rand_spd

SQRT2 = math.sqrt(2.0)


class TestCholesky:
    def test_identity(self):
        np.testing.assert_array_equal(cholesky(np.eye(3)), np.eye(3))

    def test_known_2x2(self):
        lower = cholesky([[4.0, 2.0], [2.0, 3.0]])
        np.testing.assert_allclose(lower, [[2.0, 0.0], [1.0, SQRT2]], rtol=1e-15)
        # recompose and compare to the input
        np.testing.assert_allclose(lower @ lower.T, [[4.0, 2.0], [2.0, 3.0]], rtol=1e-15)

    def test_indefinite_rejected(self):
        # second leading minor is 1*1 - 2*2 = -3 < 0
        with pytest.raises(NotPositiveDefinite):
            cholesky([[1.0, 2.0], [2.0, 1.0]])

    def test_asymmetric_rejected(self):
        with pytest.raises(NotSymmetric):
            cholesky([[1.0, 0.1], [0.0, 1.0]])

    def test_asymmetry_tolerance_is_scale_relative(self):
        # absolute asymmetry 1e-6 is negligible against entries of order 1e6
        m = np.array([[2e6, 1e6], [1e6 + 1e-6, 2e6]])
        lower = cholesky(m)
        np.testing.assert_allclose(lower @ lower.T, 0.5 * (m + m.T), rtol=1e-12)

    def test_recompose_random_spd(self):
        rng = RngStream(101)
        for n in range(1, 17):
            for trial in range(4):
                m = rand_spd(n, rng.derive(n).derive(trial))
                lower = cholesky(m)
                err = np.linalg.norm(lower @ lower.T - m) / np.linalg.norm(m)
                assert err <= 1e-9
                assert np.all(np.diag(lower) > 0.0)
                assert np.all(np.triu(lower, 1) == 0.0)

    def test_dimension_cap(self):
        with pytest.raises(DimensionOutOfRange):
            cholesky(np.eye(65))

    def test_zero_matrix_rejected(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.zeros((2, 2)))


class TestSolveLower:
    def test_identity(self):
        np.testing.assert_array_equal(solve_lower(np.eye(2), [3.0, 4.0]), [3.0, 4.0])

    def test_forward_substitution_by_hand(self):
        lower = [[2.0, 0.0], [1.0, SQRT2]]
        y = solve_lower(lower, [2.0, 1.0 + SQRT2])
        np.testing.assert_allclose(y, [1.0, 1.0], rtol=1e-15)

    def test_diagonal_scaling(self):
        np.testing.assert_allclose(solve_lower(np.diag([2.0, 4.0]), [2.0, 4.0]), [1.0, 1.0])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_lower(np.eye(3), [1.0, 2.0])

    def test_nontriangular_rejected(self):
        with pytest.raises(ValueError):
            solve_lower([[1.0, 0.5], [0.0, 1.0]], [1.0, 1.0])

    def test_residual_random(self):
        rng = RngStream(11)
        for n in [1, 2, 5, 9, 16]:
            child = rng.derive(n)
            lower = np.tril(np.asarray(child.normals((n, n))))
            np.fill_diagonal(lower, 1.0 + np.abs(child.normals(n)))
            b = np.asarray(child.normals(n))
            y = solve_lower(lower, b)
            assert np.linalg.norm(lower @ y - b) <= 1e-9 * max(1.0, np.linalg.norm(b))


class TestSolveUpper:
    def test_round_trip_with_lower(self):
        rng = RngStream(12)
        for n in [1, 3, 8]:
            m = rand_spd(n, rng.derive(n))
            r = cholesky(m)
            b = np.asarray(rng.derive(100 + n).normals(n))
            x = solve_upper(r.T, solve_lower(r, b))
            np.testing.assert_allclose(m @ x, b, atol=1e-9 * np.linalg.norm(b))

    def test_nontriangular_rejected(self):
        with pytest.raises(ValueError):
            solve_upper([[1.0, 0.0], [0.5, 1.0]], [1.0, 1.0])


class TestDetTriangular:
    def test_identity(self):
        assert det_triangular(np.eye(5)) == 1.0

    def test_diagonal(self):
        assert det_triangular(np.diag([2.0, 1.0])) == 2.0

    def test_cholesky_factor(self):
        assert det_triangular([[2.0, 0.0], [1.0, SQRT2]]) == pytest.approx(2.0 * SQRT2, rel=1e-15)

    def test_squared_matches_cofactor_expansion(self):
        rng = RngStream(21)
        for n in range(1, 5):
            for trial in range(10):
                m = rand_spd(n, rng.derive(n).derive(trial))
                det_m = cofactor_det(m)
                assert det_triangular(cholesky(m)) ** 2 == pytest.approx(det_m, rel=1e-8)


class TestIsRotation:
    def test_identity(self):
        assert is_rotation(np.eye(3), 1e-9)

    def test_plane_rotation(self):
        t = math.radians(30.0)
        c = [[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]
        assert is_rotation(c, 1e-9)

    def test_reflection_rejected(self):
        # orthogonal but det = -1
        assert not is_rotation(np.diag([1.0, -1.0]), 1e-9)

    def test_non_orthogonal_rejected(self):
        assert not is_rotation([[1.0, 0.1], [0.0, 1.0]], 1e-9)

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            is_rotation(np.eye(2), 0.0)

    def test_closed_under_composition(self):
        rng = RngStream(31)
        for n in range(2, 9):
            c1 = random_rotation(n, rng.derive(2 * n))
            c2 = random_rotation(n, rng.derive(2 * n + 1))
            assert is_rotation(c1 @ c2, 1e-8)


class TestInvertSpd:
    def test_identity(self):
        np.testing.assert_allclose(invert_spd(np.eye(4)), np.eye(4))

    def test_diagonal_reciprocal(self):
        np.testing.assert_allclose(invert_spd(np.diag([4.0, 1.0])), np.diag([0.25, 1.0]))

    def test_known_2x2(self):
        m = np.array([[4.0, 2.0], [2.0, 3.0]])
        inv = invert_spd(m)
        np.testing.assert_allclose(inv, [[0.375, -0.25], [-0.25, 0.5]], rtol=1e-14)
        # the defining property: product with the input is the identity
        assert np.abs(m @ inv - np.eye(2)).max() <= 1e-8

    def test_product_identity_random(self):
        rng = RngStream(41)
        for n in [1, 2, 5, 10, 16]:
            m = rand_spd(n, rng.derive(n))
            assert np.abs(m @ invert_spd(m) - np.eye(n)).max() <= 1e-8

    def test_propagates_cholesky_errors(self):
        with pytest.raises(NotPositiveDefinite):
            invert_spd([[1.0, 2.0], [2.0, 1.0]])


class TestMatrixTextFormat:
    def test_basic(self):
        m = parse_matrix_text("1 2\n3 4\n")
        np.testing.assert_array_equal(m, [[1.0, 2.0], [3.0, 4.0]])

    def test_comments_blanks_scientific(self):
        text = "# a comment\n1e0  2.5E-1   # trailing note\n\n-3 4e2\n"
        np.testing.assert_array_equal(parse_matrix_text(text), [[1.0, 0.25], [-3.0, 400.0]])

    def test_ragged_rejected(self):
        with pytest.raises(ValueError, match="ragged"):
            parse_matrix_text("1 2\n3\n")

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="no matrix rows"):
            parse_matrix_text("# only comments\n")

    def test_bad_token_rejected(self):
        with pytest.raises(ValueError):
            parse_matrix_text("1 spam\n")
