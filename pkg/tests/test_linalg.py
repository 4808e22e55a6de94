# -*- coding: utf-8 -*-

import numpy as np
import pytest

from coregp.core.errors import DimensionMismatch, NonSquare, NonSymmetric, NotPositiveDefinite
from coregp.core.linalg import cholesky, inverse_psd, logdet_psd, solve_psd, symmetrize

from conftest import random_spd


class TestCholesky:
    def test_identity_needs_no_jitter(self):
        factor = cholesky(np.eye(4))
        np.testing.assert_allclose(factor.lower, np.eye(4))
        assert factor.jitter_used == 0.0

    def test_known_two_by_two(self):
        factor = cholesky(np.array([[4.0, 2.0], [2.0, 3.0]]))
        np.testing.assert_allclose(factor.lower, [[2.0, 0.0], [1.0, np.sqrt(2.0)]], atol=1e-14)
        assert logdet_psd(factor) == pytest.approx(np.log(8.0), abs=1e-12)

    def test_rank_deficient_uses_small_jitter(self):
        factor = cholesky(np.ones((3, 3)))
        assert 0.0 < factor.jitter_used <= 1e-5

    @pytest.mark.parametrize("base", [1e-8, 1e-6, 1e-3])
    def test_jitter_taken_from_ladder(self, base):
        factor = cholesky(np.ones((3, 3)), base_jitter=base)
        ladder = [base * step for step in (1.0, 10.0, 100.0, 1000.0)]
        assert any(np.isclose(factor.jitter_used, rung, rtol=1e-12, atol=0.0) for rung in ladder)

    def test_ladder_climbs_until_positive(self):
        # 最小特征值 -5e-5，需要 100·base 才能转正
        A = np.diag([1.0, -5e-5])
        factor = cholesky(A, base_jitter=1e-6)
        assert factor.jitter_used == pytest.approx(1e-4, rel=1e-12)
        assert np.all(np.diag(factor.lower) > 0)

    def test_ladder_exhausted_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.diag([1.0, -1e-2]), base_jitter=1e-6)

    @pytest.mark.parametrize("seed", range(10))
    def test_well_conditioned_needs_no_jitter(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 11))
        factor = cholesky(random_spd(n, rng))
        assert factor.jitter_used == 0.0

    def test_diagonal_example(self):
        factor = cholesky(np.diag([4.0, 9.0]))
        np.testing.assert_allclose(factor.lower, np.diag([2.0, 3.0]), atol=1e-14)
        assert factor.jitter_used == 0.0

    def test_two_one_one_two_example(self):
        factor = cholesky(np.array([[2.0, 1.0], [1.0, 2.0]]))
        np.testing.assert_allclose(factor.lower, [[1.414214, 0.0], [0.707107, 1.224745]], atol=1e-6)

    def test_logdet_of_diagonal_e(self):
        factor = cholesky(np.diag([np.e, np.e]))
        assert logdet_psd(factor) == pytest.approx(2.0, abs=1e-12)

    def test_indefinite_raises(self):
        with pytest.raises(NotPositiveDefinite):
            cholesky(np.array([[1.0, 2.0], [2.0, 1.0]]))

    def test_not_positive_definite_is_linalg_error(self):
        with pytest.raises(np.linalg.LinAlgError):
            cholesky(-np.eye(2))

    def test_non_square_raises(self):
        with pytest.raises(NonSquare):
            cholesky(np.ones((2, 3)))

    def test_asymmetric_raises(self):
        with pytest.raises(NonSymmetric):
            symmetrize(np.array([[1.0, 0.5], [0.0, 1.0]]))

    def test_reconstruction(self, rng):
        A = random_spd(6, rng)
        factor = cholesky(A)
        np.testing.assert_allclose(factor.lower @ factor.lower.T, A, atol=1e-10)


class TestSolveAndLogdet:
    def test_solve_vector_and_matrix(self, rng):
        A = random_spd(5, rng)
        factor = cholesky(A)
        b = rng.standard_normal(5)
        B = rng.standard_normal((5, 3))
        np.testing.assert_allclose(A @ solve_psd(factor, b), b, atol=1e-10)
        np.testing.assert_allclose(A @ solve_psd(factor, B), B, atol=1e-10)

    def test_solve_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            solve_psd(cholesky(np.eye(3)), np.ones(4))

    def test_logdet_matches_slogdet(self, rng):
        A = random_spd(7, rng)
        sign, expected = np.linalg.slogdet(A)
        assert sign > 0
        assert logdet_psd(cholesky(A)) == pytest.approx(expected, rel=1e-12)

    def test_inverse(self, rng):
        A = random_spd(4, rng)
        np.testing.assert_allclose(inverse_psd(cholesky(A)) @ A, np.eye(4), atol=1e-10)
