# -*- coding: utf-8 -*-

import numpy as np
import pytest

from coregp.core.errors import InvalidId
from coregp.data.synthetic import (NOISE_VARIANCE, gen_synthetic, make_blobs, make_moons,
                                   synthetic_latent, synthetic_targets)


class TestGenerators:
    @pytest.mark.parametrize("dataset_id,dim", [(1, 1), (2, 1), (3, 1), (4, 2), (5, 2)])
    def test_shapes(self, dataset_id, dim):
        data = gen_synthetic(dataset_id, n=50, seed=3)
        assert data.X.shape == (50, dim)
        assert data.y.shape == (50,)
        assert data.name == f"synthetic-{dataset_id}"
        assert np.all(np.isfinite(data.y))

    @pytest.mark.parametrize("dataset_id", [1, 2, 3, 4, 5])
    @pytest.mark.parametrize("n", [1, 2])
    def test_tiny_samples(self, dataset_id, n):
        data = gen_synthetic(dataset_id, n=n, seed=4)
        assert data.size == n
        assert np.all(np.isfinite(data.X)) and np.all(np.isfinite(data.y))

    def test_input_ranges(self):
        assert np.all(np.abs(gen_synthetic(1, n=200).X) <= 4.0)
        X3 = gen_synthetic(3, n=200).X
        assert X3.min() >= 0.0 and X3.max() <= 2.0

    @pytest.mark.parametrize("dataset_id", [1, 2, 3, 4, 5])
    def test_deterministic(self, dataset_id):
        a = gen_synthetic(dataset_id, n=40, seed=7)
        b = gen_synthetic(dataset_id, n=40, seed=7)
        np.testing.assert_array_equal(a.X, b.X)
        np.testing.assert_array_equal(a.y, b.y)

    def test_seed_changes_sample(self):
        assert not np.array_equal(gen_synthetic(2, n=40, seed=0).y, gen_synthetic(2, n=40, seed=1).y)

    def test_inputs_are_not_normalized(self):
        data = gen_synthetic(3, n=20)
        np.testing.assert_array_equal(data.X_raw, data.X)

    @pytest.mark.parametrize("dataset_id", [0, 6, -1])
    def test_invalid_id(self, dataset_id):
        with pytest.raises(InvalidId):
            gen_synthetic(dataset_id)


class TestLatentFunctions:
    @pytest.mark.parametrize("dataset_id,x,expected", [
        (1, [0.0], 0.8),
        (2, [0.0], 2.0),
        (3, [0.0], 1.0),
        (3, [0.5], -1.0),
        (4, [0.0, 0.0], 4.0),
        (5, [0.0, 0.0], 1.5),
    ])
    def test_values_at_known_points(self, dataset_id, x, expected):
        assert synthetic_latent(dataset_id, np.array([x]))[0] == pytest.approx(expected, abs=1e-12)

    def test_noise_vanishes_at_origin_for_cubic_scaling(self, rng):
        y = synthetic_targets(3, np.zeros((5, 1)), rng)
        np.testing.assert_allclose(y, 1.0, atol=1e-12)

    def test_additive_noise_variance(self):
        rng = np.random.default_rng(4)
        X = np.zeros((20000, 2))
        residual = synthetic_targets(4, X, rng) - synthetic_latent(4, X)
        assert residual.var() == pytest.approx(NOISE_VARIANCE[4], rel=0.05)


class TestBlobs:
    def test_zero_spread_lands_on_centers(self):
        X, labels = make_blobs(30, std=0.0, seed=2, return_labels=True)
        centers = np.unique(X, axis=0)
        assert centers.shape == (3, 2)
        for label in range(3):
            assert np.unique(X[labels == label], axis=0).shape == (1, 2)

    def test_one_point_per_center(self):
        _, labels = make_blobs(3, seed=0, return_labels=True)
        assert sorted(labels.tolist()) == [0, 1, 2]

    def test_spread(self):
        X, labels = make_blobs(30000, seed=5, return_labels=True)
        spreads = [X[labels == j].std(axis=0, ddof=1) for j in range(3)]
        np.testing.assert_allclose(spreads, 0.4, atol=0.01)

    def test_centers_inside_box(self):
        X = make_blobs(30, std=0.0, seed=9)
        assert np.all(np.abs(X) <= 10.0)

    def test_fewer_points_than_centers(self):
        X, labels = make_blobs(2, seed=0, return_labels=True)
        assert X.shape == (2, 2)
        assert sorted(labels.tolist()) == [0, 1]

    def test_no_points(self):
        with pytest.raises(ValueError):
            make_blobs(0)


class TestMoons:
    def test_noiseless_points_on_arcs(self):
        X = make_moons(100, noise=0.0, seed=1)
        outer = np.isclose(np.hypot(X[:, 0], X[:, 1]), 1.0) & (X[:, 1] >= -1e-12)
        inner = np.isclose(np.hypot(X[:, 0] - 1.0, X[:, 1] - 0.5), 1.0) & (X[:, 1] <= 0.5 + 1e-12)
        assert np.all(outer | inner)
        assert outer.sum() >= 50 and inner.sum() >= 50

    def test_single_point_on_an_arc(self):
        X = make_moons(1, noise=0.0, seed=0)
        assert X.shape == (1, 2)
        on_outer = np.isclose(np.hypot(X[0, 0], X[0, 1]), 1.0)
        on_inner = np.isclose(np.hypot(X[0, 0] - 1.0, X[0, 1] - 0.5), 1.0)
        assert on_outer or on_inner

    def test_four_points(self):
        X = make_moons(4, noise=0.0, seed=0)
        got = sorted(map(tuple, np.round(X, 12)))
        assert got == [(-1.0, 0.0), (0.0, 0.5), (1.0, 0.0), (2.0, 0.5)]
