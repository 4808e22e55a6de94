# -*- coding: utf-8 -*-

import logging

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from coregp.core import autodiff as ad
from coregp.core.autodiff import ParamVector
from coregp.core.errors import (DimensionMismatch, LengthMismatch, NonFiniteGradient,
                                NotPositiveDefinite, TrainingAborted)
from coregp.core.estimators import get_estimator
from coregp.core.kernels import KernelParams
from coregp.core.training import AdamState, TrainConfig, TrainTrace, adam_step, rmse, train_model
from coregp.data.dataset import Dataset, Normalization
from coregp.data.splits import kfold_split
from coregp.data.synthetic import gen_synthetic


class QuadraticEstimator:
    """下界 -(w-1)²，预测值恒为 w；可在第 fail_at 次调用目标函数时抛出异常"""

    label = "quadratic"
    stochastic = False

    def __init__(self, fail_at=None):
        self.fail_at = fail_at
        self.calls = 0

    def init_params(self, X, y, seed=0):
        return ParamVector.from_segments({"w": np.zeros(1)})

    def objective(self, view, X_b, y_b, n_total):
        self.calls += 1
        if self.fail_at is not None and self.calls >= self.fail_at:
            raise NotPositiveDefinite("矩阵不正定")
        d = view["w"] - 1.0
        return -ad.sum_(d * d)

    def predict(self, params, X_train, y_train, x_star):
        return np.full(x_star.shape[0], params["w"][0]), np.ones(x_star.shape[0])


@pytest.fixture
def zero_data():
    return Dataset(X=np.zeros((10, 1)), y=np.zeros(10), name="zeros", normalization=Normalization.identity(1))


ZERO_FOLD = (np.arange(7), np.arange(7, 10))


class TestAdam:
    @pytest.fixture
    def params(self):
        return ParamVector.from_segments({"a": np.array([0.5, -1.0, 2.0])})

    def test_zero_gradient_keeps_parameters(self, params):
        state, new = adam_step(AdamState.fresh(3), params, np.zeros(3))
        np.testing.assert_array_equal(new.values, params.values)
        assert state.step == 1

    def test_first_step_moves_by_learning_rate(self, params):
        grad = np.array([3.0, -0.2, 1e-3])
        _, new = adam_step(AdamState.fresh(3, lr=0.01), params, grad)
        np.testing.assert_allclose(new.values - params.values, 0.01 * np.sign(grad), rtol=1e-4)

    def test_ascends_quadratic(self):
        params = ParamVector.from_segments({"w": np.zeros(2)})
        state = AdamState.fresh(2, lr=0.05)
        for _ in range(500):
            grad = -2.0 * (params.values - np.array([1.0, -2.0]))
            state, params = adam_step(state, params, grad)
        np.testing.assert_allclose(params.values, [1.0, -2.0], atol=5e-2)

    def test_non_finite_gradient(self, params):
        with pytest.raises(NonFiniteGradient):
            adam_step(AdamState.fresh(3), params, np.array([0.0, np.nan, 1.0]))

    def test_length_mismatch(self, params):
        with pytest.raises(DimensionMismatch):
            adam_step(AdamState.fresh(3), params, np.zeros(2))


class TestRmse:
    @pytest.mark.parametrize("pred,truth,expected", [
        ([1.0, 2.0], [1.0, 2.0], 0.0),
        ([0.0, 0.0], [3.0, 4.0], 3.5355339059),
        ([2.0], [-1.0], 3.0),
    ])
    def test_values(self, pred, truth, expected):
        assert rmse(pred, truth) == pytest.approx(expected, rel=1e-9, abs=1e-12)

    @pytest.mark.parametrize("pred,truth", [([1.0], [1.0, 2.0]), ([], [])])
    def test_length_mismatch(self, pred, truth):
        with pytest.raises(LengthMismatch):
            rmse(pred, truth)


class TestConfigAndTrace:
    @pytest.mark.parametrize("field,value", [
        ("batch_size", 0), ("max_epochs", -1), ("patience_epochs", 0), ("lr", 0.0), ("eval_every", 0),
    ])
    def test_invalid_config(self, field, value):
        with pytest.raises(ValidationError):
            TrainConfig(**{field: value})

    def test_unknown_config_key(self):
        with pytest.raises(ValidationError):
            TrainConfig(learning_rate=0.1)

    def test_trace_epochs_strictly_increase(self):
        trace = TrainTrace()
        trace.append(1, -10.0, 0.5, 0.1)
        trace.append(3, -9.0, 0.4, 0.2)
        with pytest.raises(ValueError):
            trace.append(3, -8.0, 0.3, 0.3)
        np.testing.assert_array_equal(trace.epochs, [1, 3])

    def test_trace_csv(self, tmp_path):
        trace = TrainTrace()
        trace.append(1, -10.0, 0.5, 0.1)
        trace.to_csv(tmp_path / "trace.csv")
        text = (tmp_path / "trace.csv").read_text(encoding="utf-8")
        assert text.splitlines()[0] == "epoch,bound,val_rmse,seconds"
        assert pd.read_csv(tmp_path / "trace.csv")["bound"].iloc[0] == -10.0


class TestTrainModel:
    @pytest.fixture
    def synthetic(self):
        data = gen_synthetic(3, n=40, seed=2)
        return data, kfold_split(data.size, k=1, seed=0).folds[0]

    def test_zero_epochs_returns_initial_parameters(self, synthetic):
        data, fold = synthetic
        estimator = get_estimator("exact")
        init = estimator.init_params(data.X[fold[0]], data.y[fold[0]])
        result = train_model(estimator, data, fold, TrainConfig(max_epochs=0))
        np.testing.assert_array_equal(result.params.values, init.values)
        assert result.epochs == 0
        assert result.best_epoch == 0
        assert len(result.trace) == 0
        assert np.isfinite(result.bound)

    def test_deterministic(self, synthetic):
        data, fold = synthetic
        cfg = TrainConfig(max_epochs=15, lr=0.05, batch_size=8)
        a = train_model(get_estimator("cvtgp", 4), data, fold, cfg)
        b = train_model(get_estimator("cvtgp", 4), data, fold, cfg)
        np.testing.assert_array_equal(a.params.values, b.params.values)
        np.testing.assert_array_equal(a.trace.bounds, b.trace.bounds)

    @pytest.mark.parametrize("model,size", [("exact", None), ("titsias", 4), ("svgp", 4), ("cvtgp", 4)])
    def test_checkpoint_reproduces_best_rmse(self, synthetic, model, size):
        data, fold = synthetic
        estimator = get_estimator(model, size)
        result = train_model(estimator, data, fold, TrainConfig(max_epochs=20, lr=0.05, batch_size=10))
        train_idx, val_idx = fold
        mean, _ = estimator.predict(result.params, data.X[train_idx], data.y[train_idx], data.X[val_idx])
        assert rmse(mean, data.y[val_idx]) == pytest.approx(result.best_rmse, rel=1e-12)
        assert result.best_rmse <= np.min(result.trace.val_rmse, initial=np.inf) + 1e-12
        assert np.isfinite(result.bound)

    def test_titsias_keeps_inducing_points(self, synthetic):
        data, fold = synthetic
        estimator = get_estimator("titsias", 4)
        init = estimator.init_params(data.X[fold[0]], data.y[fold[0]])
        result = train_model(estimator, data, fold, TrainConfig(max_epochs=10, lr=0.05))
        np.testing.assert_array_equal(result.params["inducing"], init["inducing"])

    def test_exact_training_improves_bound(self, synthetic):
        data, fold = synthetic
        cfg = TrainConfig(max_epochs=60, lr=0.05, patience_epochs=60)
        result = train_model(get_estimator("exact"), data, fold, cfg)
        assert result.trace.bounds[-1] > result.trace.bounds[0]

    def test_logs_hyperparameters(self, synthetic, caplog):
        data, fold = synthetic
        estimator = get_estimator("exact")
        caplog.set_level(logging.INFO, logger="coregp.core.training")
        result = train_model(estimator, data, fold, TrainConfig(max_epochs=2))
        start, finish = caplog.records[0].getMessage(), caplog.records[-1].getMessage()
        assert start.startswith("开始训练") and "lengthscale" in start
        assert finish.startswith("完成训练")
        assert repr(KernelParams.from_view(result.params).describe()["noise"]) in finish

    def test_logs_without_kernel_segments(self, zero_data, caplog):
        caplog.set_level(logging.INFO, logger="coregp.core.training")
        train_model(QuadraticEstimator(), zero_data, ZERO_FOLD, TrainConfig(max_epochs=1))
        assert "超参数 {}" in caplog.records[0].getMessage()

    def test_early_stopping(self, zero_data):
        cfg = TrainConfig(max_epochs=100, lr=0.1, patience_epochs=3)
        result = train_model(QuadraticEstimator(), zero_data, ZERO_FOLD, cfg)
        assert result.best_epoch == 0
        assert result.epochs == 3
        assert len(result.trace) == 3
        np.testing.assert_array_equal(result.params["w"], [0.0])
        assert result.bound == pytest.approx(-1.0)

    def test_evaluation_interval(self, zero_data):
        cfg = TrainConfig(max_epochs=7, eval_every=3, patience_epochs=100)
        result = train_model(QuadraticEstimator(), zero_data, ZERO_FOLD, cfg)
        np.testing.assert_array_equal(result.trace.epochs, [3, 6, 7])

    def test_numerical_failure_keeps_trace(self, zero_data):
        with pytest.raises(TrainingAborted) as info:
            train_model(QuadraticEstimator(fail_at=5), zero_data, ZERO_FOLD, TrainConfig(max_epochs=10))
        assert len(info.value.trace) == 2
        assert isinstance(info.value.__cause__, NotPositiveDefinite)
