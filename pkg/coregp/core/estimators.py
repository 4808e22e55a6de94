#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
估计器模块 - 把四种模型包装成统一的训练接口

每个估计器提供:
- init_params: 由训练数据构造初始参数向量（k-means 初始化位置）
- objective: 在参数视图上计算待最大化的下界
- predict: 预测均值与 y* 方差
- artifacts: 学到的核心集 / 诱导点表格
"""

import logging

import numpy as np
import pandas as pd

from . import autodiff as ad
from .autodiff import ParamVector
from .cvtgp import Coreset, cvtgp_bound_minibatch, cvtgp_predictive
from .gp_models import (InducingVariational, exact_log_marginal, exact_posterior_predictive,
                        svgp_bound, svgp_predictive, titsias_bound, titsias_predictive)
from .kernels import KernelParams
from ..data.splits import kmeans_init

logger = logging.getLogger(__name__)

MODEL_NAMES = ("exact", "titsias", "svgp", "cvtgp")


def initial_kernel(y_train):
    """ℓ = 1, s² = Var(y)（为零时取1）, σ² = 0.1·Var(y)"""
    variance = float(np.var(y_train))
    if not variance > 0:
        variance = 1.0
    return KernelParams.from_constrained(lengthscale=1.0, outputscale=variance, noise=0.1 * variance)


def _input_columns(dim):
    return [f"x{j}" for j in range(dim)]


class Estimator:
    """估计器基类"""

    name = ""
    stochastic = False
    # 这些参数段在目标函数中视为常数，梯度为零
    frozen = ()

    def __init__(self, size=None):
        self.size = size

    @property
    def label(self):
        return self.name if self.size is None else f"{self.name}-{self.size}"

    def _view(self, view):
        return {k: (ad.value_of(v) if k in self.frozen else v) for k, v in view.items()}

    def init_params(self, X, y, seed=0):
        raise NotImplementedError

    def objective(self, view, X_b, y_b, n_total):
        raise NotImplementedError

    def predict(self, params, X_train, y_train, x_star):
        raise NotImplementedError

    def artifacts(self, params):
        """返回 {名称: DataFrame}，无附加产物时为空"""
        return {}

    def _centers(self, X, seed):
        logger.debug("%s: 以 k-means 中心初始化 %d 个位置", self.label, self.size)
        return kmeans_init(X, self.size, seed=seed)


class ExactEstimator(Estimator):
    """精确GP，只优化核超参数"""

    name = "exact"

    def init_params(self, X, y, seed=0):
        return ParamVector.from_segments(initial_kernel(y).to_segments())

    def objective(self, view, X_b, y_b, n_total):
        return exact_log_marginal(X_b, y_b, KernelParams.from_view(view))

    def predict(self, params, X_train, y_train, x_star):
        posterior, var_y = exact_posterior_predictive(x_star, X_train, y_train, KernelParams.from_view(params.unflatten()))
        return posterior.mean, var_y


class TitsiasEstimator(Estimator):
    """Titsias 折叠下界，诱导点固定在 k-means 中心，只优化核超参数"""

    name = "titsias"
    frozen = ("inducing",)

    def init_params(self, X, y, seed=0):
        centers, _ = self._centers(X, seed)
        segments = initial_kernel(y).to_segments()
        segments["inducing"] = centers
        return ParamVector.from_segments(segments)

    def objective(self, view, X_b, y_b, n_total):
        view = self._view(view)
        return titsias_bound(X_b, y_b, view["inducing"], KernelParams.from_view(view))

    def predict(self, params, X_train, y_train, x_star):
        view = params.unflatten()
        return titsias_predictive(x_star, X_train, y_train, view["inducing"], KernelParams.from_view(view))

    def artifacts(self, params):
        X_M = params["inducing"]
        return {"inducing": pd.DataFrame(X_M, columns=_input_columns(X_M.shape[1]))}


class SVGPEstimator(Estimator):
    """SVGP，小批量训练核超参数、诱导点与 q(f_M)"""

    name = "svgp"
    stochastic = True

    def init_params(self, X, y, seed=0):
        centers, _ = self._centers(X, seed)
        kp = initial_kernel(y)
        segments = kp.to_segments()
        segments.update(InducingVariational.prior_matched(centers, kp).to_segments())
        return ParamVector.from_segments(segments)

    def objective(self, view, X_b, y_b, n_total):
        return svgp_bound(X_b, y_b, InducingVariational.from_view(view), KernelParams.from_view(view), n_total)

    def predict(self, params, X_train, y_train, x_star):
        view = params.unflatten()
        return svgp_predictive(x_star, InducingVariational.from_view(view), KernelParams.from_view(view))

    def artifacts(self, params):
        X_M = params["inducing"]
        frame = pd.DataFrame(X_M, columns=_input_columns(X_M.shape[1]))
        frame["m"] = params["variational_mean"]
        return {"inducing": frame}


class CVTGPEstimator(Estimator):
    """CVTGP，小批量训练核超参数与核心集三元组"""

    name = "cvtgp"
    stochastic = True

    def init_params(self, X, y, seed=0):
        centers, assignment = self._centers(X, seed)
        # 伪观测取各簇内观测的均值
        y_C = np.array([y[assignment == j].mean() if np.any(assignment == j) else float(np.mean(y))
                        for j in range(self.size)])
        segments = initial_kernel(y).to_segments()
        segments.update(Coreset.from_weights(centers, y_C, 1.0).to_segments())
        return ParamVector.from_segments(segments)

    def objective(self, view, X_b, y_b, n_total):
        return cvtgp_bound_minibatch((X_b, y_b), n_total, Coreset.from_view(view), KernelParams.from_view(view))

    def predict(self, params, X_train, y_train, x_star):
        view = params.unflatten()
        return cvtgp_predictive(x_star, Coreset.from_view(view), KernelParams.from_view(view))

    def artifacts(self, params):
        cs = Coreset.from_view(params.unflatten())
        X_C = np.asarray(cs.X_C)
        frame = pd.DataFrame(X_C, columns=_input_columns(X_C.shape[1]))
        frame["y"] = np.asarray(cs.y_C)
        frame["beta"] = np.asarray(cs.beta)
        return {"coreset": frame}


ESTIMATORS = {
    "exact": ExactEstimator,
    "titsias": TitsiasEstimator,
    "svgp": SVGPEstimator,
    "cvtgp": CVTGPEstimator,
}


def get_estimator(name, size=None):
    """
    按名称获取估计器

    参数:
    name (str): exact / titsias / svgp / cvtgp
    size (int): 诱导点数 M 或核心集大小 C，精确GP忽略

    返回:
    Estimator: 估计器实例
    """
    key = str(name).strip().lower()
    if key not in ESTIMATORS:
        raise ValueError(f"未知模型 {name!r}，可选: {', '.join(MODEL_NAMES)}")
    if key == "exact":
        return ExactEstimator()
    if size is None or int(size) < 1:
        raise ValueError(f"模型 {key} 需要正的规模参数，实际 {size}")
    return ESTIMATORS[key](int(size))
