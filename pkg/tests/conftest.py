# -*- coding: utf-8 -*-

"""
测试公共夹具
"""

import numpy as np
import pytest

from coregp.core.kernels import KernelParams


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def kp():
    """条件良好的核超参数"""
    return KernelParams.from_constrained(lengthscale=0.8, outputscale=1.0, noise=0.2)


@pytest.fixture
def regression_data():
    """一维回归小样本，输入分布较分散"""
    rng = np.random.default_rng(1)
    X = np.sort(rng.uniform(-3.0, 3.0, size=(15, 1)), axis=0)
    y = np.sin(X[:, 0]) + 0.1 * rng.standard_normal(15)
    return X, y


def random_spd(n, rng, ridge=0.5):
    """随机对称正定矩阵"""
    B = rng.standard_normal((n, n))
    return B @ B.T + ridge * np.eye(n)


def random_lower(n, rng):
    """对角线为正的随机下三角矩阵"""
    return np.tril(0.3 * rng.standard_normal((n, n)), -1) + np.diag(rng.uniform(0.3, 1.0, n))


def spread_points(m, d, rng, low=-2.0, high=2.0):
    """每一维取打乱的等距网格并加小扰动，保证点间距不过小"""
    columns = [rng.permutation(np.linspace(low, high, m)) + rng.uniform(-0.15, 0.15, m) for _ in range(d)]
    return np.column_stack(columns)


def random_gradient_case(seed):
    """梯度校验用的随机小问题: N ≤ 20, D ∈ {1, 2}, 诱导点/核心集规模 ≤ 5"""
    rng = np.random.default_rng(seed)
    n = int(rng.integers(3, 21))
    d = int(rng.integers(1, 3))
    m = int(rng.integers(1, 6))
    X = rng.uniform(-2.5, 2.5, size=(n, d))
    y = np.sin(X.sum(axis=1)) + 0.2 * rng.standard_normal(n)
    kp = KernelParams.from_constrained(lengthscale=rng.uniform(0.8, 1.5), outputscale=rng.uniform(0.5, 2.0),
                                       noise=rng.uniform(0.1, 0.5))
    return rng, X, y, spread_points(m, d, rng), kp
