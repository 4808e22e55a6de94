#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
合成数据模块 - 五个合成回归数据集的生成过程

噪声记号 N(ε | 0, a) 中的第二个参数按方差理解，
例如 N(0, 3×10⁻¹) 的标准差为 √0.3。
"""

import logging

import numpy as np

from ..core.errors import InvalidId
from .dataset import Dataset, Normalization

logger = logging.getLogger(__name__)

DEFAULT_SIZE = 1000
SYNTHETIC_IDS = (1, 2, 3, 4, 5)

# 各数据集的噪声方差
NOISE_VARIANCE = {1: 0.3, 2: 0.3, 3: 1.0, 4: 0.2, 5: 0.2}


def make_blobs(n, centers=3, std=0.4, seed=0, center_box=(-10.0, 10.0), return_labels=False):
    """
    生成各向同性高斯团簇输入

    参数:
    n (int): 样本数
    centers (int): 团簇数
    std (float): 团簇内标准差
    seed (int): 随机种子
    center_box (tuple): 中心均匀分布的取值范围
    return_labels (bool): 是否同时返回团簇标签

    返回:
    ndarray: n×2 输入矩阵（以及标签向量）
    """
    if n < 1:
        raise ValueError(f"样本数必须为正，实际 {n}")
    rng = np.random.default_rng(seed)
    locations = rng.uniform(center_box[0], center_box[1], size=(centers, 2))

    # 均衡分配，余数依次分给前面的团簇；n 少于团簇数时后面的团簇为空
    counts = np.full(centers, n // centers)
    counts[: n % centers] += 1
    labels = np.repeat(np.arange(centers), counts)
    X = locations[labels] + std * rng.standard_normal((n, 2))

    order = rng.permutation(n)
    X, labels = X[order], labels[order]
    if return_labels:
        return X, labels
    return X


def make_moons(n, noise=0.05, seed=0):
    """
    生成两个交错半圆

    上半圆 (cos t, sin t)，下半圆 (1 - cos t, 0.5 - sin t)，t 在 [0, π] 上等距，
    再叠加标准差为 noise 的各向同性高斯噪声。

    参数:
    n (int): 样本数
    noise (float): 噪声标准差
    seed (int): 随机种子

    返回:
    ndarray: n×2 输入矩阵
    """
    if n < 1:
        raise ValueError(f"样本数必须为正，实际 {n}")
    rng = np.random.default_rng(seed)
    n_outer = n // 2
    n_inner = n - n_outer
    t_outer = np.linspace(0.0, np.pi, n_outer)
    t_inner = np.linspace(0.0, np.pi, n_inner)
    outer = np.column_stack([np.cos(t_outer), np.sin(t_outer)])
    inner = np.column_stack([1.0 - np.cos(t_inner), 0.5 - np.sin(t_inner)])
    X = np.vstack([outer, inner])
    X = X[rng.permutation(n)]
    if noise > 0:
        X = X + noise * rng.standard_normal(X.shape)
    return X


def _check_id(dataset_id):
    if dataset_id not in SYNTHETIC_IDS:
        raise InvalidId(f"合成数据集编号应为 1~5，实际为 {dataset_id}")


def synthetic_latent(dataset_id, X):
    """
    无噪声潜函数 f(x)

    参数:
    dataset_id (int): 数据集编号 1~5
    X (ndarray): N×D 输入

    返回:
    ndarray: 长度为 N 的函数值
    """
    _check_id(dataset_id)
    X = np.asarray(X, dtype=float)
    if dataset_id == 1:
        x = X[:, 0]
        return 0.4 * (np.sin(3 * x) * np.cos(2 * x) + np.sin(x / 2) + np.cos(2 * x) + np.exp(-x ** 2) + np.abs(x))
    if dataset_id == 2:
        x = X[:, 0]
        return np.sin(x ** 2) + np.cos(x ** 2) + np.sin(3 * x) + np.cos(5 * x) + np.sqrt(np.abs(x)) / 2
    if dataset_id == 3:
        return np.cos(2 * np.pi * X[:, 0])

    x1, x2 = X[:, 0], X[:, 1]
    if dataset_id == 4:
        f1 = 4 * np.sin(x1) + 2 * np.sin(2 * x1)
        f2 = 3 * np.cos(3 * x2) + 4 * np.sin(5 * x2)
        return f1 + f2 + np.exp(-(x1 + x2) ** 2)
    f1 = x1 / 2 + np.sin(2 * x1)
    f2 = x2 / 2 + np.cos(5 * x2)
    return f1 + f2 + np.exp(-(x1 + x2) ** 2) / 2


def synthetic_targets(dataset_id, X, rng):
    """
    按各数据集的观测模型生成带噪目标

    参数:
    dataset_id (int): 数据集编号
    X (ndarray): 输入
    rng (Generator): 随机数发生器

    返回:
    ndarray: 观测 y
    """
    f = synthetic_latent(dataset_id, X)
    eps = np.sqrt(NOISE_VARIANCE[dataset_id]) * rng.standard_normal(f.shape[0])
    if dataset_id in (1, 2):
        return f + eps * np.sin(2 * np.pi * f)
    if dataset_id == 3:
        return f + eps * np.asarray(X, dtype=float)[:, 0] ** 3
    return f + eps


def _sample_inputs(dataset_id, n, rng):
    if dataset_id in (1, 2):
        return rng.uniform(-4.0, 4.0, size=(n, 1))
    if dataset_id == 3:
        return rng.uniform(0.0, 2.0, size=(n, 1))
    seed = int(rng.integers(0, 2 ** 31 - 1))
    if dataset_id == 4:
        return make_blobs(n, centers=3, std=0.4, seed=seed)
    return make_moons(n, noise=0.05, seed=seed)


def gen_synthetic(dataset_id, n=DEFAULT_SIZE, seed=0):
    """
    生成合成数据集

    参数:
    dataset_id (int): 数据集编号 1~5
    n (int): 样本数
    seed (int): 随机种子

    返回:
    Dataset: 输入保持原始尺度（标准化记录为恒等变换）
    """
    _check_id(dataset_id)
    if n < 1:
        raise ValueError(f"样本数必须为正，实际 {n}")
    rng = np.random.default_rng(seed)
    X = _sample_inputs(dataset_id, n, rng)
    y = synthetic_targets(dataset_id, X, rng)
    logger.debug("生成合成数据集 %d: n=%d, seed=%d", dataset_id, n, seed)
    return Dataset(X=X, y=y, name=f"synthetic-{dataset_id}", normalization=Normalization.identity(X.shape[1]))
