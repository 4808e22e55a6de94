#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数据划分模块 - 交叉验证划分与 k-means 初始化
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..core.errors import KTooLarge, TooFewRows

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldPlan:
    """交叉验证划分: 每折为 (训练索引, 验证索引)"""

    seed: int
    folds: tuple
    k: int

    def __iter__(self):
        return iter(self.folds)

    def __len__(self):
        return len(self.folds)


def kfold_split(n, k=5, train_frac=0.70, seed=0):
    """
    生成 k 折独立打乱的训练/验证划分

    参数:
    n (int): 样本数
    k (int): 折数
    train_frac (float): 训练集比例
    seed (int): 随机种子，相同种子得到相同划分

    返回:
    FoldPlan: 划分方案
    """
    if k < 1:
        raise ValueError(f"折数必须为正: {k}")
    if not 0.0 < train_frac < 1.0:
        raise ValueError(f"训练集比例应在 (0, 1) 内: {train_frac}")
    if n < k:
        raise TooFewRows(f"样本数 {n} 少于折数 {k}")
    n_train = int(math.floor(train_frac * n + 1e-9))
    if n_train < 1 or n_train >= n:
        raise TooFewRows(f"样本数 {n} 按比例 {train_frac} 划分后训练集或验证集为空")

    rng = np.random.default_rng(seed)
    folds = []
    for _ in range(k):
        order = rng.permutation(n)
        folds.append((np.sort(order[:n_train]), np.sort(order[n_train:])))
    return FoldPlan(seed=seed, folds=tuple(folds), k=k)


# ---------------------------------------------------------------- k-means

def kmeans_objective(X, centers, assignment):
    """各点到所属中心的平方距离之和"""
    X = np.asarray(X, dtype=float)
    diff = X - np.asarray(centers, dtype=float)[np.asarray(assignment, dtype=int)]
    return float(np.sum(diff * diff))


def kmeans_plusplus(X, k, rng):
    """
    k-means++ 初始中心

    距离全为零时在尚未选中的点中均匀选取。
    """
    n = X.shape[0]
    chosen = [int(rng.integers(n))]
    closest = cdist(X, X[chosen], "sqeuclidean").min(axis=1)
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            index = int(rng.choice(n, p=closest / total))
        else:
            remaining = np.setdiff1d(np.arange(n), chosen)
            index = int(rng.choice(remaining))
        chosen.append(index)
        closest = np.minimum(closest, cdist(X, X[[index]], "sqeuclidean")[:, 0])
    return X[chosen].copy()


def _update_centers(X, assignment, centers):
    new_centers = centers.copy()
    for j in range(centers.shape[0]):
        members = assignment == j
        if members.any():
            new_centers[j] = X[members].mean(axis=0)
        else:
            # 空簇移到离当前所属中心最远的点
            far = np.argmax(np.sum((X - new_centers[assignment]) ** 2, axis=1))
            new_centers[j] = X[far]
            assignment = assignment.copy()
            assignment[far] = j
    return new_centers


def lloyd_steps(X, centers, max_iter=100):
    """
    Lloyd 迭代，逐步产出 (中心, 分配)，分配不再变化时停止
    """
    X = np.asarray(X, dtype=float)
    centers = np.asarray(centers, dtype=float)
    assignment = None
    for _ in range(max_iter):
        new_assignment = cdist(X, centers, "sqeuclidean").argmin(axis=1)
        if assignment is not None and np.array_equal(new_assignment, assignment):
            return
        assignment = new_assignment
        centers = _update_centers(X, assignment, centers)
        yield centers, assignment


def kmeans_init(X, k, seed=0, max_iter=100):
    """
    k-means 聚类（k-means++ 播种 + Lloyd 迭代）

    参数:
    X (N×D): 输入
    k (int): 聚类数
    seed (int): 随机种子
    max_iter (int): 最大迭代次数

    返回:
    tuple: (k×D 中心, 长度 N 的分配向量)
    """
    X = np.asarray(X, dtype=float)
    if k < 1:
        raise ValueError(f"聚类数必须为正: {k}")
    if k > X.shape[0]:
        raise KTooLarge(f"聚类数 {k} 大于样本数 {X.shape[0]}")

    rng = np.random.default_rng(seed)
    centers = kmeans_plusplus(X, k, rng)
    iterations = 0
    for centers, _ in lloyd_steps(X, centers, max_iter):
        iterations += 1
    assignment = cdist(X, centers, "sqeuclidean").argmin(axis=1)
    logger.debug("k-means: k=%d, %d 次迭代, 目标值 %.6g", k, iterations, kmeans_objective(X, centers, assignment))
    return centers, assignment
