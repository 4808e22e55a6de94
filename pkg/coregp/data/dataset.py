#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数据集模块 - 数据集与输入标准化记录
"""

from dataclasses import dataclass

import numpy as np

from ..core.errors import DimensionMismatch


@dataclass(frozen=True)
class Normalization:
    """逐列均值与标准差，X_norm = (X_raw - mean) / std"""

    mean: np.ndarray
    std: np.ndarray

    @classmethod
    def identity(cls, dim):
        return cls(mean=np.zeros(dim), std=np.ones(dim))

    def apply(self, X_raw):
        return (np.asarray(X_raw, dtype=float) - self.mean) / self.std

    def invert(self, X):
        return np.asarray(X, dtype=float) * self.std + self.mean


@dataclass(frozen=True)
class Dataset:
    """输入矩阵 X (N×D)、目标 y (N)、名称与标准化记录"""

    X: np.ndarray
    y: np.ndarray
    name: str
    normalization: Normalization

    def __post_init__(self):
        if self.X.ndim != 2:
            raise DimensionMismatch(f"X 应为二维矩阵，实际形状 {self.X.shape}")
        if self.y.shape != (self.X.shape[0],):
            raise DimensionMismatch(f"y 的长度 {self.y.shape} 与 X 的行数 {self.X.shape[0]} 不一致")

    @property
    def size(self):
        return self.X.shape[0]

    @property
    def dim(self):
        return self.X.shape[1]

    @property
    def X_raw(self):
        return self.normalization.invert(self.X)
