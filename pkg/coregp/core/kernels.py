#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
核函数模块 - RBF协方差函数
k(a, b) = s²·exp(-‖a-b‖²/(2ℓ²))，三个超参数均经 softplus 保证为正
"""

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import autodiff as ad
from .constraints import inverse_softplus, softplus_map
from .errors import DimensionMismatch


@dataclass(frozen=True)
class KernelParams:
    """RBF核超参数与观测噪声（无约束的原始值）"""

    raw_lengthscale: Any
    raw_outputscale: Any
    raw_noise: Any

    @classmethod
    def from_constrained(cls, lengthscale=1.0, outputscale=1.0, noise=0.1):
        """由正值超参数构造"""
        return cls(
            raw_lengthscale=inverse_softplus(lengthscale),
            raw_outputscale=inverse_softplus(outputscale),
            raw_noise=inverse_softplus(noise),
        )

    @classmethod
    def from_view(cls, view):
        """由参数向量的 kernel / noise 段构造"""
        kernel = view["kernel"]
        return cls(raw_lengthscale=kernel[0], raw_outputscale=kernel[1], raw_noise=view["noise"][0])

    def to_segments(self):
        return {
            "kernel": np.array([ad.value_of(self.raw_lengthscale), ad.value_of(self.raw_outputscale)], dtype=float),
            "noise": np.array([ad.value_of(self.raw_noise)], dtype=float),
        }

    @property
    def lengthscale(self):
        return softplus_map(self.raw_lengthscale)

    @property
    def outputscale(self):
        return softplus_map(self.raw_outputscale)

    @property
    def noise(self):
        return softplus_map(self.raw_noise)

    def describe(self):
        """返回便于记录日志的正值超参数字典"""
        return {
            "lengthscale": float(ad.value_of(self.lengthscale)),
            "outputscale": float(ad.value_of(self.outputscale)),
            "noise": float(ad.value_of(self.noise)),
        }


def _shape2(A, name):
    shape = ad.value_of(A).shape if ad.is_tensor(A) else np.shape(A)
    if len(shape) != 2:
        raise DimensionMismatch(f"{name} 应为 N×D 矩阵，实际形状 {shape}")
    return shape


def rbf_matrix(A, B, kp):
    """
    计算RBF核矩阵

    参数:
    A (N×D): 输入矩阵
    B (M×D): 输入矩阵
    kp (KernelParams): 核超参数

    返回:
    N×M 核矩阵
    """
    n, d = _shape2(A, "A")
    m, d_b = _shape2(B, "B")
    if d != d_b:
        raise DimensionMismatch(f"A 与 B 的维度不一致: {d} != {d_b}")

    ell = kp.lengthscale
    diff = ad.reshape(A, (n, 1, d)) - ad.reshape(B, (1, m, d))
    sqdist = ad.sum_(diff * diff, axis=2)
    return kp.outputscale * ad.exp(sqdist * (-0.5) / (ell * ell))


def rbf_diag(A, kp):
    """核矩阵对角线，平稳核每个元素都是 s²"""
    n, _ = _shape2(A, "A")
    return kp.outputscale * np.ones(n)
