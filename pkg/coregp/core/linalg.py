#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
稠密线性代数模块 - 对称正定矩阵的Cholesky分解、求解与对数行列式
所有求逆运算都通过本模块完成
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .errors import DimensionMismatch, NonSquare, NonSymmetric, NotPositiveDefinite

logger = logging.getLogger(__name__)

# 抖动阶梯: base_jitter * {1, 10, 100, 1000}
JITTER_LADDER = (1.0, 10.0, 100.0, 1000.0)
SYMMETRY_TOL = 1e-10


@dataclass(frozen=True)
class CholFactor:
    """Cholesky因子 lower·lowerᵀ = A + jitter_used·I"""

    lower: np.ndarray
    jitter_used: float = 0.0

    @property
    def size(self):
        return self.lower.shape[0]


def as_matrix(A, name="A"):
    """转换为有限值的二维float64数组"""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2:
        raise DimensionMismatch(f"{name} 应为二维矩阵，实际维度为 {A.ndim}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} 含有非有限值")
    return A


def symmetrize(A):
    """检查对称性并返回 (A + Aᵀ)/2"""
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise NonSquare(f"矩阵不是方阵: {A.shape}")
    scale = max(np.max(np.abs(A)), 1.0) if A.size else 1.0
    asym = np.max(np.abs(A - A.T)) if A.size else 0.0
    if asym > SYMMETRY_TOL * scale:
        raise NonSymmetric(f"矩阵不对称，最大偏差 {asym:.3e}")
    return 0.5 * (A + A.T)


def cholesky(A, base_jitter=None):
    """
    带抖动阶梯的Cholesky分解

    参数:
    A (ndarray): 对称正定矩阵
    base_jitter (float): 基础抖动，默认 1e-8·mean(diag(A))

    返回:
    CholFactor: 下三角因子及实际使用的抖动
    """
    A = symmetrize(A)
    n = A.shape[0]
    if base_jitter is None:
        base_jitter = 1e-8 * float(np.mean(np.diag(A))) if n else 0.0
        base_jitter = max(base_jitter, 0.0)

    # 先尝试不加抖动，条件良好的矩阵 jitter_used 为 0
    for jitter in (0.0,) + tuple(base_jitter * step for step in JITTER_LADDER):
        try:
            lower = sla.cholesky(A + jitter * np.eye(n), lower=True, check_finite=False)
        except np.linalg.LinAlgError:
            continue
        if np.all(np.diag(lower) > 0):
            if jitter > 0:
                logger.debug("Cholesky分解使用抖动 %.3e (n=%d)", jitter, n)
            return CholFactor(lower=lower, jitter_used=jitter)

    raise NotPositiveDefinite(
        f"矩阵在最大抖动 {base_jitter * JITTER_LADDER[-1]:.3e} 下仍非正定 (n={n})"
    )


def solve_psd(F, B):
    """
    利用Cholesky因子求解 (L·Lᵀ)·X = B

    参数:
    F (CholFactor): Cholesky因子
    B (ndarray): 右端项，向量或矩阵

    返回:
    ndarray: 与B同形的解
    """
    B = np.asarray(B, dtype=float)
    if B.shape[0] != F.size:
        raise DimensionMismatch(f"因子阶数 {F.size} 与右端项行数 {B.shape[0]} 不一致")
    return sla.cho_solve((F.lower, True), B, check_finite=False)


def logdet_psd(F):
    """返回 ln|L·Lᵀ| = 2·Σ ln(Lᵢᵢ)"""
    return 2.0 * float(np.sum(np.log(np.diag(F.lower))))


def inverse_psd(F):
    """由因子构造完整逆矩阵（仅在梯度计算中使用）"""
    return solve_psd(F, np.eye(F.size))
