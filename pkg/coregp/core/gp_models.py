#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
高斯过程模型模块 - 精确GP推断与两种稀疏变分基线
包括：精确对数边缘似然、后验预测、Titsias折叠下界、SVGP随机下界
"""

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import autodiff as ad
from .constraints import inverse_softplus
from .errors import DimensionMismatch
from .kernels import rbf_diag, rbf_matrix
from .linalg import cholesky

LOG_2PI = float(np.log(2.0 * np.pi))


@dataclass(frozen=True)
class GaussianPosterior:
    """多元正态分布的均值与协方差"""

    mean: Any
    cov: Any

    @property
    def variance(self):
        return ad.diag(self.cov)


@dataclass(frozen=True)
class InducingVariational:
    """
    SVGP 的变分参数 q(f_M) = N(m, S)，S = L_S·L_Sᵀ

    raw_cov_factor 的严格下三角部分直接作为 L_S 的下三角，
    对角线经 softplus 变为正数，上三角部分不参与计算。
    """

    X_M: Any
    m: Any
    raw_cov_factor: Any

    @classmethod
    def from_cov_factor(cls, X_M, m, L_S):
        L_S = np.asarray(L_S, dtype=float)
        raw = np.tril(L_S, -1) + np.diag(inverse_softplus(np.diag(L_S)))
        return cls(X_M=np.asarray(X_M, dtype=float), m=np.asarray(m, dtype=float), raw_cov_factor=raw)

    @classmethod
    def prior_matched(cls, X_M, kp):
        """m = 0, S = K_MM，此时 q(f_M) 与先验相同"""
        X_M = np.asarray(X_M, dtype=float)
        factor = cholesky(rbf_matrix(X_M, X_M, kp))
        return cls.from_cov_factor(X_M, np.zeros(X_M.shape[0]), factor.lower)

    @classmethod
    def from_view(cls, view):
        return cls(X_M=view["inducing"], m=view["variational_mean"], raw_cov_factor=view["variational_cov_factor"])

    def to_segments(self):
        return {
            "inducing": np.asarray(ad.value_of(self.X_M), dtype=float),
            "variational_mean": np.asarray(ad.value_of(self.m), dtype=float),
            "variational_cov_factor": np.asarray(ad.value_of(self.raw_cov_factor), dtype=float),
        }

    @property
    def cov_factor(self):
        raw = self.raw_cov_factor
        size = np.shape(ad.value_of(raw))[0]
        strict_lower = np.tril(np.ones((size, size)), -1)
        return raw * strict_lower + ad.diag(ad.softplus(ad.diag(raw)))


# ---------------------------------------------------------------- 工具函数

def _output(x):
    """Tensor 原样返回，标量转为 float"""
    if ad.is_tensor(x):
        return x
    x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def _check_xy(X, y):
    shape_x = np.shape(ad.value_of(X))
    shape_y = np.shape(ad.value_of(y))
    if len(shape_x) != 2:
        raise DimensionMismatch(f"输入应为 N×D 矩阵，实际形状 {shape_x}")
    if len(shape_y) != 1 or shape_y[0] != shape_x[0]:
        raise DimensionMismatch(f"目标长度 {shape_y} 与输入行数 {shape_x[0]} 不一致")
    if shape_x[0] < 1:
        raise DimensionMismatch("至少需要一个数据点")
    return shape_x[0]


def gaussian_logpdf(y, mean, cov):
    """log N(y | mean, cov)，cov 对称正定"""
    r = y - mean
    n = np.shape(ad.value_of(r))[0]
    quad = r @ ad.solve_psd(cov, r)
    return -0.5 * n * LOG_2PI - 0.5 * ad.logdet_psd(cov) - 0.5 * quad


def diagonal_gaussian_logpdf(y, mean, variances):
    """对角协方差的 log N(y | mean, diag(variances))"""
    r = y - mean
    return ad.sum_(ad.log(variances * (2.0 * np.pi)) * (-0.5) - r * r / (2.0 * variances))


# ---------------------------------------------------------------- 精确GP

def exact_log_marginal(X, y, kp):
    """
    精确对数边缘似然 log N(y | 0, σ²I + K_XX)

    参数:
    X (N×D): 输入
    y (N): 观测
    kp (KernelParams): 核超参数

    返回:
    float 或 Tensor: 对数边缘似然
    """
    n = _check_xy(X, y)
    K = rbf_matrix(X, X, kp) + kp.noise * np.eye(n)
    return _output(gaussian_logpdf(y, 0.0, K))


def exact_posterior_predictive(x_star, X, y, kp):
    """
    精确后验预测

    返回:
    tuple: (f* 的 GaussianPosterior, y* 的预测方差向量)
    """
    n = _check_xy(X, y)
    if np.shape(ad.value_of(x_star))[1] != np.shape(ad.value_of(X))[1]:
        raise DimensionMismatch("预测点维度与训练输入不一致")
    A = rbf_matrix(X, X, kp) + kp.noise * np.eye(n)
    K_sx = rbf_matrix(x_star, X, kp)
    mean = K_sx @ ad.solve_psd(A, y)
    cov = rbf_matrix(x_star, x_star, kp) - K_sx @ ad.solve_psd(A, ad.transpose(K_sx))
    var_y = ad.diag(cov) + kp.noise
    return GaussianPosterior(mean=_output(mean), cov=_output(cov)), _output(var_y)


# ---------------------------------------------------------------- Titsias 折叠下界

def titsias_bound(X, y, X_M, kp):
    """
    Titsias 折叠变分下界
    log N(y | 0, σ²I + Q) - tr{K_XX - Q}/(2σ²)，Q = K_XM K_MM⁻¹ K_MX

    通过矩阵行列式引理与Woodbury恒等式以 O(NM²) 计算。
    """
    n = _check_xy(X, y)
    noise = kp.noise
    K_mm = rbf_matrix(X_M, X_M, kp)
    K_mx = rbf_matrix(X_M, X, kp)
    A = K_mm + (K_mx @ ad.transpose(K_mx)) / noise
    c = K_mx @ y

    quad = ad.sum_(y * y) / noise - (c @ ad.solve_psd(A, c)) / (noise * noise)
    logdet = ad.logdet_psd(A) - ad.logdet_psd(K_mm) + n * ad.log(noise)
    log_marginal = -0.5 * n * LOG_2PI - 0.5 * logdet - 0.5 * quad

    trace_k = ad.sum_(rbf_diag(X, kp))
    trace_q = ad.sum_(K_mx * ad.solve_psd(K_mm, K_mx))
    return _output(log_marginal - (trace_k - trace_q) / (2.0 * noise))


def titsias_predictive(x_star, X, y, X_M, kp):
    """
    折叠下界最优 q(f_M) 下的预测均值与 y* 方差
    """
    _check_xy(X, y)
    noise = kp.noise
    K_mm = rbf_matrix(X_M, X_M, kp)
    K_mx = rbf_matrix(X_M, X, kp)
    K_ms = rbf_matrix(X_M, x_star, kp)
    A = K_mm + (K_mx @ ad.transpose(K_mx)) / noise

    mean = ad.transpose(K_ms) @ ad.solve_psd(A, K_mx @ y) / noise
    q_ss = ad.sum_(K_ms * ad.solve_psd(K_mm, K_ms), axis=0)
    extra = ad.sum_(K_ms * ad.solve_psd(A, K_ms), axis=0)
    var_y = rbf_diag(x_star, kp) - q_ss + extra + noise
    return _output(mean), _output(var_y)


# ---------------------------------------------------------------- SVGP

def gaussian_kl_full(m, L_S, K_MM):
    """
    KL(N(m, L_S·L_Sᵀ) ‖ N(0, K_MM))
    = ½(tr{K⁻¹S} - M + mᵀK⁻¹m + ln|K| - ln|S|)
    """
    size = np.shape(ad.value_of(m))[0]
    if np.shape(ad.value_of(L_S)) != (size, size) or np.shape(ad.value_of(K_MM)) != (size, size):
        raise DimensionMismatch("KL 计算的均值、协方差因子与先验协方差维度不一致")
    trace = ad.sum_(L_S * ad.solve_psd(K_MM, L_S))
    maha = m @ ad.solve_psd(K_MM, m)
    logdet_s = 2.0 * ad.sum_(ad.log(ad.diag(L_S)))
    return _output(0.5 * (trace - size + maha + ad.logdet_psd(K_MM) - logdet_s))


def svgp_bound(X_b, y_b, iv, kp, N_total):
    """
    SVGP 随机变分下界

    参数:
    X_b (B×D): 小批量输入
    y_b (B): 小批量观测
    iv (InducingVariational): 变分参数
    kp (KernelParams): 核超参数
    N_total (int): 训练集总大小

    返回:
    float 或 Tensor: (N/B)·Σ逐点项 - KL(q(f_M)‖p(f_M))，KL 不做缩放
    """
    batch = _check_xy(X_b, y_b)
    if N_total < batch:
        raise DimensionMismatch(f"N_total={N_total} 小于批大小 {batch}")
    noise = kp.noise
    K_mm = rbf_matrix(iv.X_M, iv.X_M, kp)
    K_mb = rbf_matrix(iv.X_M, X_b, kp)
    A = ad.solve_psd(K_mm, K_mb)
    L_S = iv.cov_factor

    mean = ad.transpose(A) @ iv.m
    q_diag = ad.sum_(K_mb * A, axis=0)
    LA = ad.transpose(L_S) @ A
    s_diag = ad.sum_(LA * LA, axis=0)

    r = y_b - mean
    per_point = (
        ad.log(noise * (2.0 * np.pi)) * (-0.5)
        - r * r / (2.0 * noise)
        - (rbf_diag(X_b, kp) - q_diag) / (2.0 * noise)
        - s_diag / (2.0 * noise)
    )
    data = ad.sum_(per_point) * (float(N_total) / batch)
    return _output(data - gaussian_kl_full(iv.m, L_S, K_mm))


def svgp_predictive(x_star, iv, kp):
    """SVGP 预测均值与 y* 方差"""
    K_mm = rbf_matrix(iv.X_M, iv.X_M, kp)
    K_ms = rbf_matrix(iv.X_M, x_star, kp)
    A = ad.solve_psd(K_mm, K_ms)
    LA = ad.transpose(iv.cov_factor) @ A
    mean = ad.transpose(A) @ iv.m
    var_y = rbf_diag(x_star, kp) - ad.sum_(K_ms * A, axis=0) + ad.sum_(LA * LA, axis=0) + kp.noise
    return _output(mean), _output(var_y)
