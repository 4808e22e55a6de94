#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
核心集变分回火后验模块 (CVTGP)

核心集三元组 {X_C, y_C, β_C} 定义加权似然 Π_c N(y_c | f_c, σ²)^{β_c}，
由此得到回火后验 q(f_C) 以及任意输入处的条件后验 q(f)。
下界、后验与预测只对 (K_CC + Σ_β) 做分解，从不单独求 K_CC 的逆。
"""

from dataclasses import dataclass
from typing import Any

import numpy as np

from . import autodiff as ad
from .constraints import inverse_softplus, softplus_map
from .errors import DimensionMismatch
from .gp_models import (GaussianPosterior, _check_xy, _output,
                        diagonal_gaussian_logpdf, gaussian_logpdf)
from .kernels import rbf_diag, rbf_matrix


@dataclass(frozen=True)
class Coreset:
    """核心集: 伪输入 X_C、伪观测 y_C、权重原始值 raw_beta (β = softplus(raw_beta))"""

    X_C: Any
    y_C: Any
    raw_beta: Any

    def __post_init__(self):
        shape_x = np.shape(ad.value_of(self.X_C))
        size = shape_x[0] if len(shape_x) == 2 else 0
        if size < 1:
            raise DimensionMismatch(f"核心集至少需要一个点，X_C 形状 {shape_x}")
        if np.shape(ad.value_of(self.y_C)) != (size,) or np.shape(ad.value_of(self.raw_beta)) != (size,):
            raise DimensionMismatch("X_C、y_C 与 raw_beta 的长度不一致")

    @classmethod
    def from_weights(cls, X_C, y_C, beta):
        """由正权重 β 构造"""
        X_C = np.asarray(X_C, dtype=float)
        beta = np.broadcast_to(np.asarray(beta, dtype=float), (X_C.shape[0],))
        return cls(X_C=X_C, y_C=np.asarray(y_C, dtype=float), raw_beta=np.asarray(inverse_softplus(beta)).reshape(-1))

    @classmethod
    def from_view(cls, view):
        return cls(X_C=view["coreset_inputs"], y_C=view["coreset_outputs"], raw_beta=view["coreset_weights"])

    def to_segments(self):
        return {
            "coreset_inputs": np.asarray(ad.value_of(self.X_C), dtype=float),
            "coreset_outputs": np.asarray(ad.value_of(self.y_C), dtype=float),
            "coreset_weights": np.asarray(ad.value_of(self.raw_beta), dtype=float),
        }

    @property
    def size(self):
        return np.shape(ad.value_of(self.X_C))[0]

    @property
    def beta(self):
        return softplus_map(self.raw_beta)


@dataclass(frozen=True)
class TemperedStats:
    """加权似然的充分统计量: Σ_β = σ²·diag(β⁻¹) 与 ln Q_C"""

    sigma_diag: Any
    log_Q_C: Any

    @property
    def Sigma_beta(self):
        return ad.diag(self.sigma_diag)


def weighted_likelihood_stats(cs, kp):
    """
    加权似然 Π_c N(y_c|f_c,σ²)^{β_c} = Q_C·N(y_C | f_C, Σ_β)

    ln Q_C = Σ_c [½ln(2πσ²/β_c) - (β_c/2)·ln(2πσ²)]，始终在对数空间计算
    """
    beta = cs.beta
    noise = kp.noise
    sigma_diag = noise / beta
    log_2pi_noise = ad.log(noise * (2.0 * np.pi))
    log_Q = ad.sum_(0.5 * ad.log(sigma_diag * (2.0 * np.pi)) - 0.5 * beta * log_2pi_noise)
    return TemperedStats(sigma_diag=_output(sigma_diag), log_Q_C=_output(log_Q))


def _tempered_system(cs, kp):
    """返回 (K_CC, K_CC + Σ_β, 回火统计量)"""
    stats = weighted_likelihood_stats(cs, kp)
    K_cc = rbf_matrix(cs.X_C, cs.X_C, kp)
    return K_cc, K_cc + ad.diag(stats.sigma_diag), stats


def coreset_marginal_loglik(cs, kp):
    """ln q(y_C | X_C, β) = ln Q_C + ln N(y_C | 0, K_CC + Σ_β)"""
    _, A, stats = _tempered_system(cs, kp)
    return _output(stats.log_Q_C + gaussian_logpdf(cs.y_C, 0.0, A))


def coreset_posterior(cs, kp):
    """
    核心集回火后验 q(f_C) 的 Woodbury 形式

    返回:
    GaussianPosterior: 均值 K(K+Σ)⁻¹y_C，协方差 K - K(K+Σ)⁻¹K
    """
    K_cc, A, _ = _tempered_system(cs, kp)
    mean = K_cc @ ad.solve_psd(A, cs.y_C)
    cov = K_cc - K_cc @ ad.solve_psd(A, K_cc)
    return GaussianPosterior(mean=_output(mean), cov=_output(cov))


def coreset_conditional_posterior(X_eval, cs, kp):
    """
    任意输入处的条件后验 q(f(X_eval))

    均值 K_XC(K_CC+Σ_β)⁻¹y_C，协方差 K_XX - K_XC(K_CC+Σ_β)⁻¹K_CX
    """
    if np.shape(ad.value_of(X_eval))[1] != np.shape(ad.value_of(cs.X_C))[1]:
        raise DimensionMismatch("评估点维度与核心集不一致")
    _, A, _ = _tempered_system(cs, kp)
    K_xc = rbf_matrix(X_eval, cs.X_C, kp)
    mean = K_xc @ ad.solve_psd(A, cs.y_C)
    cov = rbf_matrix(X_eval, X_eval, kp) - K_xc @ ad.solve_psd(A, ad.transpose(K_xc))
    return GaussianPosterior(mean=_output(mean), cov=_output(cov))


def _kl_terms(K_cc, A, stats, y_C):
    alpha = ad.solve_psd(A, y_C)
    trace = ad.trace(ad.solve_psd(A, K_cc))
    quad = alpha @ (K_cc @ alpha)
    logdet_sigma = ad.sum_(ad.log(stats.sigma_diag))
    return 0.5 * (quad - trace + ad.logdet_psd(A) - logdet_sigma)


def cvtgp_kl(cs, kp):
    """
    KL(q(f_C) ‖ p(f_C))
    = ½[-tr{(K+Σ)⁻¹K} + y_Cᵀ(K+Σ)⁻¹K(K+Σ)⁻¹y_C + ln|K+Σ| - ln|Σ|]
    """
    K_cc, A, stats = _tempered_system(cs, kp)
    return _output(_kl_terms(K_cc, A, stats, cs.y_C))


def _data_term(X, y, cs, kp, A):
    """Σ_i [ln N(y_i | m_i, σ²) - k_i/(2σ²)]，m_i 与 k_i 为逐点条件后验矩"""
    noise = kp.noise
    K_cx = rbf_matrix(cs.X_C, X, kp)
    mean = ad.transpose(K_cx) @ ad.solve_psd(A, cs.y_C)
    var = rbf_diag(X, kp) - ad.sum_(K_cx * ad.solve_psd(A, K_cx), axis=0)
    n = np.shape(ad.value_of(y))[0]
    r = y - mean
    return ad.sum_(r * r) / (-2.0 * noise) - 0.5 * n * ad.log(noise * (2.0 * np.pi)) - ad.sum_(var) / (2.0 * noise)


def expected_log_likelihood(X_b, y_b, cs, kp):
    """CVTGP 下界的数据项 E_q[ln p(y_b | f)]（未缩放）"""
    _check_xy(X_b, y_b)
    _, A, _ = _tempered_system(cs, kp)
    return _output(_data_term(X_b, y_b, cs, kp, A))


def cvtgp_bound_full(X, y, cs, kp):
    """
    CVTGP 全批量下界

    参数:
    X (N×D): 全部训练输入
    y (N): 全部训练观测
    cs (Coreset): 核心集
    kp (KernelParams): 核超参数

    返回:
    float 或 Tensor: ln N(y|m,σ²I) - tr{K_f|y_C}/(2σ²) - KL
    """
    _check_xy(X, y)
    K_cc, A, stats = _tempered_system(cs, kp)
    return _output(_data_term(X, y, cs, kp, A) - _kl_terms(K_cc, A, stats, cs.y_C))


def cvtgp_bound_minibatch(batch, N_total, cs, kp):
    """
    CVTGP 小批量无偏下界 (N/B)·Σ_batch 逐点项 - KL

    参数:
    batch (tuple): (X_b, y_b)
    N_total (int): 训练集总大小
    """
    X_b, y_b = batch
    size = _check_xy(X_b, y_b)
    if not 1 <= size <= N_total:
        raise DimensionMismatch(f"批大小 {size} 应在 1 与 N_total={N_total} 之间")
    K_cc, A, stats = _tempered_system(cs, kp)
    data = _data_term(X_b, y_b, cs, kp, A) * (float(N_total) / size)
    return _output(data - _kl_terms(K_cc, A, stats, cs.y_C))


def cvtgp_bound_alt(X, y, cs, kp):
    """
    另一种推导的下界形式
    E_q[ln p(y|f)] - E_q(f_C)[ln q(y_C|f_C,β)] + ln q(y_C|X_C,β)

    两处 ln Q_C 显式保留并相互抵消，数值上应与 cvtgp_bound_full 相同。
    """
    _check_xy(X, y)
    K_cc, A, stats = _tempered_system(cs, kp)

    # q(f_C) 的 Woodbury 矩
    mean_c = K_cc @ ad.solve_psd(A, cs.y_C)
    cov_c = K_cc - K_cc @ ad.solve_psd(A, K_cc)

    # E_q(f_C)[ln Q_C + ln N(y_C | f_C, Σ_β)]
    expected_pseudo = (
        stats.log_Q_C
        + diagonal_gaussian_logpdf(cs.y_C, mean_c, stats.sigma_diag)
        - 0.5 * ad.sum_(ad.diag(cov_c) / stats.sigma_diag)
    )
    marginal = stats.log_Q_C + gaussian_logpdf(cs.y_C, 0.0, A)
    return _output(_data_term(X, y, cs, kp, A) - expected_pseudo + marginal)


def cvtgp_predictive(x_star, cs, kp):
    """
    核心集预测分布

    返回:
    tuple: (均值 k_*C(K+Σ)⁻¹y_C, 方差 k_** - k_*C(K+Σ)⁻¹k_C* + σ²)
    """
    if np.shape(ad.value_of(x_star))[1] != np.shape(ad.value_of(cs.X_C))[1]:
        raise DimensionMismatch("预测点维度与核心集不一致")
    _, A, _ = _tempered_system(cs, kp)
    K_cs = rbf_matrix(cs.X_C, x_star, kp)
    mean = ad.transpose(K_cs) @ ad.solve_psd(A, cs.y_C)
    var_y = rbf_diag(x_star, kp) - ad.sum_(K_cs * ad.solve_psd(A, K_cs), axis=0) + kp.noise
    return _output(mean), _output(var_y)


__all__ = [
    "Coreset", "TemperedStats",
    "weighted_likelihood_stats", "coreset_marginal_loglik", "coreset_posterior",
    "coreset_conditional_posterior", "cvtgp_kl", "expected_log_likelihood",
    "cvtgp_bound_full", "cvtgp_bound_minibatch", "cvtgp_bound_alt", "cvtgp_predictive",
]
