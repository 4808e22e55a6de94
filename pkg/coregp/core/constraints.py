#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
约束变换模块 - softplus 正值映射及其反变换
"""

import numpy as np

from . import autodiff as ad
from .errors import InverseOfNonPositive


def softplus_map(raw):
    """
    softplus(x) = ln(1+eˣ)

    参数:
    raw: 无约束实数（标量、数组或 Tensor）

    返回:
    严格为正的映射值
    """
    out = ad.softplus(raw)
    if ad.is_tensor(out):
        return out
    return float(out) if np.ndim(out) == 0 else out


def inverse_softplus(value):
    """
    softplus 的反变换 x = y + ln(1 - e⁻ʸ)

    参数:
    value: 正实数或数组

    返回:
    对应的无约束实数
    """
    y = np.asarray(value, dtype=float)
    if np.any(~(y > 0)):
        raise InverseOfNonPositive(f"softplus 反变换要求输入为正，实际最小值 {np.min(y)}")
    out = y + np.log(-np.expm1(-y))
    return float(out) if out.ndim == 0 else out
