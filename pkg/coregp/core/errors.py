#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
异常定义模块 - 计算、数据与实验流程中使用的全部异常类型
"""

import numpy as np


class CoreGPError(Exception):
    """所有异常的基类"""


# ---------------------------------------------------------------- 线性代数

class NotPositiveDefinite(CoreGPError, np.linalg.LinAlgError):
    """最大抖动下Cholesky分解仍然失败"""


class NonSquare(CoreGPError, ValueError):
    """矩阵不是方阵"""


class NonSymmetric(CoreGPError, ValueError):
    """矩阵不满足对称性容差"""


class DimensionMismatch(CoreGPError, ValueError):
    """输入维度不一致"""


# ---------------------------------------------------------------- 自动微分与训练

class UnsupportedPrimitive(CoreGPError, TypeError):
    """计算图中出现了不支持的运算"""


class NonFiniteLoss(CoreGPError, FloatingPointError):
    """损失或其梯度出现NaN/Inf"""


class NonFiniteGradient(CoreGPError, FloatingPointError):
    """Adam更新时梯度出现NaN/Inf"""


class InverseOfNonPositive(CoreGPError, ValueError):
    """softplus反变换的输入不是正数"""


class LengthMismatch(CoreGPError, ValueError):
    """两个向量长度不一致"""


class TrainingAborted(CoreGPError):
    """训练因数值错误中止，保留已记录的训练轨迹"""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


# ---------------------------------------------------------------- 数据

class InvalidId(CoreGPError, ValueError):
    """合成数据集编号不存在"""


class ParseError(CoreGPError, ValueError):
    """CSV文件无法解析"""

    def __init__(self, message, row=None, column=None):
        super().__init__(message)
        self.row = row
        self.column = column


class MissingColumn(CoreGPError, KeyError):
    """目标列不存在"""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NonNumericCell(ParseError):
    """单元格不是数值"""


class ConstantColumn(CoreGPError, ValueError):
    """输入列为常数，无法标准化"""


class TooFewRows(CoreGPError, ValueError):
    """数据行数不足"""


class KTooLarge(CoreGPError, ValueError):
    """聚类数大于样本数"""


# ---------------------------------------------------------------- 输出

class ResultsIoError(CoreGPError, OSError):
    """结果文件写入或读取失败"""
