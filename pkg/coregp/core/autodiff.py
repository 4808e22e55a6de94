#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
自动微分模块 - 基于记录带(Tape)的反向模式自动微分

所有运算函数同时接受 numpy 数组与 Tensor:
若输入中没有 Tensor，直接返回 numpy 结果，不做任何记录；
否则把运算记录到输入所属的记录带上。这样同一份界函数代码
既可用于普通求值，也可用于梯度计算。
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from . import linalg
from .errors import DimensionMismatch, NonFiniteLoss, UnsupportedPrimitive

logger = logging.getLogger(__name__)


class Tape:
    """运算记录带，节点按记录顺序排列即为拓扑序"""

    def __init__(self):
        self._ops = []
        self._values = []
        self._parents = []
        self._factors = {}

    def __len__(self):
        return len(self._values)

    def variable(self, value):
        """创建叶子节点"""
        return self.record("leaf", np.array(value, dtype=float), ())

    def record(self, op, value, parents):
        """
        记录一个运算节点

        参数:
        op (str): 运算名称
        value (ndarray): 前向计算结果
        parents (tuple): (父节点编号, 局部伴随函数) 序列

        返回:
        Tensor: 新节点
        """
        index = len(self._values)
        self._ops.append(op)
        self._values.append(value)
        self._parents.append(parents)
        return Tensor(value, self, index)

    def factor(self, node):
        """同一节点的Cholesky因子只计算一次"""
        if node.index not in self._factors:
            self._factors[node.index] = linalg.cholesky(node.value)
        return self._factors[node.index]

    def gradient(self, root, wrt):
        """
        从标量根节点反向传播

        参数:
        root (Tensor): 标量输出
        wrt (list): 需要梯度的节点

        返回:
        list: 与 wrt 对应的梯度数组
        """
        if root.tape is not self:
            raise ValueError("根节点不属于该记录带")
        if np.size(root.value) != 1:
            raise ValueError(f"反向传播要求标量输出，实际形状 {np.shape(root.value)}")

        adjoints = [None] * len(self._values)
        adjoints[root.index] = np.ones_like(root.value)
        for i in range(root.index, -1, -1):
            g = adjoints[i]
            if g is None:
                continue
            for parent, vjp in self._parents[i]:
                contribution = vjp(g)
                if adjoints[parent] is None:
                    adjoints[parent] = contribution
                else:
                    adjoints[parent] = adjoints[parent] + contribution

        grads = []
        for node in wrt:
            g = adjoints[node.index]
            grads.append(np.zeros_like(node.value) if g is None else np.asarray(g, dtype=float))
        return grads


class Tensor:
    """记录带上的一个节点"""

    __slots__ = ("value", "tape", "index")
    __array_priority__ = 100

    def __init__(self, value, tape, index):
        self.value = value
        self.tape = tape
        self.index = index

    def __repr__(self):
        return f"Tensor(shape={self.shape}, index={self.index})"

    @property
    def shape(self):
        return np.shape(self.value)

    @property
    def ndim(self):
        return np.ndim(self.value)

    @property
    def size(self):
        return np.size(self.value)

    @property
    def T(self):
        return transpose(self)

    def __len__(self):
        return self.shape[0]

    def item(self):
        return float(self.value)

    def sum(self, axis=None):
        return sum_(self, axis=axis)

    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __rmatmul__(self, other):
        return matmul(other, self)

    def __getitem__(self, index):
        return take(self, index)

    def __array__(self, dtype=None, copy=None):
        raise UnsupportedPrimitive("Tensor 不能隐式转换为 numpy 数组，请使用 autodiff 中的运算")

    def __array_ufunc__(self, ufunc, method, *inputs, **kwargs):
        op = _UFUNCS.get(ufunc)
        if method != "__call__" or kwargs or op is None:
            raise UnsupportedPrimitive(f"不支持的运算: {ufunc.__name__}.{method}")
        return op(*inputs)


# ---------------------------------------------------------------- 内部工具

def value_of(x):
    """取出数值（Tensor 或普通数组）"""
    return x.value if isinstance(x, Tensor) else x


def is_tensor(x):
    return isinstance(x, Tensor)


def _tape_of(operands):
    tape = None
    for x in operands:
        if isinstance(x, Tensor):
            if tape is None:
                tape = x.tape
            elif x.tape is not tape:
                raise ValueError("不同记录带上的节点不能混合运算")
    return tape


def _record(op, value, pairs):
    tape = _tape_of([x for x, _ in pairs])
    if tape is None:
        return value
    parents = tuple((x.index, vjp) for x, vjp in pairs if isinstance(x, Tensor))
    return tape.record(op, value, parents)


def _unbroadcast(g, shape):
    """把广播后的梯度按原形状求和还原"""
    g = np.asarray(g, dtype=float)
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, size in enumerate(shape):
        if size == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g.reshape(shape)


def _factor_of(A):
    if isinstance(A, Tensor):
        return A.tape.factor(A)
    return linalg.cholesky(A)


# ---------------------------------------------------------------- 逐元素运算

def add(a, b):
    va, vb = value_of(a), value_of(b)
    sa, sb = np.shape(va), np.shape(vb)
    return _record("add", np.add(va, vb), (
        (a, lambda g: _unbroadcast(g, sa)),
        (b, lambda g: _unbroadcast(g, sb)),
    ))


def sub(a, b):
    va, vb = value_of(a), value_of(b)
    sa, sb = np.shape(va), np.shape(vb)
    return _record("sub", np.subtract(va, vb), (
        (a, lambda g: _unbroadcast(g, sa)),
        (b, lambda g: -_unbroadcast(g, sb)),
    ))


def mul(a, b):
    va, vb = value_of(a), value_of(b)
    sa, sb = np.shape(va), np.shape(vb)
    return _record("mul", np.multiply(va, vb), (
        (a, lambda g: _unbroadcast(g * vb, sa)),
        (b, lambda g: _unbroadcast(g * va, sb)),
    ))


def div(a, b):
    va, vb = value_of(a), value_of(b)
    sa, sb = np.shape(va), np.shape(vb)
    out = np.divide(va, vb)
    return _record("div", out, (
        (a, lambda g: _unbroadcast(g / vb, sa)),
        (b, lambda g: _unbroadcast(-g * out / vb, sb)),
    ))


def neg(a):
    return _record("neg", np.negative(value_of(a)), ((a, lambda g: -g),))


def exp(a):
    out = np.exp(value_of(a))
    return _record("exp", out, ((a, lambda g: g * out),))


def log(a):
    va = value_of(a)
    return _record("log", np.log(va), ((a, lambda g: g / va),))


def softplus(a):
    """ln(1+eˣ)，大参数时不会溢出"""
    va = value_of(a)
    return _record("softplus", np.logaddexp(0.0, va), ((a, lambda g: g * expit(va)),))


def square(a):
    va = value_of(a)
    return _record("square", np.square(va), ((a, lambda g: 2.0 * g * va),))


# ---------------------------------------------------------------- 形状与归约

def sum_(a, axis=None):
    va = value_of(a)
    sa = np.shape(va)

    def vjp(g):
        if axis is not None:
            g = np.expand_dims(g, axis)
        return np.array(np.broadcast_to(g, sa), dtype=float)

    return _record("sum", np.sum(va, axis=axis), ((a, vjp),))


def reshape(a, shape):
    va = value_of(a)
    sa = np.shape(va)
    return _record("reshape", np.reshape(va, shape), ((a, lambda g: np.reshape(g, sa)),))


def transpose(a):
    va = value_of(a)
    return _record("transpose", np.transpose(va), ((a, lambda g: np.transpose(g)),))


def take(a, index):
    va = value_of(a)
    sa = np.shape(va)

    def vjp(g):
        out = np.zeros(sa)
        np.add.at(out, index, g)
        return out

    return _record("take", va[index], ((a, vjp),))


def diag(a):
    """向量→对角矩阵，或矩阵→对角线向量"""
    va = value_of(a)
    if np.ndim(va) not in (1, 2):
        raise DimensionMismatch(f"diag 只支持一维或二维输入，实际 {np.ndim(va)} 维")
    return _record("diag", np.diag(va), ((a, lambda g: np.diag(g)),))


def trace(a):
    va = value_of(a)
    n = np.shape(va)[0]
    return _record("trace", np.trace(va), ((a, lambda g: g * np.eye(n)),))


def matmul(a, b):
    va, vb = value_of(a), value_of(b)
    da, db = np.ndim(va), np.ndim(vb)

    def vjp_a(g):
        if da == 2 and db == 2:
            return g @ vb.T
        if da == 2:
            return np.outer(g, vb)
        if db == 2:
            return vb @ g
        return g * vb

    def vjp_b(g):
        if da == 2 and db == 2:
            return va.T @ g
        if da == 2:
            return va.T @ g
        if db == 2:
            return np.outer(va, g)
        return g * va

    return _record("matmul", np.matmul(va, vb), ((a, vjp_a), (b, vjp_b)))


# ---------------------------------------------------------------- 对称正定矩阵运算

def solve_psd(A, B):
    """
    Cholesky求解 A⁻¹B，A 对称正定

    伴随: B̄ = A⁻¹X̄，Ā = -sym(B̄ Xᵀ)
    """
    F = _factor_of(A)
    vb = value_of(B)
    X = linalg.solve_psd(F, vb)

    def vjp_b(g):
        return linalg.solve_psd(F, g)

    def vjp_a(g):
        gb = linalg.solve_psd(F, g)
        if np.ndim(X) == 1:
            outer = np.outer(gb, X)
        else:
            outer = gb @ X.T
        return -0.5 * (outer + outer.T)

    return _record("solve_psd", X, ((A, vjp_a), (B, vjp_b)))


def logdet_psd(A):
    """ln|A|，伴随为 A⁻¹"""
    F = _factor_of(A)
    return _record("logdet_psd", linalg.logdet_psd(F), (
        (A, lambda g: g * linalg.inverse_psd(F)),
    ))


_UFUNCS = {
    np.add: add,
    np.subtract: sub,
    np.multiply: mul,
    np.true_divide: div,
    np.negative: neg,
    np.exp: exp,
    np.log: log,
    np.square: square,
    np.matmul: matmul,
}


# ---------------------------------------------------------------- 参数向量

@dataclass(frozen=True)
class Segment:
    """参数向量中的一个命名段"""

    name: str
    offset: int
    shape: tuple

    @property
    def size(self):
        return int(np.prod(self.shape, dtype=int))

    @property
    def stop(self):
        return self.offset + self.size


class ParamVector:
    """扁平的无约束参数向量及其分段布局"""

    def __init__(self, values, layout):
        values = np.array(values, dtype=float).reshape(-1)
        offset = 0
        for seg in layout:
            if seg.offset != offset:
                raise ValueError(f"参数段 {seg.name} 的偏移 {seg.offset} 与预期 {offset} 不符")
            offset = seg.stop
        if offset != values.size:
            raise ValueError(f"参数段总长度 {offset} 与向量长度 {values.size} 不一致")
        if not np.all(np.isfinite(values)):
            raise ValueError("参数向量含有非有限值")
        self.values = values
        self.layout = tuple(layout)

    @classmethod
    def from_segments(cls, segments):
        """由 {段名: 数组} 按插入顺序构造"""
        layout, parts, offset = [], [], 0
        for name, array in segments.items():
            array = np.asarray(array, dtype=float)
            layout.append(Segment(name, offset, array.shape))
            parts.append(array.reshape(-1))
            offset += array.size
        values = np.concatenate(parts) if parts else np.zeros(0)
        return cls(values, layout)

    def __len__(self):
        return self.values.size

    def __contains__(self, name):
        return any(seg.name == name for seg in self.layout)

    def __getitem__(self, name):
        seg = self._segment(name)
        return self.values[seg.offset:seg.stop].reshape(seg.shape).copy()

    @property
    def names(self):
        return [seg.name for seg in self.layout]

    def _segment(self, name):
        for seg in self.layout:
            if seg.name == name:
                return seg
        raise KeyError(f"参数段不存在: {name}")

    def segment_slice(self, name):
        seg = self._segment(name)
        return slice(seg.offset, seg.stop)

    def with_values(self, values):
        return ParamVector(values, self.layout)

    def unflatten(self, source=None):
        """
        按布局拆分为 {段名: 数组或Tensor}

        参数:
        source: 扁平向量（ndarray 或叶子 Tensor），默认使用自身数值
        """
        if source is None:
            source = self.values
        view = {}
        for seg in self.layout:
            view[seg.name] = reshape(take(source, slice(seg.offset, seg.stop)), seg.shape)
        return view


# ---------------------------------------------------------------- 梯度接口

def backward_gradient(loss_fn, p):
    """
    计算标量损失及其对全部参数的梯度

    参数:
    loss_fn (callable): 以 {段名: Tensor} 为输入的标量函数
    p (ParamVector): 参数

    返回:
    tuple: (损失值, 与 p 同布局的梯度 ParamVector)
    """
    tape = Tape()
    leaf = tape.variable(p.values)
    loss = loss_fn(p.unflatten(leaf))

    if not isinstance(loss, Tensor) or loss.tape is not tape:
        value = float(np.asarray(value_of(loss)))
        if not np.isfinite(value):
            raise NonFiniteLoss(f"损失值非有限: {value}")
        return value, p.with_values(np.zeros(len(p)))

    value = float(np.asarray(loss.value).reshape(()))
    if not np.isfinite(value):
        raise NonFiniteLoss(f"损失值非有限: {value}")
    (grad,) = tape.gradient(loss, [leaf])
    if not np.all(np.isfinite(grad)):
        raise NonFiniteLoss("梯度中出现非有限值")
    return value, p.with_values(grad)


def evaluate(loss_fn, p):
    """不记录运算，直接求值"""
    value = float(np.asarray(value_of(loss_fn(p.unflatten()))).reshape(()))
    if not np.isfinite(value):
        raise NonFiniteLoss(f"损失值非有限: {value}")
    return value


def finite_diff_check(loss_fn, p, step=1e-5, segments=None):
    """
    中心差分校验自动微分梯度

    参数:
    loss_fn (callable): 损失函数
    p (ParamVector): 参数
    step (float): 相对步长，第i个坐标使用 step·(1+|pᵢ|)
    segments (list): 只校验这些参数段，默认全部

    返回:
    float: maxᵢ |g_ad - g_fd| / (1e-8 + |g_fd| + |g_ad|)
    """
    if step <= 0:
        raise ValueError(f"差分步长必须为正: {step}")
    _, grad = backward_gradient(loss_fn, p)

    if segments is None:
        indices = range(len(p))
    else:
        indices = [i for name in segments for i in range(*p.segment_slice(name).indices(len(p)))]

    worst = 0.0
    for i in indices:
        h = step * (1.0 + abs(p.values[i]))
        up = p.values.copy()
        down = p.values.copy()
        up[i] += h
        down[i] -= h
        g_fd = (evaluate(loss_fn, p.with_values(up)) - evaluate(loss_fn, p.with_values(down))) / (2.0 * h)
        g_ad = grad.values[i]
        err = abs(g_ad - g_fd) / (1e-8 + abs(g_fd) + abs(g_ad))
        worst = max(worst, err)
    logger.debug("有限差分校验: %d 个坐标，最大相对误差 %.3e", len(indices), worst)
    return worst
