#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
训练模块 - Adam优化器、训练配置、训练轨迹与早停训练循环
"""

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from .autodiff import ParamVector, backward_gradient, evaluate
from .errors import (CoreGPError, DimensionMismatch, LengthMismatch, NonFiniteGradient,
                     TrainingAborted)
from .kernels import KernelParams

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["epoch", "bound", "val_rmse", "seconds"]


# ---------------------------------------------------------------- Adam

@dataclass(frozen=True)
class AdamState:
    """Adam 的步数与一阶、二阶矩估计"""

    step: int
    m: np.ndarray
    v: np.ndarray
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def fresh(cls, size, lr=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        return cls(step=0, m=np.zeros(size), v=np.zeros(size), lr=lr, beta1=beta1, beta2=beta2, eps=eps)


def adam_step(state, params, grad):
    """
    带偏差修正的 Adam 上升一步（最大化下界）

    参数:
    state (AdamState): 优化器状态
    params (ParamVector): 当前参数
    grad (ParamVector 或 ndarray): 下界对参数的梯度

    返回:
    tuple: (新状态, 新参数)
    """
    g = np.asarray(grad.values if isinstance(grad, ParamVector) else grad, dtype=float).reshape(-1)
    if g.shape != state.m.shape or g.size != len(params):
        raise DimensionMismatch(f"梯度长度 {g.size} 与参数长度 {len(params)} 不一致")
    if not np.all(np.isfinite(g)):
        raise NonFiniteGradient(f"第 {state.step + 1} 步梯度含有非有限值")

    step = state.step + 1
    m = state.beta1 * state.m + (1.0 - state.beta1) * g
    v = state.beta2 * state.v + (1.0 - state.beta2) * (g * g)
    m_hat = m / (1.0 - state.beta1 ** step)
    v_hat = v / (1.0 - state.beta2 ** step)
    values = params.values + state.lr * m_hat / (np.sqrt(v_hat) + state.eps)
    return replace(state, step=step, m=m, v=v), params.with_values(values)


# ---------------------------------------------------------------- 配置与轨迹

class TrainConfig(BaseModel):
    """训练配置"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    batch_size: int = Field(default=512, ge=1)
    max_epochs: int = Field(default=5000, ge=0)
    patience_epochs: int = Field(default=500, ge=1)
    lr: float = Field(default=1e-3, gt=0)
    seed: int = 0
    eval_every: int = Field(default=1, ge=1)


@dataclass(frozen=True)
class TraceRecord:
    epoch: int
    bound: float
    val_rmse: float
    seconds: float


@dataclass
class TrainTrace:
    """逐次评估的训练记录，轮次严格递增"""

    records: list = field(default_factory=list)

    def append(self, epoch, bound, val_rmse, seconds):
        if self.records and epoch <= self.records[-1].epoch:
            raise ValueError(f"训练轨迹轮次必须严格递增: {self.records[-1].epoch} -> {epoch}")
        self.records.append(TraceRecord(int(epoch), float(bound), float(val_rmse), float(seconds)))

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def epochs(self):
        return np.array([r.epoch for r in self.records], dtype=int)

    @property
    def bounds(self):
        return np.array([r.bound for r in self.records], dtype=float)

    @property
    def val_rmse(self):
        return np.array([r.val_rmse for r in self.records], dtype=float)

    def to_frame(self):
        return pd.DataFrame([vars(r) for r in self.records], columns=TRACE_COLUMNS)

    def to_csv(self, path):
        """写出 epoch,bound,val_rmse,seconds 格式的CSV"""
        self.to_frame().to_csv(path, index=False, encoding="utf-8", lineterminator="\n")


def rmse(pred, truth):
    """均方根误差"""
    pred = np.asarray(pred, dtype=float).reshape(-1)
    truth = np.asarray(truth, dtype=float).reshape(-1)
    if pred.size != truth.size or pred.size < 1:
        raise LengthMismatch(f"预测长度 {pred.size} 与真实值长度 {truth.size} 不一致或为空")
    return float(np.sqrt(np.mean((pred - truth) ** 2)))


# ---------------------------------------------------------------- 训练循环

@dataclass(frozen=True)
class TrainResult:
    """训练结果: 最佳验证RMSE检查点的参数及其全训练集下界"""

    params: ParamVector
    trace: TrainTrace
    best_rmse: float
    bound: float
    epochs: int
    best_epoch: int


def _hyperparameters(params):
    """参数含核超参数段时返回其正值形式"""
    if "kernel" not in params or "noise" not in params:
        return {}
    return KernelParams.from_view(params).describe()


def train_model(estimator, data, fold, cfg, init=None):
    """
    以 Adam 上升训练单个模型，按验证RMSE早停

    参数:
    estimator: 模型估计器（见 estimators 模块）
    data (Dataset): 数据集
    fold (tuple): (训练索引, 验证索引)
    cfg (TrainConfig): 训练配置
    init (ParamVector): 初始参数，默认由估计器初始化

    返回:
    TrainResult: 训练结果
    """
    train_idx, val_idx = (np.asarray(i, dtype=int) for i in fold)
    X_tr, y_tr = data.X[train_idx], data.y[train_idx]
    X_val, y_val = data.X[val_idx], data.y[val_idx]
    n_train = X_tr.shape[0]

    params = init if init is not None else estimator.init_params(X_tr, y_tr, seed=cfg.seed)
    batch = min(cfg.batch_size, n_train) if estimator.stochastic else n_train
    trace = TrainTrace()

    def validation_rmse(p):
        mean, _ = estimator.predict(p, X_tr, y_tr, X_val)
        return rmse(mean, y_val)

    def full_bound(p):
        return evaluate(lambda view: estimator.objective(view, X_tr, y_tr, n_train), p)

    logger.info("开始训练 %s: 训练集 %d, 验证集 %d, 批大小 %d, 最多 %d 轮, 超参数 %s",
                estimator.label, n_train, X_val.shape[0], batch, cfg.max_epochs, _hyperparameters(params))
    rng = np.random.default_rng(cfg.seed)
    state = AdamState.fresh(len(params), lr=cfg.lr)
    start = time.perf_counter()
    epoch = 0
    try:
        best_params, best_rmse, best_epoch = params, validation_rmse(params), 0
        for epoch in range(1, cfg.max_epochs + 1):
            order = rng.permutation(n_train)
            for offset in range(0, n_train, batch):
                idx = order[offset:offset + batch]
                X_b, y_b = X_tr[idx], y_tr[idx]
                _, grad = backward_gradient(
                    lambda view: estimator.objective(view, X_b, y_b, n_train), params)
                state, params = adam_step(state, params, grad)

            if epoch % cfg.eval_every and epoch != cfg.max_epochs:
                continue
            val = validation_rmse(params)
            bound = full_bound(params)
            trace.append(epoch, bound, val, time.perf_counter() - start)
            logger.debug("%s 第 %d 轮: 下界 %.6g, 验证RMSE %.6g", estimator.label, epoch, bound, val)
            if val < best_rmse:
                best_params, best_rmse, best_epoch = params, val, epoch
            elif epoch - best_epoch >= cfg.patience_epochs:
                logger.info("%s 连续 %d 轮验证RMSE无改进，提前停止", estimator.label, epoch - best_epoch)
                break
        final_bound = full_bound(best_params)
    except TrainingAborted:
        raise
    except (CoreGPError, np.linalg.LinAlgError, FloatingPointError) as exc:
        raise TrainingAborted(f"{estimator.label} 在第 {epoch} 轮因数值错误中止: {exc}", trace=trace) from exc

    logger.info("完成训练 %s: %d 轮, 最佳验证RMSE %.6g (第 %d 轮), 下界 %.6g, 超参数 %s",
                estimator.label, epoch, best_rmse, best_epoch, final_bound, _hyperparameters(best_params))
    return TrainResult(params=best_params, trace=trace, best_rmse=best_rmse,
                       bound=final_bound, epochs=epoch, best_epoch=best_epoch)
