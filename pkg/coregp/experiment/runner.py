#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
实验运行模块 - 按 (模型 × 规模 × 折) 网格训练并写出结果与产物
"""

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.errors import ResultsIoError, TrainingAborted
from ..core.estimators import MODEL_NAMES, get_estimator
from ..core.training import TrainConfig, train_model
from ..data.loaders import resolve_dataset
from ..data.splits import kfold_split
from .results import ARTIFACT_DIR, CURVE_DIR, ResultRow, emit_results

logger = logging.getLogger(__name__)

CURVE_POINTS = 200
TRAIN_KEYS = ("batch_size", "max_epochs", "patience_epochs", "lr", "seed", "eval_every")


class ExperimentSpec(BaseModel):
    """实验规格: 数据集、模型与规模列表、训练配置与输出目录"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dataset: str = "synthetic-3"
    models: list[str] = Field(default_factory=lambda: list(MODEL_NAMES), min_length=1)
    sizes: list[int] = Field(default_factory=lambda: [10, 25, 50])
    n: int = Field(default=1000, ge=1)
    folds: int = Field(default=5, ge=1)
    train_frac: float = Field(default=0.7, gt=0, lt=1)
    train: TrainConfig = Field(default_factory=TrainConfig)
    out: str = "results"
    workers: Optional[int] = Field(default=None, ge=1)
    manifest: Optional[str] = None
    curves: bool = True

    @field_validator("models")
    @classmethod
    def _known_models(cls, models):
        models = [m.strip().lower() for m in models]
        unknown = [m for m in models if m not in MODEL_NAMES]
        if unknown:
            raise ValueError(f"未知模型 {unknown}，可选: {list(MODEL_NAMES)}")
        if len(set(models)) != len(models):
            raise ValueError(f"模型列表有重复: {models}")
        return models

    @field_validator("sizes")
    @classmethod
    def _positive_sizes(cls, sizes):
        if any(s < 1 for s in sizes):
            raise ValueError(f"规模必须为正整数: {sizes}")
        return sorted(set(sizes))

    @model_validator(mode="after")
    def _sizes_for_sparse(self):
        if any(m != "exact" for m in self.models) and not self.sizes:
            raise ValueError("稀疏模型需要非空的规模列表")
        return self

    @classmethod
    def from_parameters(cls, params):
        """由扁平参数字典（见 utils.get_default_parameters）构造"""
        params = dict(params)
        train = {k: params.pop(k) for k in TRAIN_KEYS if k in params}
        return cls(train=TrainConfig(**train), **params)

    def to_parameters(self):
        params = self.model_dump(exclude={"train"})
        params.update(self.train.model_dump())
        return params


@dataclass(frozen=True)
class GridCell:
    model: str
    size: Optional[int]
    fold: int


def grid_cells(spec):
    """按 (模型, 规模, 折) 排序的网格单元"""
    cells = []
    for model in sorted(spec.models, key=MODEL_NAMES.index):
        sizes = [None] if model == "exact" else spec.sizes
        for size in sizes:
            for fold in range(spec.folds):
                cells.append(GridCell(model, size, fold))
    return cells


@dataclass
class CellOutcome:
    row: ResultRow
    trace: object = None
    artifacts: dict = None
    curve: object = None


def _predictive_curve(estimator, params, data, X_tr, y_tr):
    """一维数据在训练输入范围内 200 点网格上的预测均值与方差"""
    grid = np.linspace(X_tr[:, 0].min(), X_tr[:, 0].max(), CURVE_POINTS).reshape(-1, 1)
    mean, var_y = estimator.predict(params, X_tr, y_tr, grid)
    return pd.DataFrame({"x": data.normalization.invert(grid)[:, 0], "mean": mean, "var": var_y})


def run_cell(data, cell, fold, cfg, curves=True):
    """
    训练一个网格单元，异常记录在结果行的 status 中

    返回:
    CellOutcome: 结果行、训练轨迹与产物
    """
    row = dict(dataset=data.name, model=cell.model, size=cell.size, fold=cell.fold, seed=cfg.seed)
    estimator = get_estimator(cell.model, cell.size)
    try:
        result = train_model(estimator, data, fold, cfg)
    except Exception as exc:
        logger.error("单元 %s 第 %d 折失败: %s", estimator.label, cell.fold, exc)
        trace = exc.trace if isinstance(exc, TrainingAborted) else None
        status = f"error: {type(exc).__name__}: {exc}"
        return CellOutcome(ResultRow(bound=None, rmse=None, epochs=None, status=status, **row), trace=trace)

    artifacts = {}
    for name, frame in estimator.artifacts(result.params).items():
        columns = [c for c in frame.columns if c.startswith("x") and c[1:].isdigit()]
        frame[columns] = data.normalization.invert(frame[columns].to_numpy())
        artifacts[name] = frame

    curve = None
    if curves and data.dim == 1:
        train_idx = np.asarray(fold[0], dtype=int)
        curve = _predictive_curve(estimator, result.params, data, data.X[train_idx], data.y[train_idx])

    out_row = ResultRow(bound=result.bound, rmse=result.best_rmse, epochs=result.epochs, **row)
    logger.info("单元 %s 第 %d 折完成: 下界 %.6g, RMSE %.6g", estimator.label, cell.fold, result.bound, result.best_rmse)
    return CellOutcome(out_row, trace=result.trace, artifacts=artifacts, curve=curve)


def _run_cell_job(job):
    return run_cell(*job)


def run_experiment(spec):
    """
    运行实验网格

    参数:
    spec (ExperimentSpec): 实验规格

    返回:
    list: 按网格顺序排列的 ResultRow
    """
    out = Path(spec.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ResultsIoError(f"无法创建输出目录 {out}: {exc}") from exc

    data = resolve_dataset(spec.dataset, n=spec.n, seed=spec.train.seed, manifest_path=spec.manifest)
    plan = kfold_split(data.size, k=spec.folds, train_frac=spec.train_frac, seed=spec.train.seed)
    cells = grid_cells(spec)
    jobs = [(data, cell, plan.folds[cell.fold], spec.train, spec.curves) for cell in cells]
    workers = spec.workers or os.cpu_count() or 1
    logger.info("实验 %s: %d 个单元, %d 个进程", data.name, len(cells), min(workers, len(cells)))

    if workers == 1 or len(jobs) == 1:
        outcomes = [_run_cell_job(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            outcomes = list(pool.map(_run_cell_job, jobs))

    rows, traces = [], {}
    for outcome in outcomes:
        row = outcome.row
        if outcome.trace is not None:
            traces[row.label] = outcome.trace
        try:
            if outcome.artifacts:
                (out / ARTIFACT_DIR).mkdir(exist_ok=True)
                for name, frame in outcome.artifacts.items():
                    frame.to_csv(out / ARTIFACT_DIR / f"{row.label}-{name}.csv", index=False, lineterminator="\n")
            if outcome.curve is not None:
                (out / CURVE_DIR).mkdir(exist_ok=True)
                outcome.curve.to_csv(out / CURVE_DIR / f"{row.label}.csv", index=False, lineterminator="\n")
        except OSError as exc:
            raise ResultsIoError(f"写出 {row.label} 的产物失败: {exc}") from exc
        rows.append(row)

    emit_results(rows, out, traces)
    failed = sum(not r.ok for r in rows)
    if failed:
        logger.warning("%d / %d 个单元失败", failed, len(rows))
    return rows
