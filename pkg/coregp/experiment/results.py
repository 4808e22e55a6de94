#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
结果模块 - 实验结果表的写出、读取与事后校验
"""

import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from ..core.cvtgp import Coreset, cvtgp_bound_alt, cvtgp_bound_full
from ..core.errors import ResultsIoError
from ..core.gp_models import InducingVariational, exact_log_marginal, svgp_bound, titsias_bound
from ..core.kernels import KernelParams
from ..data.splits import kmeans_init
from ..data.synthetic import gen_synthetic

logger = logging.getLogger(__name__)

RESULT_COLUMNS = ["dataset", "model", "size", "fold", "bound", "rmse", "epochs", "seed", "status"]
RESULTS_CSV = "results.csv"
RESULTS_JSON = "results.json"
TRACE_DIR = "traces"
ARTIFACT_DIR = "artifacts"
CURVE_DIR = "curves"


@dataclass(frozen=True)
class ResultRow:
    """一个 (数据集, 模型, 规模, 折) 网格单元的结果"""

    dataset: str
    model: str
    size: Optional[int]
    fold: int
    bound: Optional[float]
    rmse: Optional[float]
    epochs: Optional[int]
    seed: int
    status: str = "ok"

    @property
    def ok(self):
        return self.status == "ok"

    @property
    def label(self):
        """产物文件名前缀，如 cvtgp-10-fold0"""
        if self.size is None:
            return f"{self.model}-fold{self.fold}"
        return f"{self.model}-{self.size}-fold{self.fold}"

    def to_dict(self):
        return asdict(self)


def rows_frame(rows):
    """结果行转为固定列顺序的 DataFrame"""
    frame = pd.DataFrame([row.to_dict() for row in rows], columns=RESULT_COLUMNS)
    # 可空整数列，避免写出 10.0
    return frame.astype({"size": "Int64", "fold": int, "epochs": "Int64", "seed": int})


def emit_results(rows, out_dir, traces=None):
    """
    写出 results.csv、results.json 与 traces/ 下的训练轨迹

    参数:
    rows (list): ResultRow 列表
    out_dir (str): 输出目录
    traces (dict): {文件名前缀: TrainTrace}

    返回:
    dict: 写出的结果文件路径
    """
    if not rows:
        raise ValueError("没有可写出的结果行")
    out = Path(out_dir)
    csv_path = out / RESULTS_CSV
    json_path = out / RESULTS_JSON
    try:
        out.mkdir(parents=True, exist_ok=True)
        rows_frame(rows).to_csv(csv_path, index=False, encoding="utf-8", lineterminator="\n")
        with open(json_path, "w", encoding="utf-8") as f:
            json.dump([row.to_dict() for row in rows], f, ensure_ascii=False, indent=2)
            f.write("\n")
        if traces:
            trace_dir = out / TRACE_DIR
            trace_dir.mkdir(exist_ok=True)
            for label, trace in sorted(traces.items()):
                trace.to_csv(trace_dir / f"{label}.csv")
    except OSError as exc:
        raise ResultsIoError(f"写出结果到 {out} 失败: {exc}") from exc
    logger.info("结果已写出: %s (%d 行)", csv_path, len(rows))
    return {"csv": csv_path, "json": json_path}


def _optional(value, cast):
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return None
    return cast(value)


def read_results(out_dir):
    """读取 results.csv 为 ResultRow 列表"""
    path = Path(out_dir) / RESULTS_CSV
    try:
        frame = pd.read_csv(path, dtype={"dataset": str, "model": str, "status": str}, keep_default_na=True)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ResultsIoError(f"无法读取结果文件 {path}: {exc}") from exc
    missing = [c for c in RESULT_COLUMNS if c not in frame.columns]
    if missing:
        raise ResultsIoError(f"结果文件 {path} 缺少列: {missing}")

    rows = []
    for record in frame.to_dict(orient="records"):
        rows.append(ResultRow(
            dataset=record["dataset"],
            model=record["model"],
            size=_optional(record["size"], int),
            fold=int(record["fold"]),
            bound=_optional(record["bound"], float),
            rmse=_optional(record["rmse"], float),
            epochs=_optional(record["epochs"], int),
            seed=int(record["seed"]),
            status=record["status"],
        ))
    return rows


# ---------------------------------------------------------------- 校验

@dataclass(frozen=True)
class CheckOutcome:
    name: str
    passed: bool
    detail: str = ""


def check_bound_ordering(rows, tol=1e-6):
    """同一数据集同一折上，各稀疏模型的下界不超过精确GP的对数边缘似然"""
    exact = {(r.dataset, r.fold): r.bound for r in rows if r.ok and r.model == "exact"}
    violations = []
    compared = 0
    for r in rows:
        if not r.ok or r.model == "exact" or (r.dataset, r.fold) not in exact:
            continue
        compared += 1
        upper = exact[(r.dataset, r.fold)]
        if r.bound > upper + tol * (1.0 + abs(upper)):
            violations.append(f"{r.dataset}/{r.label}: {r.bound:.6g} > {upper:.6g}")
    if violations:
        return CheckOutcome("下界排序", False, "; ".join(violations))
    return CheckOutcome("下界排序", True, f"比较 {compared} 个单元")


def check_coreset_artifacts(out_dir):
    """每个核心集产物的 β 严格为正且所有数值有限"""
    paths = sorted((Path(out_dir) / ARTIFACT_DIR).glob("*-coreset.csv"))
    bad = []
    for path in paths:
        frame = pd.read_csv(path)
        values = frame.to_numpy(dtype=float)
        if "beta" not in frame.columns or not np.all(np.isfinite(values)) or not np.all(frame["beta"] > 0):
            bad.append(path.name)
    if bad:
        return CheckOutcome("核心集产物", False, f"无效文件: {bad}")
    return CheckOutcome("核心集产物", True, f"检查 {len(paths)} 个文件")


def _random_instance(rng):
    n = int(rng.integers(10, 31))
    dim = int(rng.integers(1, 3))
    X = rng.uniform(-3.0, 3.0, size=(n, dim))
    y = np.sin(X).sum(axis=1) + 0.3 * rng.standard_normal(n)
    kp = KernelParams.from_constrained(
        lengthscale=rng.uniform(0.7, 1.5), outputscale=rng.uniform(0.5, 2.0), noise=rng.uniform(0.05, 0.5))
    return X, y, kp


def acceptance_checks(seed=0, instances=20):
    """
    重新计算的数值性质: 全核心集恒等式、两种推导的一致性、下界排序

    返回:
    list: CheckOutcome 列表
    """
    outcomes = []

    data = gen_synthetic(3, n=30, seed=seed)
    kp = KernelParams.from_constrained(lengthscale=0.5, outputscale=1.0, noise=0.5)
    exact = exact_log_marginal(data.X, data.y, kp)
    full = cvtgp_bound_full(data.X, data.y, Coreset.from_weights(data.X, data.y, 1.0), kp)
    gap = abs(full - exact)
    outcomes.append(CheckOutcome("全核心集恒等式", gap <= 1e-7 * (1.0 + abs(exact)), f"|差| = {gap:.3e}"))

    rng = np.random.default_rng(seed)
    worst_alt = 0.0
    ordering = []
    for i in range(instances):
        X, y, kp = _random_instance(rng)
        size = int(rng.integers(1, min(6, X.shape[0]) + 1))
        centers, _ = kmeans_init(X, size, seed=seed + i)
        cs = Coreset.from_weights(centers + 0.1 * rng.standard_normal(centers.shape),
                                  rng.standard_normal(size), rng.uniform(0.2, 3.0, size))
        L_S = np.tril(0.3 * rng.standard_normal((size, size)), -1) + np.diag(rng.uniform(0.2, 1.0, size))
        iv = InducingVariational.from_cov_factor(centers, rng.standard_normal(size), L_S)

        exact = exact_log_marginal(X, y, kp)
        titsias = titsias_bound(X, y, centers, kp)
        svgp = svgp_bound(X, y, iv, kp, X.shape[0])
        full = cvtgp_bound_full(X, y, cs, kp)
        alt = cvtgp_bound_alt(X, y, cs, kp)
        worst_alt = max(worst_alt, abs(alt - full) / (1.0 + abs(full)))

        slack = 1e-9 * (1.0 + abs(exact))
        if not (svgp <= titsias + slack and titsias <= exact + slack and full <= exact + slack):
            ordering.append(f"实例{i}: svgp={svgp:.6g}, titsias={titsias:.6g}, cvtgp={full:.6g}, exact={exact:.6g}")

    outcomes.append(CheckOutcome("推导一致性", worst_alt <= 1e-8, f"最大相对差 {worst_alt:.3e}"))
    outcomes.append(CheckOutcome("共享超参数下界排序", not ordering, "; ".join(ordering) or f"{instances} 个随机实例"))
    return outcomes


def check_results(out_dir, fresh=True, seed=0):
    """
    事后校验实验输出

    参数:
    out_dir (str): 实验输出目录
    fresh (bool): 是否同时重新计算数值验收性质
    seed (int): 数值验收性质的随机种子

    返回:
    list: CheckOutcome 列表，全部通过时实验可视为合格
    """
    rows = read_results(out_dir)
    failed = [r.label for r in rows if not r.ok]
    outcomes = [
        CheckOutcome("单元状态", not failed, f"失败单元: {failed}" if failed else f"{len(rows)} 个单元全部成功"),
        check_bound_ordering(rows),
        check_coreset_artifacts(out_dir),
    ]
    if fresh:
        outcomes.extend(acceptance_checks(seed=seed))
    for outcome in outcomes:
        log = logger.info if outcome.passed else logger.error
        log("[%s] %s: %s", "通过" if outcome.passed else "失败", outcome.name, outcome.detail)
    return outcomes
