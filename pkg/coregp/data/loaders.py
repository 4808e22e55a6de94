#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
数据读取模块 - CSV数据读取与输入标准化，以及数据集选择器解析
"""

import logging
import re
from pathlib import Path

import numpy as np
import pandas as pd

from ..core.errors import (ConstantColumn, InvalidId, MissingColumn, NonNumericCell,
                           ParseError, TooFewRows)
from ..core.utils import load_manifest
from .dataset import Dataset, Normalization
from .synthetic import gen_synthetic

logger = logging.getLogger(__name__)


def _read_frame(path, delimiter):
    try:
        return pd.read_csv(path, sep=delimiter, dtype=str, keep_default_na=False,
                           skipinitialspace=True, encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"无法读取CSV文件 {path}: {exc}") from exc
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as exc:
        match = re.search(r"line (\d+)", str(exc))
        row = int(match.group(1)) if match else None
        raise ParseError(f"无法解析CSV文件 {path}: {exc}", row=row) from exc


def _numeric_column(frame, column):
    """逐列转换为数值，定位第一个非数值单元格"""
    values = pd.to_numeric(frame[column].str.strip(), errors="coerce").to_numpy(dtype=float)
    bad = ~np.isfinite(values)
    if bad.any():
        position = int(np.argmax(bad))
        # 行号从文件第1行(表头)开始计
        raise NonNumericCell(
            f"第 {position + 2} 行 {column} 列不是有效数值: {frame[column].iloc[position]!r}",
            row=position + 2, column=column,
        )
    return values


def load_csv_normalize(path, target_column, delimiter=",", name=None):
    """
    读取数值CSV并将输入列标准化为零均值、单位样本标准差

    参数:
    path (str): CSV文件路径（含表头）
    target_column (str): 目标列名，保持原始尺度
    delimiter (str): 分隔符
    name (str): 数据集名称，默认取文件名

    返回:
    Dataset: 标准化后的数据集
    """
    frame = _read_frame(path, delimiter)
    frame.columns = [str(c).strip() for c in frame.columns]
    if target_column not in frame.columns:
        raise MissingColumn(f"目标列 {target_column!r} 不存在，可用列: {list(frame.columns)}")
    features = [c for c in frame.columns if c != target_column]
    if not features:
        raise ParseError(f"{path} 中除目标列外没有输入列")
    if len(frame) < 2:
        raise TooFewRows(f"{path} 至少需要2行数据才能标准化，实际 {len(frame)} 行")

    y = _numeric_column(frame, target_column)
    X_raw = np.column_stack([_numeric_column(frame, c) for c in features])

    mean = X_raw.mean(axis=0)
    std = X_raw.std(axis=0, ddof=1)
    constant = [c for c, s in zip(features, std) if not s > 0]
    if constant:
        raise ConstantColumn(f"常数列无法标准化: {constant}")

    normalization = Normalization(mean=mean, std=std)
    dataset_name = name or Path(path).stem
    logger.info("读取数据集 %s: %d 行, %d 个输入列", dataset_name, X_raw.shape[0], len(features))
    return Dataset(X=normalization.apply(X_raw), y=y, name=dataset_name, normalization=normalization)


def resolve_dataset(selector, n=1000, seed=0, manifest_path=None):
    """
    解析数据集选择器

    参数:
    selector (str): 合成数据集编号（"3" 或 "synthetic-3"）或 "manifest:<key>"
    n (int): 合成数据集样本数
    seed (int): 合成数据集随机种子
    manifest_path (str): 数据集清单JSON路径

    返回:
    Dataset: 数据集
    """
    selector = str(selector).strip()
    if selector.startswith("manifest:"):
        key = selector.split(":", 1)[1]
        if manifest_path is None:
            raise ValueError("使用 manifest:<key> 时必须提供数据集清单路径")
        entries = load_manifest(manifest_path)
        if key not in entries:
            raise KeyError(f"数据集清单中没有 {key!r}，可用: {sorted(entries)}")
        entry = entries[key]
        return load_csv_normalize(entry.path, entry.target_column, delimiter=entry.delimiter, name=entry.name)

    token = selector.removeprefix("synthetic-").removeprefix("synthetic")
    try:
        dataset_id = int(token)
    except ValueError as exc:
        raise InvalidId(f"无法识别的数据集: {selector!r}") from exc
    return gen_synthetic(dataset_id, n=n, seed=seed)
