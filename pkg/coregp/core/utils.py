#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
工具函数模块 - 参数文件读写、默认实验参数与数据集清单
"""

import json
import logging
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

logger = logging.getLogger(__name__)


def save_parameters(params, filename):
    """
    保存实验参数到JSON文件

    参数:
    params (dict): 实验参数字典
    filename (str): 文件名

    返回:
    bool: 保存成功返回True，否则返回False
    """
    filename = str(filename)
    if not filename.endswith(".json"):
        filename += ".json"
    try:
        with open(filename, "w", encoding="utf-8") as f:
            json.dump(params, f, ensure_ascii=False, indent=4)
        return True
    except (OSError, TypeError) as e:
        logger.error("保存参数失败: %s", e)
        return False


def load_parameters(filename):
    """
    从JSON文件加载实验参数

    参数:
    filename (str): 文件名

    返回:
    dict: 参数字典，加载失败返回None
    """
    try:
        with open(filename, "r", encoding="utf-8") as f:
            params = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        logger.error("加载参数失败: %s", e)
        return None
    if not isinstance(params, dict):
        logger.error("参数文件 %s 的顶层不是JSON对象", filename)
        return None
    return params


def get_default_parameters():
    """
    获取默认实验参数（桌面规模）

    返回:
    dict: 默认参数字典
    """
    return {
        "dataset": "synthetic-3",
        "models": ["exact", "titsias", "svgp", "cvtgp"],
        "sizes": [10, 25, 50],
        "n": 1000,
        "folds": 5,
        "train_frac": 0.7,

        # 训练参数
        "batch_size": 512,
        "max_epochs": 5000,
        "patience_epochs": 500,
        "lr": 1e-3,
        "seed": 0,
        "eval_every": 1,

        # 输出
        "out": "results",
        "workers": None,
    }


# ---------------------------------------------------------------- 数据集清单

class DatasetEntry(BaseModel):
    """数据集清单中的一项"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(min_length=1)
    path: str = Field(min_length=1)
    target_column: str = Field(min_length=1)
    delimiter: str = Field(default=",", min_length=1)


_MANIFEST = TypeAdapter(dict[str, DatasetEntry])


def load_manifest(path):
    """
    读取数据集清单 {key: {name, path, target_column, delimiter?}}

    参数:
    path (str): 清单JSON路径，条目中的相对路径相对于清单所在目录

    返回:
    dict: {key: DatasetEntry}
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        entries = _MANIFEST.validate_python(raw)
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise ValueError(f"数据集清单 {path} 无效: {e}") from e

    resolved = {}
    for key, entry in entries.items():
        data_path = Path(entry.path)
        if not data_path.is_absolute():
            data_path = path.parent / data_path
        resolved[key] = entry.model_copy(update={"path": str(data_path)})
    logger.debug("数据集清单 %s: %d 项", path, len(resolved))
    return resolved
