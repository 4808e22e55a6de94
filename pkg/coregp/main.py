#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
高斯过程回归实验程序 - 命令行入口

子命令:
- run: 运行 (模型 × 规模 × 折) 实验网格
- check: 校验已有实验输出并重新计算数值验收性质
- report: 由已有结果生成 PDF / Word / Excel 报告
"""

import argparse
import logging
import os
import sys

from pydantic import ValidationError

from .core.errors import CoreGPError
from .core.utils import get_default_parameters, load_parameters, save_parameters
from .experiment.results import check_results, read_results
from .experiment.runner import ExperimentSpec, run_experiment
from .report.report_generator import generate_report

logger = logging.getLogger("coregp")

OUT_ENV = "COREGP_OUT"
LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# 命令行参数名 -> 实验参数名
RUN_FLAGS = {
    "dataset": "dataset",
    "models": "models",
    "sizes": "sizes",
    "n": "n",
    "folds": "folds",
    "epochs": "max_epochs",
    "patience": "patience_epochs",
    "batch": "batch_size",
    "lr": "lr",
    "seed": "seed",
    "eval_every": "eval_every",
    "out": "out",
    "workers": "workers",
    "manifest": "manifest",
}


def setup_logging(verbosity=0):
    """-v 输出调试信息，-q 只输出警告"""
    level = logging.DEBUG if verbosity > 0 else logging.WARNING if verbosity < 0 else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, force=True)


def _int_list(text):
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"应为逗号分隔的整数: {text!r}") from exc


def _name_list(text):
    return [item.strip() for item in text.split(",") if item.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="coregp", description="核心集变分回火高斯过程回归实验")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="输出调试日志")
    parser.add_argument("-q", "--quiet", action="store_true", help="只输出警告与错误")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="运行实验网格")
    run.add_argument("--config", help="JSON参数文件，命令行参数优先")
    run.add_argument("--save-config", help="把最终参数保存为JSON文件")
    run.add_argument("--dataset", help="合成数据集编号（如 3 或 synthetic-3）或 manifest:<key>")
    run.add_argument("--manifest", help="数据集清单JSON")
    run.add_argument("--models", type=_name_list, help="逗号分隔: exact,titsias,svgp,cvtgp")
    run.add_argument("--sizes", type=_int_list, help="逗号分隔的核心集 / 诱导点规模")
    run.add_argument("--n", type=int, help="合成数据集样本数")
    run.add_argument("--folds", type=int, help="交叉验证折数")
    run.add_argument("--epochs", type=int, help="最大训练轮数")
    run.add_argument("--patience", type=int, help="早停耐心轮数")
    run.add_argument("--batch", type=int, help="小批量大小")
    run.add_argument("--lr", type=float, help="Adam学习率")
    run.add_argument("--seed", type=int, help="随机种子")
    run.add_argument("--eval-every", type=int, help="每隔多少轮评估验证RMSE")
    run.add_argument("--workers", type=int, help="并行进程数，默认为CPU核数")
    run.add_argument("--out", help=f"输出目录（环境变量 {OUT_ENV} 优先）")
    run.add_argument("--no-curves", action="store_true", help="不输出一维数据的预测曲线")
    run.add_argument("--report", help="同时生成报告（.pdf / .docx / .xlsx）")

    check = sub.add_parser("check", help="校验实验输出")
    check.add_argument("--out", help="实验输出目录")
    check.add_argument("--seed", type=int, default=0, help="数值验收性质的随机种子")
    check.add_argument("--no-fresh", action="store_true", help="只校验已有结果，不重新计算数值性质")

    report = sub.add_parser("report", help="由已有结果生成报告")
    report.add_argument("--out", help="实验输出目录")
    report.add_argument("--file", required=True, help="报告文件名（.pdf / .docx / .xlsx）")
    return parser


def _output_dir(args, default="results"):
    return os.environ.get(OUT_ENV) or args.out or default


def build_spec(args):
    """合并默认参数、参数文件、命令行参数与环境变量"""
    params = get_default_parameters()
    if args.config:
        loaded = load_parameters(args.config)
        if loaded is None:
            raise ValueError(f"无法加载参数文件 {args.config}")
        params.update(loaded)
    for flag, key in RUN_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            params[key] = value
    if os.environ.get(OUT_ENV):
        params["out"] = os.environ[OUT_ENV]
    if args.no_curves:
        params["curves"] = False
    return ExperimentSpec.from_parameters(params)


def cmd_run(args):
    try:
        spec = build_spec(args)
    except (ValueError, ValidationError) as e:
        logger.error("实验参数无效: %s", e)
        return 2
    if args.save_config:
        save_parameters(spec.to_parameters(), args.save_config)

    try:
        rows = run_experiment(spec)
    except (CoreGPError, KeyError, ValueError) as e:
        logger.error("实验无法运行: %s", e)
        return 2

    if args.report and not generate_report(args.report, rows):
        return 1
    return 0 if all(r.ok for r in rows) else 1


def cmd_check(args):
    out_dir = _output_dir(args)
    try:
        outcomes = check_results(out_dir, fresh=not args.no_fresh, seed=args.seed)
    except CoreGPError as e:
        logger.error("校验失败: %s", e)
        return 2
    return 0 if all(o.passed for o in outcomes) else 1


def cmd_report(args):
    out_dir = _output_dir(args)
    try:
        rows = read_results(out_dir)
    except CoreGPError as e:
        logger.error("无法读取结果: %s", e)
        return 2
    return 0 if generate_report(args.file, rows) else 1


COMMANDS = {"run": cmd_run, "check": cmd_check, "report": cmd_report}


def main(argv=None):
    """程序入口函数，返回进程退出码"""
    args = build_parser().parse_args(argv)
    setup_logging(-1 if args.quiet else args.verbose)
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
