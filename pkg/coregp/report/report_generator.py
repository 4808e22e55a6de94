#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
报告生成模块 - 用于生成实验汇总报告（PDF / Word / Excel）
"""

import logging
import os
from datetime import datetime

import pandas as pd

# PDF生成
from reportlab.lib import colors
from reportlab.lib.pagesizes import A4
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.lib.units import inch
from reportlab.lib.enums import TA_CENTER, TA_LEFT
from reportlab.pdfbase import pdfmetrics
from reportlab.pdfbase.ttfonts import TTFont
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

# Word生成
from docx import Document
from docx.oxml.ns import qn

# Excel生成
from openpyxl import Workbook
from openpyxl.styles import Alignment, Font, PatternFill

from ..experiment.results import RESULT_COLUMNS, rows_frame

logger = logging.getLogger(__name__)

MODEL_LABELS = {
    "exact": "精确GP",
    "titsias": "Titsias稀疏GP",
    "svgp": "SVGP",
    "cvtgp": "CVTGP",
}

SUMMARY_HEADER = ["数据集", "模型", "规模", "成功折数", "下界中位数", "RMSE中位数"]

FONT_PATHS = [
    # Windows 字体路径
    "C:/Windows/Fonts/simhei.ttf",
    "C:/Windows/Fonts/simsun.ttc",
    "C:/Windows/Fonts/msyh.ttc",
    # Linux 字体路径
    "/usr/share/fonts/truetype/wqy/wqy-microhei.ttc",
    "/usr/share/fonts/truetype/wqy/wqy-zenhei.ttc",
    "/usr/share/fonts/opentype/noto/NotoSansCJK-Regular.ttc",
    # macOS 字体路径
    "/System/Library/Fonts/PingFang.ttc",
    "/System/Library/Fonts/STHeiti Light.ttc",
]


def register_chinese_font():
    """
    注册第一个可用的中文字体

    返回:
    str: 可用于PDF的字体名，找不到中文字体时为 Helvetica
    """
    registered = pdfmetrics.getRegisteredFontNames()
    for font_path in FONT_PATHS:
        if not os.path.exists(font_path):
            continue
        font_name = os.path.basename(font_path).split(".")[0].replace(" ", "")
        if font_name in registered:
            return font_name
        try:
            options = {"subfontIndex": 0} if font_path.endswith(".ttc") else {}
            pdfmetrics.registerFont(TTFont(font_name, font_path, **options))
            logger.debug("注册字体 %s", font_name)
            return font_name
        except Exception as e:
            logger.debug("注册字体 %s 时出错: %s", font_path, e)
    logger.warning("未找到中文字体，使用内置字体，中文可能显示为方块")
    return "Helvetica"


def summarize_rows(rows):
    """
    按 (数据集, 模型, 规模) 汇总成功单元的下界与RMSE中位数

    返回:
    DataFrame: 列为 dataset, model, size, folds, bound, rmse
    """
    frame = rows_frame(rows)
    frame = frame[frame["status"] == "ok"].copy()
    if frame.empty:
        return pd.DataFrame(columns=["dataset", "model", "size", "folds", "bound", "rmse"])
    frame["size"] = frame["size"].fillna(0).astype(int)
    frame["bound"] = frame["bound"].astype(float)
    frame["rmse"] = frame["rmse"].astype(float)
    summary = (frame.groupby(["dataset", "model", "size"], sort=True)
               .agg(folds=("fold", "count"), bound=("bound", "median"), rmse=("rmse", "median"))
               .reset_index())
    return summary


def ensure_string_data(data_list):
    """确保表格中的所有数据项都是字符串"""
    if isinstance(data_list, list):
        return [ensure_string_data(item) for item in data_list]
    if data_list is None:
        return "-"
    if isinstance(data_list, float):
        return "-" if pd.isna(data_list) else f"{data_list:.6g}"
    return str(data_list)


def _summary_table(rows):
    data = [SUMMARY_HEADER]
    for record in summarize_rows(rows).to_dict(orient="records"):
        data.append([
            record["dataset"],
            MODEL_LABELS.get(record["model"], record["model"]),
            record["size"] or "-",
            record["folds"],
            record["bound"],
            record["rmse"],
        ])
    return ensure_string_data(data)


def _detail_table(rows):
    data = [RESULT_COLUMNS]
    for row in rows:
        record = row.to_dict()
        data.append([record[c] for c in RESULT_COLUMNS])
    return ensure_string_data(data)


def generate_report(filename, rows, title="高斯过程回归实验报告"):
    """
    生成实验汇总报告

    参数:
    filename (str): 文件名，按扩展名选择 .pdf / .docx / .xlsx
    rows (list): ResultRow 列表
    title (str): 报告标题

    返回:
    bool: 是否成功生成报告
    """
    filename = str(filename)
    extension = os.path.splitext(filename)[1].lower()
    if not extension:
        filename += ".pdf"
        extension = ".pdf"
    generators = {
        ".pdf": generate_pdf_report,
        ".docx": generate_word_report,
        ".xlsx": generate_excel_report,
    }
    if extension not in generators:
        logger.error("不支持的报告格式: %s", extension)
        return False
    try:
        generators[extension](filename, rows, title)
    except Exception as e:
        logger.error("生成报告时出错: %s", e)
        return False
    logger.info("报告已生成: %s", filename)
    return True


def generate_pdf_report(filename, rows, title):
    """生成PDF格式报告"""
    doc = SimpleDocTemplate(filename, pagesize=A4, rightMargin=48, leftMargin=48, topMargin=60, bottomMargin=60)
    font_name = register_chinese_font()
    styles = getSampleStyleSheet()
    title_style = ParagraphStyle("Title", parent=styles["Title"], fontSize=18, alignment=TA_CENTER,
                                 spaceAfter=20, fontName=font_name)
    heading_style = ParagraphStyle("Heading1", parent=styles["Heading1"], fontSize=14, alignment=TA_LEFT,
                                   spaceAfter=8, fontName=font_name)
    normal_style = ParagraphStyle("Normal", parent=styles["Normal"], fontSize=10, spaceAfter=6,
                                  fontName=font_name)

    content = [
        Paragraph(title, title_style),
        Paragraph(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}", normal_style),
        Paragraph(f"网格单元: {len(rows)}，失败: {sum(not r.ok for r in rows)}", normal_style),
        Spacer(1, 0.2 * inch),
    ]

    table_style = TableStyle([
        ("BACKGROUND", (0, 0), (-1, 0), colors.lightgrey),
        ("FONTNAME", (0, 0), (-1, -1), font_name),
        ("FONTSIZE", (0, 0), (-1, -1), 8),
        ("GRID", (0, 0), (-1, -1), 0.5, colors.black),
        ("ALIGN", (2, 1), (-1, -1), "RIGHT"),
    ])

    content.append(Paragraph("汇总（各折中位数）", heading_style))
    summary = Table(_summary_table(rows), repeatRows=1)
    summary.setStyle(table_style)
    content.append(summary)
    content.append(Spacer(1, 0.3 * inch))

    content.append(Paragraph("逐折结果", heading_style))
    # 状态列可能很长，PDF中截断
    detail = [row[:-1] + [row[-1][:40]] for row in _detail_table(rows)]
    table = Table(detail, repeatRows=1)
    table.setStyle(table_style)
    content.append(table)

    doc.build(content)


def generate_word_report(filename, rows, title):
    """生成Word格式报告"""
    doc = Document()
    try:
        doc.styles["Normal"].font.name = "SimSun"
        doc.styles["Normal"]._element.rPr.rFonts.set(qn("w:eastAsia"), "SimSun")
    except AttributeError as e:
        logger.debug("设置文档默认字体时出错: %s", e)

    doc.add_heading(title, level=0)
    doc.add_paragraph(f"生成时间: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    doc.add_paragraph(f"网格单元: {len(rows)}，失败: {sum(not r.ok for r in rows)}")

    for heading, data in (("汇总（各折中位数）", _summary_table(rows)), ("逐折结果", _detail_table(rows))):
        doc.add_heading(heading, level=1)
        table = doc.add_table(rows=1, cols=len(data[0]))
        table.style = "Table Grid"
        for cell, text in zip(table.rows[0].cells, data[0]):
            cell.text = text
        for item in data[1:]:
            for cell, text in zip(table.add_row().cells, item):
                cell.text = text

    doc.save(filename)


def generate_excel_report(filename, rows, title):
    """生成Excel格式报告: 汇总表与逐折结果表两个工作表"""
    workbook = Workbook()
    header_font = Font(bold=True)
    header_fill = PatternFill("solid", fgColor="D9D9D9")

    summary_sheet = workbook.active
    summary_sheet.title = "汇总"
    detail_sheet = workbook.create_sheet("逐折结果")

    summary = summarize_rows(rows)
    summary_rows = [SUMMARY_HEADER] + [
        [r["dataset"], MODEL_LABELS.get(r["model"], r["model"]), r["size"] or None, int(r["folds"]),
         float(r["bound"]), float(r["rmse"])]
        for r in summary.to_dict(orient="records")
    ]
    detail_rows = [RESULT_COLUMNS] + [[row.to_dict()[c] for c in RESULT_COLUMNS] for row in rows]

    for sheet, data in ((summary_sheet, summary_rows), (detail_sheet, detail_rows)):
        for values in data:
            sheet.append(values)
        for cell in sheet[1]:
            cell.font = header_font
            cell.fill = header_fill
            cell.alignment = Alignment(horizontal="center")
        sheet.freeze_panes = "A2"

    summary_sheet.append([])
    summary_sheet.append([title, datetime.now().strftime("%Y-%m-%d %H:%M:%S")])
    workbook.save(filename)
