# -*- coding: utf-8 -*-

import pytest
from openpyxl import load_workbook

from coregp.experiment.results import ResultRow
from coregp.report.report_generator import (SUMMARY_HEADER, ensure_string_data, generate_report,
                                            summarize_rows)


@pytest.fixture
def rows():
    out = []
    for fold, (exact, cvtgp) in enumerate([(-10.0, -11.0), (-12.0, -13.0), (-14.0, -18.0)]):
        out.append(ResultRow("synthetic-1", "exact", None, fold, exact, 0.5 + fold, 100, 0))
        out.append(ResultRow("synthetic-1", "cvtgp", 25, fold, cvtgp, 0.6 + fold, 100, 0))
    out.append(ResultRow("synthetic-1", "cvtgp", 50, 0, None, None, None, 0, status="error: KTooLarge: 聚类数过大"))
    return out


class TestSummary:
    def test_medians_over_successful_folds(self, rows):
        summary = summarize_rows(rows)
        assert len(summary) == 2
        cvtgp = summary[summary["model"] == "cvtgp"].iloc[0]
        assert cvtgp["size"] == 25
        assert cvtgp["folds"] == 3
        assert cvtgp["bound"] == pytest.approx(-13.0)
        assert cvtgp["rmse"] == pytest.approx(1.6)
        exact = summary[summary["model"] == "exact"].iloc[0]
        assert exact["size"] == 0

    def test_all_failed(self, rows):
        assert summarize_rows(rows[-1:]).empty

    def test_ensure_string_data(self):
        assert ensure_string_data([[1, None, 0.5, float("nan")]]) == [["1", "-", "0.5", "-"]]


class TestGenerateReport:
    def test_excel(self, rows, tmp_path):
        path = tmp_path / "report.xlsx"
        assert generate_report(path, rows)
        workbook = load_workbook(path)
        assert workbook.sheetnames == ["汇总", "逐折结果"]
        summary = workbook["汇总"]
        assert [c.value for c in summary[1]] == SUMMARY_HEADER
        assert workbook["逐折结果"].max_row == len(rows) + 1

    def test_word(self, rows, tmp_path):
        from docx import Document

        path = tmp_path / "report.docx"
        assert generate_report(path, rows)
        document = Document(str(path))
        assert len(document.tables) == 2
        assert len(document.tables[1].rows) == len(rows) + 1

    def test_pdf(self, rows, tmp_path):
        path = tmp_path / "report.pdf"
        assert generate_report(path, rows)
        assert path.read_bytes().startswith(b"%PDF")

    def test_default_extension(self, rows, tmp_path):
        assert generate_report(tmp_path / "report", rows)
        assert (tmp_path / "report.pdf").exists()

    def test_unsupported_format(self, rows, tmp_path):
        assert not generate_report(tmp_path / "report.txt", rows)
        assert not (tmp_path / "report.txt").exists()

    def test_unwritable_target(self, rows, tmp_path):
        assert not generate_report(tmp_path / "missing" / "report.xlsx", rows)
