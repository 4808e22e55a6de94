# -*- coding: utf-8 -*-

import json

import numpy as np
import pytest

from coregp.core.errors import (ConstantColumn, InvalidId, MissingColumn, NonNumericCell,
                                ParseError, TooFewRows)
from coregp.core.utils import load_manifest
from coregp.data.loaders import load_csv_normalize, resolve_dataset


@pytest.fixture
def simple_csv(tmp_path):
    path = tmp_path / "simple.csv"
    path.write_text("x,t\n1,10\n2,20\n3,30\n", encoding="utf-8")
    return path


class TestLoadCsv:
    def test_standardizes_inputs(self, simple_csv):
        data = load_csv_normalize(simple_csv, "t")
        np.testing.assert_allclose(data.X[:, 0], [-1.0, 0.0, 1.0])
        np.testing.assert_allclose(data.y, [10.0, 20.0, 30.0])
        assert data.name == "simple"

    def test_raw_inputs_recoverable(self, simple_csv):
        data = load_csv_normalize(simple_csv, "t")
        np.testing.assert_allclose(data.X_raw[:, 0], [1.0, 2.0, 3.0])

    def test_unit_sample_std(self, tmp_path, rng):
        path = tmp_path / "wide.csv"
        values = rng.normal(5.0, 3.0, size=(40, 3))
        lines = ["a,b,y,c"] + [f"{a},{b},{i},{c}" for i, (a, b, c) in enumerate(values)]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        data = load_csv_normalize(path, "y")
        assert data.dim == 3
        np.testing.assert_allclose(data.X.mean(axis=0), 0.0, atol=1e-12)
        np.testing.assert_allclose(data.X.std(axis=0, ddof=1), 1.0, rtol=1e-12)

    def test_semicolon_delimiter(self, tmp_path):
        path = tmp_path / "semi.csv"
        path.write_text("x;y\n0;1\n2;3\n", encoding="utf-8")
        data = load_csv_normalize(path, "y", delimiter=";", name="semi-data")
        assert data.name == "semi-data"
        np.testing.assert_allclose(data.y, [1.0, 3.0])

    def test_constant_column(self, tmp_path):
        path = tmp_path / "constant.csv"
        path.write_text("x,z,y\n1,5,0\n2,5,1\n3,5,2\n", encoding="utf-8")
        with pytest.raises(ConstantColumn, match="z"):
            load_csv_normalize(path, "y")

    def test_missing_target(self, simple_csv):
        with pytest.raises(MissingColumn):
            load_csv_normalize(simple_csv, "target")

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n1,2\nabc,3\n4,5\n", encoding="utf-8")
        with pytest.raises(NonNumericCell) as info:
            load_csv_normalize(path, "y")
        assert info.value.row == 3
        assert info.value.column == "x"

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_csv_normalize(tmp_path / "nope.csv", "y")

    def test_too_few_rows(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("x,y\n1,2\n", encoding="utf-8")
        with pytest.raises(TooFewRows):
            load_csv_normalize(path, "y")


class TestResolveDataset:
    @pytest.fixture
    def manifest(self, tmp_path, simple_csv):
        path = tmp_path / "manifest.json"
        path.write_text(json.dumps({
            "simple": {"name": "simple-set", "path": "simple.csv", "target_column": "t"},
        }), encoding="utf-8")
        return path

    @pytest.mark.parametrize("selector", ["3", "synthetic-3", " synthetic-3 "])
    def test_synthetic(self, selector):
        data = resolve_dataset(selector, n=25, seed=2)
        assert data.name == "synthetic-3"
        assert data.size == 25

    def test_manifest_relative_path(self, manifest):
        entries = load_manifest(manifest)
        assert entries["simple"].path == str(manifest.parent / "simple.csv")
        data = resolve_dataset("manifest:simple", manifest_path=manifest)
        assert data.name == "simple-set"
        assert data.size == 3

    def test_unknown_key(self, manifest):
        with pytest.raises(KeyError):
            resolve_dataset("manifest:other", manifest_path=manifest)

    def test_manifest_required(self):
        with pytest.raises(ValueError):
            resolve_dataset("manifest:simple")

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(ValueError):
            load_manifest(tmp_path / "missing.json")

    def test_invalid_manifest(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text(json.dumps({"simple": {"path": "x.csv"}}), encoding="utf-8")
        with pytest.raises(ValueError):
            load_manifest(path)

    @pytest.mark.parametrize("selector", ["abc", "9", "synthetic-0"])
    def test_invalid_selector(self, selector):
        with pytest.raises(InvalidId):
            resolve_dataset(selector, n=10)
