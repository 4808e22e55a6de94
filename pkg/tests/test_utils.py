# -*- coding: utf-8 -*-

import json

from coregp.core.utils import get_default_parameters, load_parameters, save_parameters


class TestParameters:
    def test_save_and_load(self, tmp_path):
        params = get_default_parameters()
        assert save_parameters(params, tmp_path / "params")
        assert load_parameters(tmp_path / "params.json") == params

    def test_load_missing_file(self, tmp_path):
        assert load_parameters(tmp_path / "missing.json") is None

    def test_load_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json", encoding="utf-8")
        assert load_parameters(path) is None

    def test_load_non_object(self, tmp_path):
        path = tmp_path / "list.json"
        path.write_text(json.dumps([1, 2]), encoding="utf-8")
        assert load_parameters(path) is None

    def test_save_to_missing_directory(self, tmp_path):
        assert not save_parameters({"n": 1}, tmp_path / "missing" / "params.json")

    def test_defaults(self):
        params = get_default_parameters()
        assert params["sizes"] == [10, 25, 50]
        assert params["train_frac"] == 0.7
        assert params["lr"] == 1e-3
        assert params["workers"] is None
