"""
数据集文件、归档与结果表格
Author: ICO
Date: 2024-04-06"""

import json

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_array_equal

from dataExchange import (
    impute_missing,
    level_column,
    load_dataset,
    read_archive,
    read_forecast_table,
    save_dataset,
    write_archive,
    write_summary,
    write_table,
)
from dataExchange.tensorArchive import archive_paths
from error import CheckpointError, DataFormatError
from seriesData import MultivariateSeries


def write_lines(path, records) -> None:
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")


# end def
class TestDatasetFile:
    def test_round_trip_with_missing_values(self, tmp_path):
        rng = np.random.default_rng(0)
        dataset = []
        for i in range(10):
            values = rng.normal(size=(2, 30)) * 10.0 ** rng.integers(-3, 4)
            values[rng.random((2, 30)) < 0.1] = np.nan
            dataset.append(MultivariateSeries(f"s{i}", "5T", values, start="2024-01-01T00:00:00", metric_type="gauge"))
        path = tmp_path / "dataset.jsonl"
        save_dataset(dataset, path)
        loaded = load_dataset(path)
        assert len(loaded) == 10
        assert all(a.same_as(b) for a, b in zip(dataset, loaded))

    def test_explicit_weights_survive(self, tmp_path):
        series = MultivariateSeries("a", "H", np.ones((1, 4)), np.array([[1.0, 0.0, 1.0, 1.0]]))
        save_dataset([series], tmp_path / "d.jsonl")
        assert_array_equal(load_dataset(tmp_path / "d.jsonl")[0].weights, series.weights)

    def test_missing_field_names_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_lines(path, [{"id": "a", "freq": "H", "values": [[1.0]]}, {"id": "b", "freq": "H"}])
        with pytest.raises(DataFormatError, match="line 2: field 'values'") as info:
            load_dataset(path)
        assert info.value.line == 2

    def test_ragged_variates(self, tmp_path):
        path = tmp_path / "ragged.jsonl"
        write_lines(path, [{"id": "a", "freq": "H", "values": [[1.0, 2.0], [1.0]]}])
        with pytest.raises(DataFormatError, match="ragged"):
            load_dataset(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.jsonl"
        path.write_text('{"id": "a"\n', encoding="utf-8")
        with pytest.raises(DataFormatError, match="line 1"):
            load_dataset(path)

    def test_unknown_frequency(self, tmp_path):
        path = tmp_path / "freq.jsonl"
        write_lines(path, [{"id": "a", "freq": "Q", "values": [[1.0]]}])
        with pytest.raises(DataFormatError, match="line 1"):
            load_dataset(path)


# end class
class TestImputation:
    def test_count_fills_zero(self):
        series = MultivariateSeries("a", "H", [1.0, np.nan, 3.0], metric_type="count")
        filled = impute_missing(series)
        assert_array_equal(filled.values, [[1.0, 0.0, 3.0]])
        assert_array_equal(filled.weights, np.ones((1, 3)))

    def test_gauge_interpolates(self):
        series = MultivariateSeries("a", "H", [np.nan, 1.0, np.nan, 3.0, np.nan], metric_type="gauge")
        assert_array_equal(impute_missing(series).values, [[1.0, 1.0, 2.0, 3.0, 3.0]])

    def test_untyped_series_keeps_gaps(self):
        series = MultivariateSeries("a", "H", [1.0, np.nan])
        filled = impute_missing(series)
        assert np.isnan(filled.values[0, 1])
        assert filled.weights[0, 1] == 0.0

    def test_load_with_imputation(self, tmp_path):
        path = tmp_path / "d.jsonl"
        write_lines(path, [{"id": "a", "freq": "H", "values": [[2.0, None, 4.0]], "metric_type": "rate"}])
        assert_array_equal(load_dataset(path, impute=True)[0].values, [[2.0, 3.0, 4.0]])


# end class
class TestArchive:
    @staticmethod
    def arrays() -> dict[str, np.ndarray]:
        return {"w": np.arange(6.0).reshape(2, 3), "b": np.array([0.1, -0.2]), "s": np.array([7.0])}

    def test_round_trip(self, tmp_path):
        write_archive(tmp_path, self.arrays(), {"step": 3})
        meta, arrays = read_archive(tmp_path)
        assert meta == {"step": 3}
        assert list(arrays) == ["w", "b", "s"]
        for name, value in self.arrays().items():
            assert_array_equal(arrays[name], value)
            assert arrays[name].shape == value.shape

    def test_truncated_blob(self, tmp_path):
        write_archive(tmp_path, self.arrays(), {})
        _, blob = archive_paths(tmp_path)
        blob.write_bytes(blob.read_bytes()[:-8])
        with pytest.raises(CheckpointError, match="8 bytes missing"):
            read_archive(tmp_path)

    def test_trailing_bytes(self, tmp_path):
        write_archive(tmp_path, self.arrays(), {})
        _, blob = archive_paths(tmp_path)
        blob.write_bytes(blob.read_bytes() + b"\x00" * 8)
        with pytest.raises(CheckpointError, match="trailing bytes"):
            read_archive(tmp_path)

    def test_missing_files(self, tmp_path):
        with pytest.raises(CheckpointError, match="missing"):
            read_archive(tmp_path)

    def test_bad_manifest(self, tmp_path):
        write_archive(tmp_path, self.arrays(), {})
        manifest, _ = archive_paths(tmp_path)
        manifest.write_text("{", encoding="utf-8")
        with pytest.raises(CheckpointError, match="JSON"):
            read_archive(tmp_path)


# end class
class TestReportTables:
    def test_level_column(self):
        assert level_column(0.1) == "q0.1"
        assert level_column(0.5) == "q0.5"

    def test_table_is_lossless(self, tmp_path):
        frame = pd.DataFrame({"series": ["a", "a"], "variate": [0, 1], "context_end": [5, 5], "step": [1, 1], "point": [0.1, 1 / 3]})
        path = write_table(frame, tmp_path / "forecasts.csv")
        loaded = read_forecast_table(path)
        assert loaded["point"].tolist() == [0.1, 1 / 3]

    def test_forecast_table_columns(self, tmp_path):
        path = write_table(pd.DataFrame({"series": ["a"], "point": [1.0]}), tmp_path / "f.csv")
        with pytest.raises(DataFormatError, match="lacks columns"):
            read_forecast_table(path)

    def test_summary_writes_null(self, tmp_path):
        path = write_summary({"mase": float("nan"), "crps": np.float64(0.5), "by_term": {"long": float("inf")}}, tmp_path / "s.json")
        loaded = json.loads(path.read_text(encoding="utf-8"))
        assert loaded == {"by_term": {"long": None}, "crps": 0.5, "mase": None}


# end class
