"""
评测协议：期限、窗口、指标、聚合与完整评测
Author: ICO
Date: 2024-04-08"""

import json

import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from backbone import init_params
from dataExchange import level_column, write_table
from defaultCONFIG import Term
from engine import Checkpoint
from error import CalculationError, ConfigError, DataFormatError, LowVariabilityError, ShapeError
from numKit import Rng
from obsBench import (
    EvalConfig,
    FileForecaster,
    ForecastResult,
    ModelForecaster,
    SeasonalNaiveForecaster,
    aggregate_shifted_geomean,
    build_tasks,
    crps_wql,
    impute_invalid,
    insample_naive_mae,
    mase,
    normalize_and_split,
    plan_tasks,
    rank_models,
    rolling_windows,
    run_benchmark,
    seasonal_naive,
    term_horizons,
    write_report,
)
from seriesData import MultivariateSeries, SynthConfig, generate_synthetic

SHIFTED_ONE = 1.0 + 1e-5 + 1e-5


class OracleForecaster:
    """直接返回真实值"""

    name = "oracle"

    def predict(self, series, context_end, horizon, season_length, levels) -> ForecastResult:
        point = series.values[:, context_end : context_end + horizon]
        return ForecastResult(point, np.broadcast_to(point, (len(levels),) + point.shape).copy())


# end class
@pytest.fixture
def daily_dataset():
    return generate_synthetic(SynthConfig(num_series=3, num_variates=2, length=400, freq="D", seed=1))


# end def
class TestTerms:
    def test_horizons_follow_series_length(self):
        assert term_horizons("H", 1000) == [(Term.SHORT, 48)]
        assert term_horizons("H", 5000) == [(Term.SHORT, 48), (Term.MEDIUM, 480)]
        assert term_horizons("H", 10000) == [(Term.SHORT, 48), (Term.MEDIUM, 480), (Term.LONG, 720)]

    def test_rolling_windows(self):
        windows = rolling_windows(1000, 48)
        assert [w.context_end for w in windows] == [900, 948]
        assert windows[1].target == slice(948, 996)

    def test_horizon_longer_than_test_split(self):
        with pytest.raises(ConfigError, match="horizon"):
            rolling_windows(100, 11)


# end class
class TestMetrics:
    def test_seasonal_naive(self):
        assert_array_equal(seasonal_naive(np.arange(1.0, 7.0), 3, 5), [4.0, 5.0, 6.0, 4.0, 5.0])

    def test_seasonal_naive_short_history(self):
        with pytest.raises(ShapeError, match="season length"):
            seasonal_naive(np.ones(2), 3, 4)

    def test_mase(self):
        assert insample_naive_mae(np.array([1.0, 2.0, 3.0, 4.0]), 1) == 1.0
        assert mase(np.array([2.0, 2.0]), np.array([1.0, 3.0]), np.array([0.0, 2.0, 0.0, 2.0]), 1) == pytest.approx(0.5)

    def test_mase_constant_history(self):
        with pytest.raises(LowVariabilityError):
            mase(np.ones(3), np.ones(3), np.full(10, 4.0), 2)

    def test_crps_perfect_forecast(self):
        actual = np.array([1.0, -2.0, 3.0])
        assert crps_wql(np.tile(actual, (3, 1)), actual, (0.1, 0.5, 0.9)) == 0.0

    def test_crps_single_level(self):
        assert crps_wql(np.zeros((1, 2)), np.ones(2), (0.5,)) == pytest.approx(1.0)

    def test_crps_zero_actuals(self):
        assert not np.isfinite(crps_wql(np.ones((1, 3)), np.zeros(3), (0.5,)))

    def test_crps_levels_must_increase(self):
        with pytest.raises(ConfigError, match="levels"):
            crps_wql(np.zeros((2, 3)), np.ones(3), (0.9, 0.1))


# end class
class TestAggregation:
    def test_constant_vector(self):
        assert aggregate_shifted_geomean([1.0, 1.0, 1.0]) == SHIFTED_ONE
        assert aggregate_shifted_geomean([0.0, 0.0]) == 2e-5

    def test_geometric_mean(self):
        assert aggregate_shifted_geomean([1.0, 4.0]) == pytest.approx(2.0, abs=1e-4)

    def test_negative_values(self):
        with pytest.raises(CalculationError, match="non-negative"):
            aggregate_shifted_geomean([1.0, -1.0])

    def test_impute_invalid(self):
        assert_allclose(impute_invalid([1.0, np.nan, 3.0, np.inf]), [1.0, 2.0, 3.0, 2.0])
        with pytest.raises(CalculationError, match="no finite value"):
            impute_invalid([np.nan, np.inf])

    def test_ranks_with_ties(self):
        crps = pd.DataFrame({"t1": [0.1, 0.2, 0.2], "t2": [0.3, 0.1, 0.2]}, index=["a", "b", "c"])
        assert_allclose(rank_models(crps).to_numpy(), [2.0, 1.75, 2.25])

    def test_ranks_need_finite_values(self):
        with pytest.raises(CalculationError, match="impute"):
            rank_models(pd.DataFrame({"t1": [0.1, np.nan]}, index=["a", "b"]))

    def test_flat_series_leave_main_split(self):
        raw = pd.DataFrame(
            {
                "model": ["m", "m", "m"],
                "task_id": ["a/short", "a/medium", "b/short"],
                "series_id": ["a", "a", "b"],
                "term": ["short", "medium", "short"],
                "mase": [2.0, 1.0, 3.0],
                "crps": [0.5, 0.2, 0.3],
                "mae": [1.0, 1.0, 1.0],
                "naive_mase": [4.0, 2.0, 1.0],
                "naive_crps": [1.0, 0.4, 0.6],
                "naive_mae": [1.0, 0.0, 2.0],
                "low_variability": [False, False, False],
            }
        )
        main, flat = normalize_and_split(raw)
        assert main["task_id"].tolist() == ["b/short"]
        assert sorted(flat["task_id"]) == ["a/medium", "a/short"]
        assert main["mase"].tolist() == [3.0]
        assert main["crps"].tolist() == [0.5]


# end class
class TestBenchmark:
    def test_tasks(self, daily_dataset):
        tasks = build_tasks(daily_dataset, EvalConfig())
        assert [t.task_id for t in tasks] == [f"synthetic-{i:05d}/short" for i in range(3)]
        assert tasks[0].horizon == 30
        assert tasks[0].season_length == 7
        assert [w.context_end for w in tasks[0].windows] == [360]

    def test_short_horizon_that_does_not_fit_is_reported(self, daily_dataset):
        short = MultivariateSeries("short", "H", np.random.default_rng(0).normal(size=(1, 200)))
        tasks, skipped = plan_tasks(daily_dataset + [short], EvalConfig())
        assert "short/short" not in [t.task_id for t in tasks]
        assert [(s["series_id"], s["term"], s["horizon"]) for s in skipped] == [("short", "short", 48)]
        report = run_benchmark(daily_dataset + [short], [])
        assert report.summary["num_tasks"] == 3
        assert report.summary["skipped"] == skipped
        assert "short" not in report.metrics["series_id"].tolist()

    def test_naive_normalizes_to_one(self, daily_dataset):
        report = run_benchmark(daily_dataset, [])
        naive = report.summary["models"]["seasonal_naive"]
        assert naive["main"]["mase"] == SHIFTED_ONE
        assert naive["main"]["crps"] == SHIFTED_ONE
        assert naive["main"]["by_term"]["short"]["num_tasks"] == 3
        assert naive["rank"] == 1.0
        assert report.summary["main_split_empty"] is False

    def test_flat_series_use_raw_errors(self, daily_dataset):
        dataset = daily_dataset + [MultivariateSeries("flat", "D", np.full((1, 400), 3.0))]
        report = run_benchmark(dataset, [])
        naive = report.summary["models"]["seasonal_naive"]
        assert naive["main"]["num_tasks"] == 3
        assert naive["flat"] == {"num_tasks": 1, "mae": 0.0, "crps": 0.0}
        flat_rows = report.metrics[report.metrics["split"] == "flat"]
        assert flat_rows["series_id"].tolist() == ["flat"]

    def test_only_flat_series(self, constant_dataset):
        long_flat = [MultivariateSeries(s.id, "D", np.tile(s.values, 6)) for s in constant_dataset]
        report = run_benchmark(long_flat, [])
        assert report.summary["main_split_empty"] is True
        assert report.summary["models"]["seasonal_naive"]["main"]["mase"] is None

    def test_oracle_wins(self, daily_dataset):
        report = run_benchmark(daily_dataset, [OracleForecaster()])
        oracle = report.summary["models"]["oracle"]
        assert oracle["main"]["mase"] == 2e-5
        assert oracle["rank"] == 1.0
        assert report.summary["models"]["seasonal_naive"]["rank"] == 2.0
        assert report.metrics["model"].tolist()[:3] == ["seasonal_naive"] * 3

    def test_thread_pool_gives_identical_metrics(self, daily_dataset):
        serial = run_benchmark(daily_dataset, [OracleForecaster()], EvalConfig(jobs=1))
        pooled = run_benchmark(daily_dataset, [OracleForecaster()], EvalConfig(jobs=2))
        pd.testing.assert_frame_equal(serial.metrics, pooled.metrics)
        assert serial.summary == pooled.summary

    def test_duplicate_names(self, daily_dataset):
        with pytest.raises(ConfigError, match="unique"):
            run_benchmark(daily_dataset, [OracleForecaster(), OracleForecaster()])

    def test_write_report(self, daily_dataset, tmp_path):
        metrics_path, summary_path = write_report(run_benchmark(daily_dataset, []), tmp_path)
        assert pd.read_csv(metrics_path)["model"].unique().tolist() == ["seasonal_naive"]
        summary = json.loads(summary_path.read_text(encoding="utf-8"))
        assert summary["levels"] == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


# end class
class TestFileForecaster:
    @staticmethod
    def write_naive_forecasts(dataset, path):
        cfg = EvalConfig()
        naive = SeasonalNaiveForecaster()
        rows = []
        for task in build_tasks(dataset, cfg):
            series = dataset[task.series_index]
            for window in task.windows:
                result = naive.predict(series, window.context_end, task.horizon, task.season_length, cfg.levels)
                for v in range(series.num_variates):
                    for step in range(task.horizon):
                        row = {"series": series.id, "variate": v, "context_end": window.context_end, "step": step}
                        row["point"] = result.point[v, step]
                        row.update({level_column(q): result.quantiles[i, v, step] for i, q in enumerate(cfg.levels)})
                        rows.append(row)
        write_table(pd.DataFrame(rows), path)

    def test_file_matches_naive(self, daily_dataset, tmp_path):
        path = tmp_path / "forecasts.csv"
        self.write_naive_forecasts(daily_dataset, path)
        report = run_benchmark(daily_dataset, [FileForecaster(path, "from_file")])
        from_file = report.summary["models"]["from_file"]
        assert from_file["main"]["mase"] == SHIFTED_ONE
        assert from_file["rank"] == 1.5
        assert report.summary["models"]["seasonal_naive"]["rank"] == 1.5

    def test_missing_window(self, daily_dataset, tmp_path):
        path = tmp_path / "forecasts.csv"
        self.write_naive_forecasts(daily_dataset[:1], path)
        with pytest.raises(DataFormatError, match="no forecast"):
            run_benchmark(daily_dataset, [FileForecaster(path)])


# end class
class TestModelForecaster:
    @pytest.fixture
    def forecaster(self, toy_config):
        return ModelForecaster(Checkpoint(toy_config, init_params(toy_config, Rng(0))), num_samples=4, seed=2)

    def test_same_window_same_samples(self, forecaster, daily_dataset):
        series = daily_dataset[0]
        a = forecaster.predict(series, 360, 8, 7, (0.1, 0.5, 0.9))
        b = forecaster.predict(series, 360, 8, 7, (0.1, 0.5, 0.9))
        assert_array_equal(a.quantiles, b.quantiles)
        assert a.point.shape == (2, 8)
        assert a.quantiles.shape == (3, 2, 8)
        assert np.all(np.diff(a.quantiles, axis=0) >= 0)

    @pytest.mark.slow
    def test_benchmark_with_model(self, forecaster, daily_dataset):
        report = run_benchmark(daily_dataset, [forecaster], EvalConfig(num_samples=4))
        model = report.summary["models"]["model"]
        assert np.isfinite(model["main"]["mase"])
        assert 1.0 <= model["rank"] <= 2.0


# end class
