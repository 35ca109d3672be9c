from .aggregation import aggregate_shifted_geomean, impute_column, impute_invalid, normalize_and_split, rank_models
from .forecasters import FileForecaster, ForecastResult, Forecaster, ModelForecaster, SeasonalNaiveForecaster
from .harness import (
    BenchmarkReport,
    EvalConfig,
    EvalTask,
    build_tasks,
    evaluate_forecaster,
    evaluate_task,
    plan_tasks,
    run_benchmark,
)
from .metrics import crps_wql, insample_naive_mae, mae, mase, seasonal_naive
from .report import write_report
from .terms import EvalWindow, holdout_length, rolling_windows, term_horizons
