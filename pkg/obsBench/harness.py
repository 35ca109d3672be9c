"""
评测流程：构建任务、并行预测、归一化、聚合与排名
Author: ICO
Date: 2024-03-30"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields

import numpy as np
import pandas as pd
from loguru import logger

from defaultCONFIG import HyperParameterCONFIG, Term
from error import ConfigError
from seriesData import MultivariateSeries

from .aggregation import aggregate_shifted_geomean, impute_column, normalize_and_split, rank_models
from .forecasters import Forecaster, SeasonalNaiveForecaster
from .metrics import crps_wql, insample_naive_mae, mae
from .terms import EvalWindow, holdout_length, rolling_windows, term_horizons

METRIC_COLUMNS = ["model", "task_id", "series_id", "term", "horizon", "split", "mase", "crps", "mae", "naive_mase", "naive_crps"]


@dataclass
class EvalConfig:
    levels: tuple[float, ...] = HyperParameterCONFIG.CRPS_LEVELS
    num_samples: int = HyperParameterCONFIG.NUM_SAMPLES
    # 传给模型的历史长度上限，None 表示模型最大上下文
    context_length: int | None = None
    jobs: int = 1
    seed: int = 0
    drop_degenerate: bool = False
    # 频率字母 -> 季节周期，覆盖默认表
    season_lengths: dict[str, int] = field(default_factory=dict)

    def validate(self) -> "EvalConfig":
        self.levels = tuple(float(v) for v in self.levels)
        if not self.levels or any(not 0 < q < 1 for q in self.levels) or list(self.levels) != sorted(set(self.levels)):
            raise ConfigError("levels", "need strictly increasing levels inside (0, 1)")
        if self.num_samples < 1:
            raise ConfigError("num_samples", "must be >= 1")
        if self.context_length is not None and self.context_length < 1:
            raise ConfigError("context_length", "must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs", "must be >= 1")
        for code, m in self.season_lengths.items():
            if int(m) < 1:
                raise ConfigError(f"season_lengths.{code}", "must be >= 1")
        return self

    # end def
    def to_dict(self) -> dict:
        values = asdict(self)
        values["levels"] = list(self.levels)
        return values

    @classmethod
    def from_dict(cls, values: dict) -> "EvalConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"eval.{key}", "unknown key")
        return cls(**values)

    # end def


# end class
@dataclass(frozen=True)
class EvalTask:
    task_id: str
    series_index: int
    series_id: str
    term: Term
    horizon: int
    windows: tuple[EvalWindow, ...]
    season_length: int
    variates: tuple[int, ...]

    @property
    def test_start(self) -> int:
        return self.windows[0].context_end


# end class
@dataclass
class BenchmarkReport:
    metrics: pd.DataFrame
    summary: dict


# end class
def _season_length(series: MultivariateSeries, train_len: int, cfg: EvalConfig) -> int:
    m = int(cfg.season_lengths.get(series.frequency.base.value, series.frequency.season_length))
    if train_len <= m:
        logger.warning(f"{series.id}: training split of {train_len} steps is not longer than season {m}, using m = 1")
        return 1
    return m


# end def
def _kept_variates(series: MultivariateSeries, test_start: int, drop_degenerate: bool) -> tuple[int, ...]:
    if not drop_degenerate:
        return tuple(range(series.num_variates))
    kept = []
    for v in range(series.num_variates):
        history, future = series.values[v, :test_start], series.values[v, test_start:]
        if np.ptp(history) == 0 and np.ptp(future) != 0:
            logger.debug(f"{series.id}: variate {v} is constant over the context only, dropped")
            continue
        kept.append(v)
    return tuple(kept)


# end def
def plan_tasks(dataset: list[MultivariateSeries], cfg: EvalConfig) -> tuple[list[EvalTask], list[dict]]:
    """为每条序列的每个适用期限构建评测任务，同时记录被跳过的序列与期限

    短期期限总会尝试；测试段放不下一个窗口时无法评分，记入跳过列表。

    Returns
    -------
    tuple[list[EvalTask], list[dict]]
        按任务标识排序的任务，以及跳过记录 (series_id, term, horizon, reason)
    """
    tasks, skipped = [], []
    for index, series in enumerate(dataset):
        available = holdout_length(series.length)
        if available < 1:
            logger.warning(f"{series.id}: series of {series.length} steps has no test split, skipped")
            skipped.append({"series_id": series.id, "term": None, "horizon": None, "reason": "no test split"})
            continue
        test_start = series.length - available
        variates = _kept_variates(series, test_start, cfg.drop_degenerate)
        if not variates:
            logger.warning(f"{series.id}: every variate is degenerate, skipped")
            skipped.append({"series_id": series.id, "term": None, "horizon": None, "reason": "every variate is degenerate"})
            continue
        m = _season_length(series, test_start, cfg)
        for term, horizon in term_horizons(series.freq, series.length):
            if horizon > available:
                reason = f"horizon does not fit the test split of {available} steps"
                logger.warning(f"{series.id}: {term.value} {reason}")
                skipped.append({"series_id": series.id, "term": term.value, "horizon": horizon, "reason": reason})
                continue
            windows = tuple(rolling_windows(series.length, horizon))
            tasks.append(EvalTask(f"{series.id}/{term.value}", index, series.id, term, horizon, windows, m, variates))
    return sorted(tasks, key=lambda t: t.task_id), skipped


# end def
def build_tasks(dataset: list[MultivariateSeries], cfg: EvalConfig) -> list[EvalTask]:
    """评测任务，按任务标识排序"""
    return plan_tasks(dataset, cfg)[0]


# end def
def evaluate_task(forecaster: Forecaster, series: MultivariateSeries, task: EvalTask, levels) -> dict:
    """一个任务上模型与季节性朴素预测的原始指标 (对窗口与变量求平均)"""
    naive = SeasonalNaiveForecaster()
    scores = {key: [] for key in ("mase", "crps", "mae", "naive_mase", "naive_crps", "naive_mae")}
    low_variability = False
    for window in task.windows:
        model_result = forecaster.predict(series, window.context_end, task.horizon, task.season_length, levels)
        naive_result = naive.predict(series, window.context_end, task.horizon, task.season_length, levels)
        for v in task.variates:
            actual = series.values[v, window.target]
            denominator = insample_naive_mae(series.values[v, : task.test_start], task.season_length)
            naive_error = mae(naive_result.point[v], actual)
            if denominator == 0 or naive_error == 0:
                low_variability = True
            model_error = mae(model_result.point[v], actual)
            scale = denominator if denominator > 0 else np.nan
            scores["mae"].append(model_error)
            scores["mase"].append(model_error / scale)
            scores["crps"].append(crps_wql(model_result.quantiles[:, v], actual, levels))
            scores["naive_mae"].append(naive_error)
            scores["naive_mase"].append(naive_error / scale)
            scores["naive_crps"].append(crps_wql(naive_result.quantiles[:, v], actual, levels))
    row = {
        "model": forecaster.name,
        "task_id": task.task_id,
        "series_id": task.series_id,
        "term": task.term.value,
        "horizon": task.horizon,
        "low_variability": low_variability,
    }
    row.update({key: float(np.mean(values)) for key, values in scores.items()})
    return row


# end def
def evaluate_forecaster(
    forecaster: Forecaster, dataset: list[MultivariateSeries], tasks: list[EvalTask], cfg: EvalConfig
) -> pd.DataFrame:
    """在所有任务上评测一个预测器，线程池大小为 cfg.jobs，结果按任务标识排序"""

    def run(task: EvalTask) -> dict:
        return evaluate_task(forecaster, dataset[task.series_index], task, cfg.levels)

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            rows = list(pool.map(run, tasks))
    else:
        rows = [run(task) for task in tasks]
    logger.info(f"{forecaster.name}: evaluated {len(rows)} tasks")
    return pd.DataFrame(rows).sort_values("task_id", kind="stable").reset_index(drop=True)


# end def
def _main_summary(frame: pd.DataFrame) -> dict:
    if frame.empty:
        return {"num_tasks": 0, "mase": None, "crps": None, "by_term": {}}
    by_term = {}
    for term in (t.value for t in Term):
        part = frame[frame["term"] == term]
        if len(part):
            by_term[term] = {
                "num_tasks": int(len(part)),
                "mase": aggregate_shifted_geomean(part["mase"]),
                "crps": aggregate_shifted_geomean(part["crps"]),
            }
    return {
        "num_tasks": int(len(frame)),
        "mase": aggregate_shifted_geomean(frame["mase"]),
        "crps": aggregate_shifted_geomean(frame["crps"]),
        "by_term": by_term,
    }


# end def
def _flat_summary(frame: pd.DataFrame) -> dict:
    def finite_mean(column: str):
        values = frame[column].to_numpy(dtype=np.float64)
        values = values[np.isfinite(values)]
        return float(values.mean()) if values.size else None

    return {"num_tasks": int(len(frame)), "mae": finite_mean("mae"), "crps": finite_mean("crps")}


# end def
def run_benchmark(dataset: list[MultivariateSeries], forecasters: list[Forecaster], cfg: EvalConfig | None = None) -> BenchmarkReport:
    """完整评测：季节性朴素预测总是参与，用于归一化与排名

    Parameters
    ----------
    `dataset` : list[MultivariateSeries]
    `forecasters` : list[Forecaster]
        名称必须互不相同
    `cfg` : EvalConfig | None, 可选

    Returns
    -------
    BenchmarkReport
        每个 (模型, 任务) 一行的指标表与摘要
    """
    cfg = (cfg or EvalConfig()).validate()
    forecasters = list(forecasters)
    if not any(f.name == SeasonalNaiveForecaster.name for f in forecasters):
        forecasters.insert(0, SeasonalNaiveForecaster())
    names = [f.name for f in forecasters]
    if len(set(names)) != len(names):
        raise ConfigError("models", f"model names must be unique, got {names}")

    tasks, skipped = plan_tasks(dataset, cfg)
    logger.info(f"{len(tasks)} evaluation tasks over {len(dataset)} series")
    if not tasks:
        raise ConfigError("data", "no series yields an evaluation task")
    raw = pd.concat([evaluate_forecaster(f, dataset, tasks, cfg) for f in forecasters], ignore_index=True)
    main, flat = normalize_and_split(raw)
    if not main.empty:
        main = impute_column(impute_column(main, "mase"), "crps")
    else:
        logger.warning("main split is empty: every series has zero seasonal-naive error")

    summary = {"models": {}, "num_tasks": len(tasks), "main_split_empty": bool(main.empty), "levels": list(cfg.levels)}
    summary["skipped"] = skipped
    for name in names:
        summary["models"][name] = {
            "main": _main_summary(main[main["model"] == name]),
            "flat": _flat_summary(flat[flat["model"] == name]),
        }
    if not main.empty:
        matrix = main.pivot(index="model", columns="task_id", values="crps").reindex(names)
        ranks = rank_models(matrix)
        for name in names:
            summary["models"][name]["rank"] = float(ranks[name])
    # end if

    order = {name: i for i, name in enumerate(names)}
    metrics = pd.concat([main, flat], ignore_index=True)
    metrics = metrics.assign(_order=metrics["model"].map(order)).sort_values(["_order", "task_id"], kind="stable")
    return BenchmarkReport(metrics[METRIC_COLUMNS].reset_index(drop=True), summary)


# end def
