"""
被评测的预测器：季节性朴素、检查点模型、预测结果文件
Author: ICO
Date: 2024-03-30"""

import zlib
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

import numpy as np

from dataExchange import level_column, read_forecast_table
from defaultCONFIG import HyperParameterCONFIG
from engine import Checkpoint, forecast, load_checkpoint, point_forecast, quantiles
from error import DataFormatError
from numKit import Rng
from seriesData import MultivariateSeries

from .metrics import seasonal_naive


@dataclass(frozen=True)
class ForecastResult:
    """`point` 为 M×H，`quantiles` 为 len(levels)×M×H"""

    point: np.ndarray
    quantiles: np.ndarray


# end class
class Forecaster(Protocol):
    name: str

    def predict(
        self, series: MultivariateSeries, context_end: int, horizon: int, season_length: int, levels
    ) -> ForecastResult: ...


# end class
class SeasonalNaiveForecaster:
    """所有分位数都等于点预测"""

    name = "seasonal_naive"

    def predict(self, series, context_end, horizon, season_length, levels) -> ForecastResult:
        point = seasonal_naive(series.values[:, :context_end], season_length, horizon)
        return ForecastResult(point, np.broadcast_to(point, (len(levels),) + point.shape).copy())

    # end def


# end class
class ModelForecaster:
    """从检查点抽样：中位数为点预测，经验分位数为分位预测

    Parameters
    ----------
    `checkpoint` : Checkpoint | str | Path
    `num_samples` : int, 可选
        默认值：256
    `context_length` : int | None, 可选
        传给模型的历史长度上限，默认值：None (模型最大上下文)
    `seed` : int, 可选
        与任务标识一起决定每个窗口的随机数，默认值：0
    """

    def __init__(
        self,
        checkpoint: Checkpoint | str | Path,
        num_samples: int = HyperParameterCONFIG.NUM_SAMPLES,
        context_length: int | None = None,
        seed: int = 0,
        name: str | None = None,
    ):
        self.checkpoint = checkpoint if isinstance(checkpoint, Checkpoint) else load_checkpoint(checkpoint)
        self.num_samples = num_samples
        self.context_length = context_length or self.checkpoint.model_config.max_context
        self.seed = seed
        self.name = name or "model"

    # end alternate constructor
    def window_rng(self, series_id: str, context_end: int, horizon: int) -> Rng:
        key = zlib.crc32(f"{series_id}|{context_end}|{horizon}".encode("utf-8"))
        return Rng((self.seed << 32) ^ key)

    # end def
    def predict(self, series, context_end, horizon, season_length, levels) -> ForecastResult:
        start = max(0, context_end - self.context_length)
        samples = forecast(
            self.checkpoint,
            series.values[:, start:context_end],
            None,
            horizon,
            self.num_samples,
            self.window_rng(series.id, context_end, horizon),
            context_weights=series.weights[:, start:context_end],
        )
        return ForecastResult(point_forecast(samples), quantiles(samples, levels))

    # end def


# end class
class FileForecaster:
    """读取 forecasts.csv，按 (series, variate, context_end, step) 取值"""

    def __init__(self, path: str | Path, name: str | None = None):
        self.path = Path(path)
        self.name = name or self.path.stem
        frame = read_forecast_table(self.path)
        frame["series"] = frame["series"].astype(str)
        self.table = frame.set_index(["series", "context_end"]).sort_index()

    # end alternate constructor
    def predict(self, series, context_end, horizon, season_length, levels) -> ForecastResult:
        key = (series.id, context_end)
        if key not in self.table.index:
            raise DataFormatError(f"no forecast for series '{series.id}' at context end {context_end}", field="context_end")
        rows = self.table.loc[[key]]
        columns = [level_column(level) for level in levels]
        missing = [c for c in columns if c not in rows.columns]
        if missing:
            raise DataFormatError(f"forecast file lacks quantile levels {missing}", field=missing[0])
        rows = rows[rows["step"] < horizon]
        if len(rows) != series.num_variates * horizon:
            raise DataFormatError(
                f"series '{series.id}' at {context_end}: expected {series.num_variates * horizon} rows, found {len(rows)}"
            )
        rows = rows.sort_values(["variate", "step"])
        shape = (series.num_variates, horizon)
        point = rows["point"].to_numpy(dtype=np.float64).reshape(shape)
        levels_values = np.stack([rows[c].to_numpy(dtype=np.float64).reshape(shape) for c in columns])
        return ForecastResult(point, levels_values)

    # end def


# end class
