"""
多变量时间序列
Author: ICO
Date: 2024-03-18"""

from dataclasses import dataclass, field

import numpy as np

from basicTyping import Array2D, WeightMask
from error import DataFormatError
from mathTools import binary_check

from .frequency import FrequencySpec, parse_frequency


@dataclass(eq=False)
class MultivariateSeries:
    """同一查询返回的一组相关变量

    Parameters
    ----------
    `id` : str
        序列标识
    `freq` : str
        频率代码，例如 `H` 或 `5T`
    `values` : Array2D
        M×L，缺失值为 NaN
    `weights` : WeightMask, 可选
        M×L 的 0/1 权重，默认值：有限值处为 1，NaN 处为 0
    `start` : str | None, 可选
        起始时间戳
    `metric_type` : str | None, 可选
        `count`、`gauge` 或 `rate`，决定加载时的缺失值填补方式
    """

    id: str
    freq: str
    values: Array2D
    weights: WeightMask | None = None
    start: str | None = None
    metric_type: str | None = None
    frequency: FrequencySpec = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[None, :]
        if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
            raise DataFormatError(f"values must be a non-empty M×L array, got shape {values.shape}", field="values")
        if self.weights is None:
            weights = np.isfinite(values).astype(np.float64)
        else:
            weights = np.asarray(self.weights, dtype=np.float64)
            if weights.ndim == 1:
                weights = weights[None, :]
        if weights.shape != values.shape:
            raise DataFormatError(f"weights shape {weights.shape} differs from values {values.shape}", field="weights")
        if not binary_check(weights):
            raise DataFormatError("weights must be 0 or 1", field="weights")
        # 非有限值不能带权重
        weights = np.where(np.isfinite(values), weights, 0.0)
        self.values = values
        self.weights = weights
        self.frequency = parse_frequency(self.freq)

    # end def
    @property
    def num_variates(self) -> int:
        return self.values.shape[0]

    @property
    def length(self) -> int:
        return self.values.shape[1]

    def window(self, start: int, stop: int) -> "MultivariateSeries":
        """时间轴切片 [start, stop)"""
        return MultivariateSeries(
            self.id,
            self.freq,
            self.values[:, start:stop].copy(),
            self.weights[:, start:stop].copy(),
            self.start,
            self.metric_type,
        )

    # end def
    def same_as(self, other: "MultivariateSeries") -> bool:
        """逐字段比较，NaN 与 NaN 视为相等"""
        return (
            self.id == other.id
            and self.frequency == other.frequency
            and self.start == other.start
            and self.metric_type == other.metric_type
            and np.array_equal(self.values, other.values, equal_nan=True)
            and np.array_equal(self.weights, other.weights)
        )

    # end def


# end class
