"""
合成观测数据：分段线性趋势、ARMA、正弦季节项与残差
Author: ICO
Date: 2024-03-19"""

from dataclasses import asdict, dataclass, fields

import numpy as np
from loguru import logger
from scipy import signal

from defaultCONFIG import ResidualDistribution
from error import ConfigError
from numKit import Rng

from .frequency import parse_frequency
from .multivariateSeries import MultivariateSeries


@dataclass
class SynthConfig:
    num_series: int = 16
    num_variates: int = 3
    length: int = 512
    trend: bool = True
    arma: bool = True
    seasonality: bool = True
    residual_dist: str = ResidualDistribution.GAUSSIAN.value
    noise_scale: float = 0.1
    # 为 None 时每个变量随机选择周期
    period: int | None = None
    clip_quantile: float | None = 0.995
    rescale_range: tuple[float, float] = (0.0, 1.0)
    freq: str = "H"
    seed: int = 0

    def validate(self) -> "SynthConfig":
        for name in ("num_series", "num_variates"):
            if getattr(self, name) < 1:
                raise ConfigError(name, "must be >= 1")
        if self.length < 8:
            raise ConfigError("length", f"must be >= 8, got {self.length}")
        if not (self.trend or self.arma or self.seasonality):
            raise ConfigError("components", "at least one of trend, arma, seasonality must be enabled")
        if self.residual_dist not in {d.value for d in ResidualDistribution}:
            raise ConfigError("residual_dist", f"unknown distribution '{self.residual_dist}'")
        if self.noise_scale < 0:
            raise ConfigError("noise_scale", "must be >= 0")
        if self.period is not None and not 2 <= self.period <= self.length:
            raise ConfigError("period", f"must lie in [2, length], got {self.period}")
        if self.clip_quantile is not None and not 0.5 < self.clip_quantile <= 1.0:
            raise ConfigError("clip_quantile", "must lie in (0.5, 1]")
        low, high = (float(v) for v in self.rescale_range)
        if not (np.isfinite(low) and np.isfinite(high) and low < high):
            raise ConfigError("rescale_range", f"needs finite min < max, got {self.rescale_range}")
        self.rescale_range = (low, high)
        parse_frequency(self.freq)
        return self

    # end def
    def to_dict(self) -> dict:
        values = asdict(self)
        values["rescale_range"] = list(self.rescale_range)
        return values

    @classmethod
    def from_dict(cls, values: dict) -> "SynthConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"synth.{key}", "unknown key")
        values = dict(values)
        if "rescale_range" in values:
            values["rescale_range"] = tuple(values["rescale_range"])
        return cls(**values)

    # end def


# end class
def piecewise_linear_trend(length: int, rng: Rng) -> np.ndarray:
    """1~3 个断点的分段线性趋势"""
    num_breaks = int(rng.integers(1, 4))
    breaks = np.sort(rng.integers(1, length, size=num_breaks))
    slopes = rng.normal(0.0, 1.0, size=num_breaks + 1) / length
    step_slope = np.empty(length)
    edges = np.concatenate(([0], breaks, [length]))
    for i in range(num_breaks + 1):
        step_slope[edges[i] : edges[i + 1]] = slopes[i]
    return rng.normal() + np.cumsum(step_slope) * 4.0


# end def
def stationary_ar_coefficients(order: int, rng: Rng, max_tries: int = 1000) -> np.ndarray:
    """拒绝采样 AR 系数，直到特征多项式的根都在单位圆外"""
    for _ in range(max_tries):
        phi = rng.uniform(-0.9, 0.9, size=order)
        # 1 − φ1 z − … − φp z^p，np.roots 需要高次项在前
        roots = np.roots(np.concatenate((-phi[::-1], [1.0])))
        if np.all(np.abs(roots) > 1.0):
            return phi
    raise ConfigError("arma", f"no stationary AR({order}) coefficients after {max_tries} draws")


# end def
def arma_process(length: int, rng: Rng, burn_in: int = 100) -> np.ndarray:
    phi = stationary_ar_coefficients(int(rng.integers(1, 3)), rng)
    theta = rng.uniform(-0.5, 0.5, size=int(rng.integers(0, 2)))
    innovations = rng.normal(0.0, 0.3, size=length + burn_in)
    series = signal.lfilter(np.concatenate(([1.0], theta)), np.concatenate(([1.0], -phi)), innovations)
    return series[burn_in:]


# end def
def sinusoid(length: int, period: float, rng: Rng) -> np.ndarray:
    amplitude = rng.uniform(0.5, 2.0)
    phase = rng.uniform(0.0, 2.0 * np.pi)
    return amplitude * np.sin(2.0 * np.pi * np.arange(length) / period + phase)


# end def
def residuals(length: int, kind: str, scale: float, rng: Rng) -> np.ndarray:
    if scale == 0:
        return np.zeros(length)
    match ResidualDistribution(kind):
        case ResidualDistribution.GAUSSIAN:
            noise = rng.normal(size=length)
        case ResidualDistribution.STUDENT_T:
            noise = rng.normal(size=length) / np.sqrt(rng.chisquare(3.0, size=length) / 3.0)
        case ResidualDistribution.LOGNORMAL:
            noise = rng.lognormal(0.0, 0.5, size=length) - np.exp(0.125)
    # end match
    return scale * noise


# end def
def clip_and_rescale(values: np.ndarray, clip_quantile: float | None, rescale_range: tuple[float, float]) -> np.ndarray:
    """按双侧分位数裁剪后仿射映射到 rescale_range"""
    low, high = rescale_range
    if clip_quantile is not None and clip_quantile < 1.0:
        lower, upper = np.quantile(values, [1.0 - clip_quantile, clip_quantile])
        values = np.clip(values, lower, upper)
    span = values.max() - values.min()
    if span == 0:
        return np.full_like(values, low)
    scaled = (values - values.min()) / span * (high - low) + low
    return np.clip(scaled, low, high)


# end def
def generate_synthetic(cfg: SynthConfig) -> list[MultivariateSeries]:
    """按配置生成合成数据集，相同种子得到相同结果

    Parameters
    ----------
    `cfg` : SynthConfig

    Returns
    -------
    list[MultivariateSeries]
    """
    cfg.validate()
    streams = Rng(cfg.seed).spawn(cfg.num_series)
    dataset = []
    for index, rng in enumerate(streams):
        rows = []
        for _ in range(cfg.num_variates):
            value = np.zeros(cfg.length)
            if cfg.trend:
                value += piecewise_linear_trend(cfg.length, rng)
            if cfg.arma:
                value += arma_process(cfg.length, rng)
            if cfg.seasonality:
                period = cfg.period if cfg.period is not None else int(rng.integers(4, max(5, cfg.length // 4)))
                value += sinusoid(cfg.length, period, rng)
            value += residuals(cfg.length, cfg.residual_dist, cfg.noise_scale, rng)
            rows.append(clip_and_rescale(value, cfg.clip_quantile, cfg.rescale_range))
        dataset.append(MultivariateSeries(f"synthetic-{index:05d}", cfg.freq, np.stack(rows), metric_type="gauge"))
    logger.debug(f"generated {len(dataset)} synthetic series of shape {cfg.num_variates}×{cfg.length}")
    return dataset


# end def
