"""
评测指标：季节性朴素预测、MASE、加权分位数损失
Author: ICO
Date: 2024-03-28"""

import numpy as np

from defaultCONFIG import HyperParameterCONFIG
from error import ConfigError, LowVariabilityError, ShapeError


def seasonal_naive(history: np.ndarray, m: int, horizon: int) -> np.ndarray:
    """重复最后一个季节：ŷ_{T+h} = y_{T+h−m·ceil(h/m)}

    Parameters
    ----------
    `history` : np.ndarray
        ...×T
    `m` : int
        季节周期
    `horizon` : int

    Returns
    -------
    np.ndarray
        ...×H
    """
    history = np.asarray(history, dtype=np.float64)
    if m < 1:
        raise ConfigError("season_length", f"must be >= 1, got {m}")
    if history.shape[-1] < m:
        raise ShapeError(f"history shorter than the season length {m}", history.shape)
    last_season = history[..., history.shape[-1] - m :]
    return last_season[..., np.arange(horizon) % m]


# end def
def insample_naive_mae(train: np.ndarray, m: int) -> float:
    """训练段上 |Y_t − Y_{t−m}| 的均值"""
    train = np.asarray(train, dtype=np.float64)
    if train.shape[-1] <= m:
        raise ShapeError(f"training split must be longer than the season length {m}", train.shape)
    return float(np.mean(np.abs(train[..., m:] - train[..., :-m])))


# end def
def mae(forecast: np.ndarray, actual: np.ndarray) -> float:
    return float(np.mean(np.abs(np.asarray(forecast, dtype=np.float64) - np.asarray(actual, dtype=np.float64))))


# end def
def mase(forecast: np.ndarray, actual: np.ndarray, train_history: np.ndarray, m: int) -> float:
    """MAE / 训练段季节性朴素 MAE

    Raises
    ------
    LowVariabilityError
        训练段季节性朴素 MAE 为 0
    """
    denominator = insample_naive_mae(train_history, m)
    if denominator == 0:
        raise LowVariabilityError()
    return mae(forecast, actual) / denominator


# end def
def crps_wql(quantile_forecasts: np.ndarray, actual: np.ndarray, levels=HyperParameterCONFIG.CRPS_LEVELS) -> float:
    """以加权分位数损失近似 CRPS

    每个水平 q：2·Σ (q·(y−ŷ_q)⁺ + (1−q)·(ŷ_q−y)⁺) / Σ|y|，再对水平求平均。
    Σ|y| = 0 时返回非有限值，由聚合阶段填补。

    Parameters
    ----------
    `quantile_forecasts` : np.ndarray
        len(levels)×...，与 actual 形状对齐
    `actual` : np.ndarray
    `levels` : Sequence[float]

    Returns
    -------
    float
    """
    forecasts = np.asarray(quantile_forecasts, dtype=np.float64)
    actual = np.asarray(actual, dtype=np.float64)
    levels = np.asarray(levels, dtype=np.float64)
    if forecasts.shape[0] != levels.size or forecasts.shape[1:] != actual.shape:
        raise ShapeError("one quantile forecast per level is required", forecasts.shape, actual.shape)
    if np.any(np.diff(levels) <= 0) or np.any((levels <= 0) | (levels >= 1)):
        raise ConfigError("levels", "levels must be strictly increasing inside (0, 1)")
    scale = np.abs(actual).sum()
    diff = actual[None] - forecasts
    q = levels.reshape((-1,) + (1,) * actual.ndim)
    losses = (q * np.maximum(diff, 0.0) + (1.0 - q) * np.maximum(-diff, 0.0)).reshape(levels.size, -1).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(np.mean(2.0 * losses / scale))


# end def
