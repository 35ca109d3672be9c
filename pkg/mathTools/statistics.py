"""
统计工具
Author: ICO
Date: 2024-03-08"""

import numpy as np


def weighted_std(data: np.ndarray, weights: np.ndarray, ddof: int = 1) -> np.ndarray:
    """沿最后一个轴的加权标准差 (权重为 0/1)

    Parameters
    ----------
    `data` : np.ndarray
        ...×L
    `weights` : np.ndarray
        与 data 同形状
    `ddof` : int, 可选
        自由度修正，默认值：1 (Bessel 修正)，分母下限为 1

    Returns
    -------
    np.ndarray
        ...
    """
    count = weights.sum(axis=-1)
    mean = (weights * data).sum(axis=-1) / np.maximum(count, 1.0)
    variance = (weights * (data - mean[..., None]) ** 2).sum(axis=-1) / np.maximum(count - ddof, 1.0)
    return np.sqrt(variance)


# end def
def empirical_quantiles(samples: np.ndarray, levels, axis: int = 0) -> np.ndarray:
    """经验分位数，次序统计量之间线性插值

    Returns
    -------
    np.ndarray
        第一个轴对应 levels
    """
    return np.quantile(np.asarray(samples, dtype=np.float64), np.asarray(levels, dtype=np.float64), axis=axis, method="linear")


# end def
def autocorrelation(values: np.ndarray, lag: int) -> float:
    """滞后 lag 的自相关 (滞后对的 Pearson 相关系数)"""
    values = np.asarray(values, dtype=np.float64)
    if lag <= 0 or lag >= len(values) - 1:
        raise ValueError(f"lag {lag} out of range for length {len(values)}")
    head, tail = values[:-lag], values[lag:]
    return float(np.corrcoef(head, tail)[0, 1])


# end def
