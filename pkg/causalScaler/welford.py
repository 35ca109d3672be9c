"""
Welford 在线算法计算因果统计量 (向量化)
Author: ICO
Date: 2024-03-09"""

import numpy as np

from error import CalculationError, ShapeError
from mathTools import binary_check


def compute_causal_statistics(
    data: np.ndarray,
    weights: np.ndarray,
    minimum_scale: float,
) -> tuple[np.ndarray, np.ndarray]:
    """计算每个时间步的因果均值与因果尺度

    只使用 ≤ t 的数据；权重为 0 的位置不参与统计。
    均值分母下限为 1，方差分母为 max(Σw − 1, 1) (Bessel 修正)。

    Parameters
    ----------
    `data` : np.ndarray
        ...×L
    `weights` : np.ndarray
        与 data 同形状，取值 0/1
    `minimum_scale` : float
        加到方差上的下限

    Returns
    -------
    tuple[np.ndarray, np.ndarray]
        因果均值 μ̂_t，因果尺度 ŝ_t = sqrt(var_t + minimum_scale)
    """
    data = np.asarray(data, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if data.shape != weights.shape:
        raise ShapeError("data and weights differ in shape", data.shape, weights.shape)
    if data.ndim == 0 or data.shape[-1] == 0 or data.size == 0:
        raise ShapeError("empty series", data.shape)
    if not binary_check(weights):
        raise CalculationError("weights must be 0 or 1")
    if minimum_scale < 0:
        raise CalculationError(f"minimum_scale must be non-negative, got {minimum_scale}")
    # 填充位置可能是 NaN，先置零，乘以 0 权重后不影响结果
    data = np.where(weights > 0, data, 0.0)

    weighted_data = weights * data
    cum_weights = np.cumsum(weights, axis=-1)
    cum_values = np.cumsum(weighted_data, axis=-1)
    denominator = np.maximum(cum_weights, 1.0)
    causal_means = cum_values / denominator

    # Welford 修正项：当前值与上一步均值之差
    shifted_means = np.zeros_like(causal_means)
    shifted_means[..., 1:] = causal_means[..., :-1]
    delta = data - shifted_means

    # 二阶矩累加器
    increment = delta * (data - causal_means) * weights
    m_2 = np.cumsum(increment, axis=-1)

    causal_variance = m_2 / np.maximum(denominator - 1.0, 1.0)
    # 累加误差可能带来极小的负数
    causal_scale = np.sqrt(np.maximum(causal_variance, 0.0) + minimum_scale)
    return causal_means, causal_scale


# end def
