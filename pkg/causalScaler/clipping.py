"""
尺度裁剪与整条序列的尺度
Author: ICO
Date: 2024-03-09"""

import numpy as np

from error import CalculationError, ConfigError
from mathTools import weighted_std


def variate_scale(data: np.ndarray, weights: np.ndarray, minimum_scale: float, kind: str = "std") -> np.ndarray:
    """整条变量序列的尺度 s，用于裁剪因果尺度

    与因果尺度使用同一个下限：s = sqrt(var + minimum_scale)，
    `kind` 为 "variance" 时返回 var + minimum_scale。

    Parameters
    ----------
    `data` : np.ndarray
        ...×L
    `weights` : np.ndarray
        与 data 同形状
    `minimum_scale` : float
    `kind` : str, 可选
        "std" 或 "variance"，默认值："std"

    Returns
    -------
    np.ndarray
        ...
    """
    variance = weighted_std(np.where(weights > 0, data, 0.0), weights) ** 2
    match kind:
        case "std":
            return np.sqrt(variance + minimum_scale)
        case "variance":
            return variance + minimum_scale
        case _:
            raise ConfigError("variate_scale_kind", f"unknown kind '{kind}'")
    # end match


# end def
def clip_scales(scales: np.ndarray, variate_scale: np.ndarray, kappa: float, floor: float = 0.1) -> np.ndarray:
    """把因果尺度裁剪到 [max(floor, s·10^−κ), s·10^κ]

    Parameters
    ----------
    `scales` : np.ndarray
        ...×L
    `variate_scale` : np.ndarray
        ...，每个变量一个 s
    `kappa` : float
        κ = ∞ 时不裁剪
    `floor` : float, 可选
        下界的下限，默认值：0.1

    Returns
    -------
    np.ndarray
        裁剪后的尺度
    """
    if kappa < 0:
        raise CalculationError(f"kappa must be non-negative, got {kappa}")
    variate_scale = np.asarray(variate_scale, dtype=np.float64)
    if np.any(~np.isfinite(variate_scale)) or np.any(variate_scale < 0):
        raise CalculationError("variate scale must be finite and non-negative")
    if np.isinf(kappa):
        return np.asarray(scales, dtype=np.float64).copy()
    factor = 10.0**kappa
    lower = np.maximum(floor, variate_scale / factor)[..., None]
    upper = (variate_scale * factor)[..., None]
    return np.clip(scales, lower, upper)


# end def
