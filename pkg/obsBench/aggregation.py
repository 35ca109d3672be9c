"""
归一化、低波动分流、移位几何平均、缺失填补与排名
Author: ICO
Date: 2024-03-29"""

import numpy as np
import pandas as pd
from loguru import logger

from defaultCONFIG import HyperParameterCONFIG
from error import CalculationError


def aggregate_shifted_geomean(values, epsilon: float = HyperParameterCONFIG.SHIFTED_GEOMEAN_EPSILON) -> float:
    """exp(mean(log(v + ε))) + ε

    所有值相同时几何平均就是该值，直接返回 v + 2ε，避免 exp(log(·)) 的舍入误差。

    Raises
    ------
    CalculationError
        含负值或为空
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise CalculationError("cannot aggregate an empty vector")
    if np.any(values < 0):
        raise CalculationError("shifted geometric mean needs non-negative values")
    if np.all(values == values[0]):
        return float(values[0] + epsilon + epsilon)
    return float(np.exp(np.mean(np.log(values + epsilon))) + epsilon)


# end def
def impute_invalid(values) -> np.ndarray:
    """把非有限值替换为其余有限值的算术平均

    Raises
    ------
    CalculationError
        所有值都非有限
    """
    values = np.asarray(values, dtype=np.float64)
    finite = np.isfinite(values)
    if not finite.any():
        raise CalculationError("no finite value to impute from")
    if finite.all():
        return values.copy()
    return np.where(finite, values, values[finite].mean())


# end def
def rank_models(crps_matrix: pd.DataFrame) -> pd.Series:
    """每个任务上 CRPS 最低者排名 1，并列取平均名次，再对任务求平均

    Parameters
    ----------
    `crps_matrix` : pd.DataFrame
        行为模型、列为任务

    Returns
    -------
    pd.Series
        每个模型的平均名次
    """
    if not np.all(np.isfinite(crps_matrix.to_numpy(dtype=np.float64))):
        raise CalculationError("rank table contains non-finite entries, impute first")
    return crps_matrix.rank(axis=0, method="average").mean(axis=1)


# end def
def normalize_and_split(raw: pd.DataFrame) -> tuple[pd.DataFrame, pd.DataFrame]:
    """按季节性朴素预测归一化并分出低波动集合

    同一条序列 (查询) 只要有一个任务的朴素误差为 0 或样本内分母为 0，
    整条序列的所有任务都进入低波动集合，用原始 MAE 与未归一化的 CRPS。

    Parameters
    ----------
    `raw` : pd.DataFrame
        每个 (模型, 任务) 一行，列包括 model, task_id, series_id, term, mase, crps, mae,
        naive_mase, naive_crps, naive_mae, low_variability

    Returns
    -------
    tuple[pd.DataFrame, pd.DataFrame]
        主集合 (mase、crps 已归一化) 与低波动集合
    """
    zero_naive = raw["low_variability"] | (raw["naive_mae"] == 0)
    flat_series = set(raw.loc[zero_naive, "series_id"])
    is_flat = raw["series_id"].isin(flat_series)
    main = raw.loc[~is_flat].copy()
    flat = raw.loc[is_flat].copy()
    main["split"] = "main"
    flat["split"] = "flat"
    with np.errstate(divide="ignore", invalid="ignore"):
        main["mase"] = main["mase"] / main["naive_mase"]
        main["crps"] = main["crps"] / main["naive_crps"]
    if len(flat_series):
        logger.info(f"{len(flat_series)} series routed to the low-variability split")
    return main, flat


# end def
def impute_column(frame: pd.DataFrame, column: str, by: str = "model") -> pd.DataFrame:
    """按模型分组填补非有限值"""
    frame = frame.copy()
    for name, group in frame.groupby(by, sort=True):
        values = group[column].to_numpy(dtype=np.float64)
        invalid = int((~np.isfinite(values)).sum())
        if invalid:
            logger.warning(f"{name}: imputing {invalid} non-finite {column} values with the mean of the rest")
            frame.loc[group.index, column] = impute_invalid(values)
    return frame


# end def
