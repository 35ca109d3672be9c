"""
数组检查工具
Author: ICO
Date: 2024-03-08
"""

import numpy as np


def binary_check(weights: np.ndarray) -> bool:
    """检查权重是否只包含 0 和 1

    Parameters
    ----------
    `weights` : np.ndarray

    Returns
    -------
    bool
    只含 0/1 则为 True，否则为 False
    """
    weights = np.asarray(weights)
    return bool(np.all((weights == 0.0) | (weights == 1.0)))


# end def
def finite_check(values: np.ndarray) -> bool:
    """检查数组是否全为有限值 (不含 NaN 与 inf)"""
    return bool(np.all(np.isfinite(np.asarray(values, dtype=np.float64))))


# end def
def equivalence_check(mask: np.ndarray) -> bool:
    """检查布尔矩阵是否为等价关系 (对称、自反、传递)

    Parameters
    ----------
    `mask` : np.ndarray
        M×M 布尔矩阵

    Returns
    -------
    bool
    """
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or mask.shape[0] != mask.shape[1]:
        return False
    if not np.all(np.diag(mask)) or not np.array_equal(mask, mask.T):
        return False
    # 传递性：同一行为 True 的列，其所在行必须与该行完全一致
    for row in mask:
        members = np.flatnonzero(row)
        if not np.all(mask[np.ix_(members, members)]):
            return False
    return True


# end def
