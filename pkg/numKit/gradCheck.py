"""
中心差分梯度检查
Author: ICO
Date: 2024-03-07"""

from typing import Callable, Mapping

import numpy as np
from loguru import logger

from error import CalculationError

from .rng import Rng
from .tensor import Tensor, backward


def _scalar(value: Tensor) -> float:
    result = value.item()
    if not np.isfinite(result):
        raise CalculationError("non-finite value during finite-difference check")
    return result


# end def
def _relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(1.0, abs(analytic))


# end def
def _pick_coordinates(size: int, max_coords: int | None, rng: Rng | None) -> np.ndarray:
    if max_coords is None or size <= max_coords:
        return np.arange(size)
    rng = rng if rng is not None else Rng(0)
    return np.sort(rng.permutation(size)[:max_coords])


# end def
def finite_difference_check(
    f: Callable[[Tensor], Tensor],
    x: Tensor | np.ndarray,
    eps: float = 1e-6,
    max_coords: int | None = None,
    rng: Rng | None = None,
) -> float:
    """用中心差分检查反向传播的梯度

    Parameters
    ----------
    `f` : Callable[[Tensor], Tensor]
        确定性的标量函数
    `x` : Tensor | np.ndarray
        检查点
    `eps` : float, 可选
        差分步长，默认值：1e-6
    `max_coords` : int | None, 可选
        最多抽查的坐标数，默认值：None (全部)

    Returns
    -------
    float
        max |analytic − numeric| / max(1, |analytic|)
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    base = np.array(x.data if isinstance(x, Tensor) else x, dtype=np.float64)
    leaf = Tensor(base, requires_grad=True)
    loss = f(leaf)
    _scalar(loss)
    if loss.requires_grad:
        backward(loss)
    # 常数函数与输入无连接，解析梯度为 0
    analytic = leaf.grad if leaf.grad is not None else np.zeros(base.shape)

    worst = 0.0
    for index in _pick_coordinates(base.size, max_coords, rng):
        plus = base.copy()
        minus = base.copy()
        plus.flat[index] += eps
        minus.flat[index] -= eps
        numeric = (_scalar(f(Tensor(plus))) - _scalar(f(Tensor(minus)))) / (2.0 * eps)
        worst = max(worst, _relative_error(float(analytic.flat[index]), numeric))
    return worst


# end def
def check_parameters(
    loss_fn: Callable[[Mapping[str, Tensor]], Tensor],
    params: Mapping[str, np.ndarray],
    eps: float = 1e-6,
    max_coords: int | None = 8,
    rng: Rng | None = None,
) -> dict[str, float]:
    """对一组命名参数逐个做中心差分检查

    Parameters
    ----------
    `loss_fn` : Callable
        输入参数字典，返回标量损失
    `params` : Mapping[str, np.ndarray]
        参数取值
    `max_coords` : int | None, 可选
        每个参数抽查的坐标数，默认值：8

    Returns
    -------
    dict[str, float]
        每个参数的最大相对误差
    """
    rng = rng if rng is not None else Rng(0)
    values = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    leaves = {name: Tensor(value, requires_grad=True) for name, value in values.items()}
    loss = loss_fn(leaves)
    _scalar(loss)
    backward(loss)

    errors: dict[str, float] = {}
    for name, value in values.items():
        analytic = leaves[name].grad if leaves[name].grad is not None else np.zeros(value.shape)
        worst = 0.0
        for index in _pick_coordinates(value.size, max_coords, rng):
            shifted = []
            for sign in (1.0, -1.0):
                trial = value.copy()
                trial.flat[index] += sign * eps
                inputs = {k: Tensor(trial if k == name else v) for k, v in values.items()}
                shifted.append(_scalar(loss_fn(inputs)))
            numeric = (shifted[0] - shifted[1]) / (2.0 * eps)
            worst = max(worst, _relative_error(float(analytic.flat[index]), numeric))
        errors[name] = worst
        logger.debug(f"gradcheck {name}: {worst:.3e}")
    return errors


# end def
