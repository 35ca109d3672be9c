"""
AdamW 优化器 (函数式) 与梯度裁剪
Author: ICO
Date: 2024-03-25"""

from dataclasses import dataclass, field

import numpy as np

from error import CalculationError

from .trainConfig import TrainConfig


@dataclass
class AdamWState:
    """一阶、二阶矩与已完成的更新次数"""

    step: int = 0
    m: dict[str, np.ndarray] = field(default_factory=dict)
    v: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def zeros(cls, params: dict[str, np.ndarray]) -> "AdamWState":
        return cls(0, {k: np.zeros_like(p) for k, p in params.items()}, {k: np.zeros_like(p) for k, p in params.items()})


# end class
def check_gradients(grads: dict[str, np.ndarray | None]) -> None:
    for name, grad in grads.items():
        if grad is not None and not np.all(np.isfinite(grad)):
            raise CalculationError(f"non-finite gradient for parameter '{name}'")


# end def
def clip_grad_norm(grads: dict[str, np.ndarray | None], max_norm: float | None) -> tuple[dict[str, np.ndarray | None], float]:
    """按全局范数裁剪梯度

    Returns
    -------
    tuple[dict, float]
        裁剪后的梯度与裁剪前的全局范数
    """
    check_gradients(grads)
    norm = float(np.sqrt(sum(float(np.sum(g * g)) for g in grads.values() if g is not None)))
    if max_norm is None or norm <= max_norm:
        return grads, norm
    factor = max_norm / norm
    return {k: (None if g is None else g * factor) for k, g in grads.items()}, norm


# end def
def adamw_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray | None],
    state: AdamWState,
    lr: float,
    cfg: TrainConfig,
) -> tuple[dict[str, np.ndarray], AdamWState]:
    """一次 AdamW 更新 (权重衰减与梯度解耦)

    先做 θ ← θ·(1 − lr·wd)，再减去带偏差修正的 Adam 增量。
    没有梯度的参数按梯度为 0 处理。

    Parameters
    ----------
    `params` : dict[str, np.ndarray]
    `grads` : dict[str, np.ndarray | None]
    `state` : AdamWState
    `lr` : float
    `cfg` : TrainConfig
        使用 betas、weight_decay、adam_epsilon

    Returns
    -------
    tuple[dict[str, np.ndarray], AdamWState]
        新参数与新状态，输入不被修改

    Raises
    ------
    CalculationError
        梯度含非有限值 (报出参数名)
    """
    check_gradients(grads)
    beta1, beta2 = cfg.betas
    step = state.step + 1
    correction1 = 1.0 - beta1**step
    correction2 = 1.0 - beta2**step
    new_params, new_m, new_v = {}, {}, {}
    for name, value in params.items():
        if value.shape != np.shape(state.m.get(name, value)):
            raise CalculationError(f"optimizer state for '{name}' has the wrong shape")
        grad = grads.get(name)
        grad = np.zeros_like(value) if grad is None else grad
        m = beta1 * state.m.get(name, np.zeros_like(value)) + (1.0 - beta1) * grad
        v = beta2 * state.v.get(name, np.zeros_like(value)) + (1.0 - beta2) * grad * grad
        decayed = value * (1.0 - lr * cfg.weight_decay)
        new_params[name] = decayed - lr * (m / correction1) / (np.sqrt(v / correction2) + cfg.adam_epsilon)
        new_m[name], new_v[name] = m, v
    return new_params, AdamWState(step, new_m, new_v)


# end def
