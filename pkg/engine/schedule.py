"""
warmup-stable-decay 学习率
Author: ICO
Date: 2024-03-24"""

from error import ConfigError

from .trainConfig import TrainConfig


def wsd_lr(step: int, cfg: TrainConfig) -> float:
    """第 step 步的学习率

    warmup 段从 0 线性升到 lr (lr·step/warmup)，stable 段恒为 lr，
    decay 段线性降到 0，最后一步为 lr/decay_steps。

    Parameters
    ----------
    `step` : int
        0 ≤ step < total_steps
    `cfg` : TrainConfig

    Returns
    -------
    float
    """
    if not 0 <= step < cfg.total_steps:
        raise ConfigError("step", f"{step} outside [0, {cfg.total_steps})")
    lr = cfg.learning_rate
    if step < cfg.warmup_steps:
        return lr * step / cfg.warmup_steps
    if step < cfg.warmup_steps + cfg.stable_steps:
        return lr
    remaining = cfg.total_steps - step
    return lr * remaining / cfg.decay_steps


# end def
