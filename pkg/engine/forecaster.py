"""
自回归蒙特卡洛预测与分位数
Author: ICO
Date: 2024-03-27"""

from typing import Sequence

import numpy as np
from loguru import logger

from backbone import forward
from causalScaler import variate_scale
from defaultCONFIG import HyperParameterCONFIG
from error import ConfigError, ShapeError
from mathTools import empirical_quantiles
from numKit import Rng
from seriesData import left_pad, padded_length
from smm import compute_params, sample

from .checkpoint import Checkpoint
from .trainer import normalize


def _streams(rng: Rng | Sequence[Rng], count: int) -> list[Rng]:
    if isinstance(rng, Rng):
        return rng.spawn(count)
    streams = list(rng)
    if len(streams) != count:
        raise ConfigError("num_samples", f"{len(streams)} rng streams given for {count} samples")
    return streams


# end def
def forecast(
    checkpoint: Checkpoint,
    context: np.ndarray,
    id_mask: np.ndarray | None,
    horizon: int,
    num_samples: int,
    rng: Rng | Sequence[Rng],
    context_weights: np.ndarray | None = None,
    max_unroll_patches: int = HyperParameterCONFIG.MAX_UNROLL_PATCHES,
) -> np.ndarray:
    """自回归抽样得到 u 条独立轨迹

    上下文只用自身计算因果统计量；每一步取最后一个 token 的混合分布，
    每条轨迹为每个变量抽 P 个值，用当前序列末尾的统计量反归一化后接到序列末尾，
    直到生成 ≥ H 个值再截断。

    Parameters
    ----------
    `checkpoint` : Checkpoint
    `context` : np.ndarray
        M×Lc，缺失为 NaN
    `id_mask` : np.ndarray | None
        M×M；None 表示所有变量同组
    `horizon` : int
        H
    `num_samples` : int
        u
    `rng` : Rng | Sequence[Rng]
        单个发生器时派生 u 条子流；也可以直接给出 u 条流
    `context_weights` : np.ndarray | None, 可选
        默认值：None (有限值处为 1)
    `max_unroll_patches` : int, 可选
        解码步数上限，默认值：256

    Returns
    -------
    np.ndarray
        u×M×H
    """
    cfg = checkpoint.model_config
    size = cfg.patch_size
    context = np.asarray(context, dtype=np.float64)
    if context.ndim == 1:
        context = context[None, :]
    if context.ndim != 2 or context.shape[1] < 1:
        raise ShapeError("context must be M×Lc with Lc >= 1", context.shape)
    if horizon < 1:
        raise ConfigError("horizon", f"must be >= 1, got {horizon}")
    if num_samples < 1:
        raise ConfigError("num_samples", f"must be >= 1, got {num_samples}")
    steps = -(-horizon // size)
    if steps > max_unroll_patches:
        raise ConfigError("horizon", f"{horizon} needs {steps} decode steps, more than the limit {max_unroll_patches}")
    variates = context.shape[0]
    weights = np.isfinite(context).astype(np.float64) if context_weights is None else np.asarray(context_weights, dtype=np.float64)
    weights = np.where(np.isfinite(context), weights, 0.0)
    id_mask = np.ones((variates, variates), dtype=bool) if id_mask is None else np.asarray(id_mask, dtype=bool)
    if id_mask.shape != (variates, variates):
        raise ShapeError("id_mask does not match context", id_mask.shape, context.shape)

    # 超过最大上下文时保留最近的窗口
    limit = cfg.max_context
    if context.shape[1] > limit:
        context, weights = context[:, -limit:], weights[:, -limit:]
    values, weights = left_pad(np.where(weights > 0, context, 0.0), weights, padded_length(context.shape[1], size))
    # 裁剪用的 s 只由上下文决定
    scale = variate_scale(values, weights, checkpoint.scaler_config.minimum_scale, checkpoint.scaler_config.variate_scale_kind)

    streams = _streams(rng, num_samples)
    params = checkpoint.tensors()
    values = np.broadcast_to(values, (num_samples,) + values.shape).copy()
    weights = np.broadcast_to(weights, (num_samples,) + weights.shape).copy()
    masks = np.broadcast_to(id_mask, (num_samples, variates, variates))
    overrides = np.broadcast_to(scale, (num_samples, variates))
    generated = []
    for _ in range(steps):
        if values.shape[-1] > cfg.max_context:
            values, weights = values[..., size:], weights[..., size:]
        normalized, stats = normalize(
            values, weights, checkpoint.scaler_config, checkpoint.global_scaling, overrides
        )
        length = values.shape[-1]
        features = forward(params, normalized, masks, cfg)
        mixture = compute_params(features[..., length - size :, :], params)
        loc, spread = stats.context_end()
        patch = np.stack([sample(mixture.select(i), streams[i], 1)[0] for i in range(num_samples)])
        patch = patch * spread[..., None] + loc[..., None]
        generated.append(patch)
        values = np.concatenate([values, patch], axis=-1)
        weights = np.concatenate([weights, np.ones_like(patch)], axis=-1)
    logger.debug(f"decoded {steps} patches for {num_samples} samples of {variates} variates")
    return np.concatenate(generated, axis=-1)[..., :horizon]


# end def
def quantiles(samples: np.ndarray, levels) -> np.ndarray:
    """每个 (变量, 步) 的经验分位数

    Parameters
    ----------
    `samples` : np.ndarray
        u×M×H
    `levels` : Sequence[float]
        (0, 1) 内的分位水平

    Returns
    -------
    np.ndarray
        len(levels)×M×H
    """
    levels = np.asarray(levels, dtype=np.float64)
    if levels.size == 0:
        raise ConfigError("levels", "at least one quantile level is required")
    if np.any((levels <= 0) | (levels >= 1)):
        raise ConfigError("levels", f"levels must lie in (0, 1), got {levels.tolist()}")
    samples = np.asarray(samples, dtype=np.float64)
    if samples.shape[0] < 1:
        raise ShapeError("need at least one sample", samples.shape)
    return empirical_quantiles(samples, levels, axis=0)


# end def
def point_forecast(samples: np.ndarray) -> np.ndarray:
    """样本中位数"""
    return np.median(np.asarray(samples, dtype=np.float64), axis=0)


# end def
