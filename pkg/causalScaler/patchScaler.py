"""
基于 patch 的因果实例归一化
Author: ICO
Date: 2024-03-10"""

from dataclasses import asdict, dataclass

import numpy as np

from defaultCONFIG import HyperParameterCONFIG
from error import ConfigError, ShapeError

from .clipping import clip_scales, variate_scale
from .welford import compute_causal_statistics


@dataclass
class ScalerConfig:
    minimum_scale: float = HyperParameterCONFIG.MINIMUM_SCALE
    kappa: float = HyperParameterCONFIG.KAPPA
    patch_size: int = HyperParameterCONFIG.PATCH_SIZE
    clip_floor: float = HyperParameterCONFIG.CLIP_FLOOR
    variate_scale_kind: str = "std"

    def validate(self) -> "ScalerConfig":
        # minimum_scale 允许为 0 (关闭下限，用于尺度等变检查)
        if self.minimum_scale < 0:
            raise ConfigError("minimum_scale", "must be >= 0")
        if self.kappa < 0:
            raise ConfigError("kappa", "must be >= 0")
        if int(self.patch_size) != self.patch_size or self.patch_size < 1:
            raise ConfigError("patch_size", "must be a positive integer")
        if self.clip_floor < 0:
            raise ConfigError("clip_floor", "must be >= 0")
        if self.variate_scale_kind not in ("std", "variance"):
            raise ConfigError("variate_scale_kind", "must be 'std' or 'variance'")
        return self

    # end def
    def to_dict(self) -> dict:
        return asdict(self)


# end class
@dataclass(frozen=True)
class CausalStats:
    """因果统计量

    `means`、`scales` 为每个时间步的 μ̂_t 与裁剪后的 ŝ_t，
    `variate_scale` 为每个变量的 s。
    """

    means: np.ndarray
    scales: np.ndarray
    variate_scale: np.ndarray
    patch_size: int

    @property
    def patch_loc(self) -> np.ndarray:
        """每个 patch 末尾时间步的均值，...×(L/P)"""
        return self.means[..., self.patch_size - 1 :: self.patch_size]

    @property
    def patch_scale(self) -> np.ndarray:
        return self.scales[..., self.patch_size - 1 :: self.patch_size]

    def context_end(self) -> tuple[np.ndarray, np.ndarray]:
        """最后一个时间步的 (μ̂, ŝ)"""
        return self.means[..., -1], self.scales[..., -1]

    # end def


# end class
def _check_patches(data: np.ndarray, patch_size: int) -> None:
    if data.shape[-1] % patch_size != 0:
        raise ShapeError(f"length is not divisible by patch size {patch_size}", data.shape)


# end def
def _apply(data: np.ndarray, stats: CausalStats) -> np.ndarray:
    loc = np.repeat(stats.patch_loc, stats.patch_size, axis=-1)
    scale = np.repeat(stats.patch_scale, stats.patch_size, axis=-1)
    # 关闭下限与裁剪时尺度可能为 0，此时残差也为 0
    return np.divide(data - loc, scale, out=np.zeros_like(data), where=scale > 0)


# end def
def normalize_patches(
    data: np.ndarray,
    weights: np.ndarray,
    cfg: ScalerConfig,
    scale_override: np.ndarray | None = None,
) -> tuple[np.ndarray, CausalStats]:
    """因果 patch 归一化

    patch p 内所有时间步共享第 (p+1)P − 1 步的 μ̂ 与裁剪后的 ŝ。

    Parameters
    ----------
    `data` : np.ndarray
        ...×L，L 必须能被 P 整除 (调用方先做左填充)
    `weights` : np.ndarray
        与 data 同形状，取值 0/1
    `cfg` : ScalerConfig
    `scale_override` : np.ndarray | None, 可选
        外部给定的 s (推理时只用上下文计算)，默认值：None

    Returns
    -------
    tuple[np.ndarray, CausalStats]
        归一化结果与用于反归一化的统计量
    """
    data = np.asarray(data, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    _check_patches(data, cfg.patch_size)
    means, scales = compute_causal_statistics(data, weights, cfg.minimum_scale)
    if scale_override is None:
        scale_override = variate_scale(data, weights, cfg.minimum_scale, cfg.variate_scale_kind)
    clipped = clip_scales(scales, scale_override, cfg.kappa, cfg.clip_floor)
    stats = CausalStats(means, clipped, np.asarray(scale_override, dtype=np.float64), cfg.patch_size)
    return _apply(np.where(weights > 0, data, 0.0), stats), stats


# end def
def normalize_global(data: np.ndarray, weights: np.ndarray, cfg: ScalerConfig) -> tuple[np.ndarray, CausalStats]:
    """非因果的全局归一化 (消融对照)：所有时间步共享整条序列的均值与尺度"""
    data = np.asarray(data, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    _check_patches(data, cfg.patch_size)
    masked = np.where(weights > 0, data, 0.0)
    count = np.maximum(weights.sum(axis=-1), 1.0)
    mean = (weights * masked).sum(axis=-1) / count
    scale = variate_scale(masked, weights, cfg.minimum_scale, "std")
    shape = data.shape
    stats = CausalStats(
        np.broadcast_to(mean[..., None], shape).copy(),
        np.broadcast_to(scale[..., None], shape).copy(),
        scale,
        cfg.patch_size,
    )
    return _apply(masked, stats), stats


# end def
def denormalize(values: np.ndarray, stats_at_context_end: tuple[np.ndarray, np.ndarray]) -> np.ndarray:
    """x·ŝ + μ̂，统计量取自上下文最后一个时间步

    Parameters
    ----------
    `values` : np.ndarray
        ...×H
    `stats_at_context_end` : tuple[np.ndarray, np.ndarray]
        每个变量的 (μ̂, ŝ)

    Returns
    -------
    np.ndarray
        ...×H
    """
    loc, scale = (np.asarray(v, dtype=np.float64) for v in stats_at_context_end)
    values = np.asarray(values, dtype=np.float64)
    if loc.shape != values.shape[:-1] or scale.shape != values.shape[:-1]:
        raise ShapeError("stats do not match values", values.shape, loc.shape)
    return values * scale[..., None] + loc[..., None]


# end def
def scale_targets(data: np.ndarray, stats: CausalStats) -> np.ndarray:
    """把第 p+1 个 patch 的真值换算到第 p 个 patch 末尾统计量的空间

    Returns
    -------
    np.ndarray
        ...×(L − P)，对应时间步 P..L−1
    """
    size = stats.patch_size
    loc = np.repeat(stats.patch_loc[..., :-1], size, axis=-1)
    scale = np.repeat(stats.patch_scale[..., :-1], size, axis=-1)
    target = np.asarray(data, dtype=np.float64)[..., size:]
    return np.divide(target - loc, scale, out=np.zeros_like(target), where=scale > 0)


# end def
