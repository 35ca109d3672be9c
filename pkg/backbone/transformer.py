"""
仅解码器的 patch Transformer 主干
Author: ICO
Date: 2024-03-14"""

from typing import Mapping

import numpy as np
from loguru import logger

from defaultCONFIG import AttentionKind, AttentionMode
from error import ShapeError
from numKit import Rng, Tensor, as_tensor, matmul

from .attention import AttentionMasks, attention_block
from .layers import patch_embed, rmsnorm
from .modelConfig import ModelConfig

_BLOCK_MATRICES = ("attn.wq", "attn.wk", "attn.wv", "attn.wo")


def block_kinds(cfg: ModelConfig, mode: str | None = None) -> list[AttentionKind]:
    """每一层使用的注意力类型

    Parameters
    ----------
    `cfg` : ModelConfig
    `mode` : str | None, 可选
        覆盖 `cfg.attention_mode`，默认值：None

    Returns
    -------
    list[AttentionKind]
        长度为 num_layers
    """
    mode = AttentionMode(mode or cfg.attention_mode)
    if mode is AttentionMode.FULL:
        return [AttentionKind.FULL] * cfg.num_layers
    if not cfg.variate_attention:
        return [AttentionKind.TIMEWISE] * cfg.num_layers

    segment = cfg.time_per_variate_ratio + 1
    complete = (cfg.num_layers // segment) * segment
    variate_slot = 0 if cfg.variate_layer_first else segment - 1
    kinds = []
    for i in range(cfg.num_layers):
        if i < complete and i % segment == variate_slot:
            kinds.append(AttentionKind.VARIATEWISE)
        else:
            kinds.append(AttentionKind.TIMEWISE)
    return kinds


# end def
def parameter_shapes(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """有序的参数名与形状，检查点按这个顺序存储"""
    d, p, f = cfg.embed_dim, cfg.patch_size, cfg.mlp_dim
    shapes: dict[str, tuple[int, ...]] = {"patch_embed.weight": (p, d), "patch_embed.bias": (d,)}
    for i in range(cfg.num_layers):
        prefix = f"blocks.{i}"
        shapes[f"{prefix}.attn_norm"] = (d,)
        for name in _BLOCK_MATRICES:
            shapes[f"{prefix}.{name}"] = (d, d)
        shapes[f"{prefix}.ffn_norm"] = (d,)
        shapes[f"{prefix}.ffn.w_gate"] = (d, f)
        shapes[f"{prefix}.ffn.w_up"] = (d, f)
        shapes[f"{prefix}.ffn.w_down"] = (f, d)
    shapes["final_norm"] = (d,)
    shapes["unembed.weight"] = (d, p * cfg.feature_dim)
    shapes["unembed.bias"] = (p * cfg.feature_dim,)
    for name in ("nu", "mu", "tau", "pi"):
        shapes[f"head.{name}.weight"] = (cfg.num_components, cfg.feature_dim)
        shapes[f"head.{name}.bias"] = (cfg.num_components,)
    return shapes


# end def
def init_params(cfg: ModelConfig, rng: Rng) -> dict[str, np.ndarray]:
    """初始化参数：矩阵 N(0, init_std²)，偏置为 0，归一化增益为 1"""
    params = {}
    for name, shape in parameter_shapes(cfg).items():
        if name.endswith("norm"):
            params[name] = np.ones(shape)
        elif name.endswith("bias"):
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.normal(0.0, cfg.init_std, shape)
    logger.debug(f"initialised {count_parameters(params)} parameters in {len(params)} tensors")
    return params


# end def
def count_parameters(params: Mapping[str, np.ndarray | Tensor]) -> int:
    return int(sum(np.prod(np.shape(v.data if isinstance(v, Tensor) else v)) for v in params.values()))


# end def
def forward(params: Mapping[str, Tensor], normalized, id_mask, cfg: ModelConfig) -> Tensor:
    """主干前向计算

    Parameters
    ----------
    `params` : Mapping[str, Tensor]
        参数，键与 `parameter_shapes` 一致
    `normalized` : array_like | Tensor
        M×L 或 B×M×L，已做因果归一化，L 为 P 的整数倍
    `id_mask` : array_like
        M×M 或 B×M×M

    Returns
    -------
    Tensor
        M×L×D_h 或 B×M×L×D_h；位置 pP+j 的特征由第 p 个 token 产生，
        用于预测时间步 (p+1)P+j
    """
    x = as_tensor(normalized)
    id_mask = np.asarray(id_mask, dtype=bool)
    unbatched = x.ndim == 2
    if unbatched:
        x = x.reshape((1,) + x.shape)
        id_mask = id_mask[None]
    if x.ndim != 3:
        raise ShapeError("forward expects M×L or B×M×L input", x.shape)
    batch, variates, length = x.shape
    if id_mask.shape != (batch, variates, variates):
        raise ShapeError("id_mask does not match input", id_mask.shape, x.shape)
    if length % cfg.patch_size:
        raise ShapeError(f"length is not divisible by patch size {cfg.patch_size}", x.shape)
    num_patches = length // cfg.patch_size
    if num_patches > cfg.max_patches:
        raise ShapeError(f"{num_patches} patches exceed the maximum of {cfg.max_patches}", x.shape)

    h = patch_embed(x, params["patch_embed.weight"], params["patch_embed.bias"])
    masks = AttentionMasks.build(num_patches, id_mask)
    for i, kind in enumerate(block_kinds(cfg)):
        h = attention_block(h, kind, masks, params, f"blocks.{i}", cfg.num_heads, cfg.rope_base)
    h = rmsnorm(h, params["final_norm"])
    features = matmul(h, params["unembed.weight"]) + params["unembed.bias"]
    features = features.reshape(batch, variates, length, cfg.feature_dim)
    return features.reshape(variates, length, cfg.feature_dim) if unbatched else features


# end def
