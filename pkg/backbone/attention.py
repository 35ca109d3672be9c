"""
时间维、变量维与全注意力块
Author: ICO
Date: 2024-03-13"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from basicTyping import BoolMask
from defaultCONFIG import AttentionKind, HyperParameterCONFIG
from error import CalculationError, ShapeError
from mathTools import equivalence_check
from numKit import Tensor, mac_tag, matmul, softmax, swap_last, transpose, where

from .layers import rmsnorm, rope_angles, rope_rotate, swiglu_ffn


@dataclass(frozen=True)
class AttentionMasks:
    """一个批次共用的注意力掩码

    Parameters
    ----------
    `causal` : BoolMask
        T×T，下三角 (含对角线)
    `id_mask` : BoolMask
        B×M×M，同组变量为 True
    """

    causal: BoolMask
    id_mask: BoolMask

    @classmethod
    def build(cls, num_patches: int, id_mask: BoolMask) -> "AttentionMasks":
        id_mask = np.asarray(id_mask, dtype=bool)
        if id_mask.ndim != 3 or id_mask.shape[-1] != id_mask.shape[-2]:
            raise ShapeError("id_mask must be B×M×M", id_mask.shape)
        for item in np.unique(id_mask, axis=0):
            if not equivalence_check(item):
                raise CalculationError("id_mask does not group variates consistently")
        return cls(np.tril(np.ones((num_patches, num_patches), dtype=bool)), id_mask)

    # end def
    def full(self) -> np.ndarray:
        """B×(M·T)×(M·T)：同组且键的时间不晚于查询"""
        variates = self.id_mask.shape[-1]
        patches = self.causal.shape[0]
        joint = self.id_mask[:, :, None, :, None] & self.causal[None, None, :, None, :]
        return np.broadcast_to(joint, (self.id_mask.shape[0], variates, patches, variates, patches)).reshape(
            self.id_mask.shape[0], variates * patches, variates * patches
        )

    # end def


# end class
def _split_heads(x: Tensor, num_heads: int) -> Tensor:
    # ...×S×D -> ...×H×S×d
    head_dim = x.shape[-1] // num_heads
    x = x.reshape(x.shape[:-1] + (num_heads, head_dim))
    n = x.ndim
    return transpose(x, tuple(range(n - 3)) + (n - 2, n - 3, n - 1))


# end def
def _merge_heads(x: Tensor) -> Tensor:
    n = x.ndim
    x = transpose(x, tuple(range(n - 3)) + (n - 2, n - 3, n - 1))
    return x.reshape(x.shape[:-2] + (x.shape[-2] * x.shape[-1],))


# end def
def multi_head_attention(
    seq: Tensor,
    params: Mapping[str, Tensor],
    prefix: str,
    num_heads: int,
    mask: np.ndarray,
    positions: np.ndarray | None = None,
    rope_base: float = HyperParameterCONFIG.ROPE_BASE,
) -> Tensor:
    """缩放点积多头注意力

    Parameters
    ----------
    `seq` : Tensor
        ...×S×D
    `mask` : np.ndarray
        可广播到 ...×H×S×S 的布尔掩码，True 表示可以关注
    `positions` : np.ndarray | None, 可选
        S 个位置；为 None 时不使用旋转位置编码，默认值：None
    """
    q = _split_heads(matmul(seq, params[f"{prefix}.wq"]), num_heads)
    k = _split_heads(matmul(seq, params[f"{prefix}.wk"]), num_heads)
    v = _split_heads(matmul(seq, params[f"{prefix}.wv"]), num_heads)
    if positions is not None:
        cos, sin = rope_angles(positions, q.shape[-1], rope_base)
        q, k = rope_rotate(q, cos, sin), rope_rotate(k, cos, sin)

    mask = np.asarray(mask, dtype=bool)
    if not np.all(mask.any(axis=-1)):
        raise CalculationError("attention mask has a query with no attendable key")
    with mac_tag("attention"):
        logits = matmul(q, swap_last(k)) * (1.0 / np.sqrt(q.shape[-1]))
        full_mask = np.broadcast_to(mask, logits.shape)
        weights = softmax(where(full_mask, logits, HyperParameterCONFIG.MASK_VALUE))
        out = matmul(weights, v)
    return matmul(_merge_heads(out), params[f"{prefix}.wo"])


# end def
def attention_block(
    x: Tensor,
    kind: AttentionKind,
    masks: AttentionMasks,
    params: Mapping[str, Tensor],
    prefix: str,
    num_heads: int,
    rope_base: float = HyperParameterCONFIG.ROPE_BASE,
) -> Tensor:
    """前置归一化的残差注意力块 + 残差 SwiGLU 前馈

    Parameters
    ----------
    `x` : Tensor
        B×M×T×D
    `kind` : AttentionKind
        时间维 (因果 + RoPE)、变量维 (按 id_mask，双向，无位置编码) 或全注意力
    `prefix` : str
        参数名前缀，例如 `blocks.0`

    Returns
    -------
    Tensor
        B×M×T×D
    """
    if x.ndim != 4:
        raise ShapeError("attention block expects B×M×T×D", x.shape)
    batch, variates, patches, dim = x.shape
    h = rmsnorm(x, params[f"{prefix}.attn_norm"])
    attn_prefix = f"{prefix}.attn"

    match kind:
        case AttentionKind.TIMEWISE:
            attended = multi_head_attention(
                h, params, attn_prefix, num_heads, masks.causal, np.arange(patches), rope_base
            )
        case AttentionKind.VARIATEWISE:
            seq = transpose(h, (0, 2, 1, 3))
            mask = masks.id_mask[:, None, None, :, :]
            attended = transpose(multi_head_attention(seq, params, attn_prefix, num_heads, mask), (0, 2, 1, 3))
        case AttentionKind.FULL:
            seq = h.reshape(batch, 1, variates * patches, dim)
            positions = np.tile(np.arange(patches), variates)
            mask = masks.full()[:, None, None, :, :]
            attended = multi_head_attention(seq, params, attn_prefix, num_heads, mask, positions, rope_base)
            attended = attended.reshape(batch, variates, patches, dim)
        case _:
            raise ValueError(f"unknown attention kind {kind}")
    # end match

    x = x + attended
    ffn = swiglu_ffn(
        rmsnorm(x, params[f"{prefix}.ffn_norm"]),
        params[f"{prefix}.ffn.w_gate"],
        params[f"{prefix}.ffn.w_up"],
        params[f"{prefix}.ffn.w_down"],
    )
    return x + ffn


# end def
