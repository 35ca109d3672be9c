"""
基础层：patch 嵌入、RMSNorm、SwiGLU、旋转位置编码
Author: ICO
Date: 2024-03-12"""

import numpy as np

from defaultCONFIG import HyperParameterCONFIG
from error import ShapeError
from numKit import Tensor, as_tensor, broadcast_to, matmul, mean, silu, sqrt


def patch_embed(normalized, weight: Tensor, bias: Tensor) -> Tensor:
    """把不重叠的 P 个值线性映射到 D 维

    Parameters
    ----------
    `normalized` : array_like | Tensor
        ...×L
    `weight` : Tensor
        P×D
    `bias` : Tensor
        D

    Returns
    -------
    Tensor
        ...×(L/P)×D
    """
    x = as_tensor(normalized)
    patch_size = weight.shape[0]
    if x.shape[-1] % patch_size:
        raise ShapeError(f"length is not divisible by patch size {patch_size}", x.shape)
    patches = x.reshape(x.shape[:-1] + (x.shape[-1] // patch_size, patch_size))
    return matmul(patches, weight) + bias


# end def
def rmsnorm(x: Tensor, gain: Tensor, eps: float = HyperParameterCONFIG.RMSNORM_EPS) -> Tensor:
    """x / sqrt(mean(x²) + eps) · gain"""
    x = as_tensor(x)
    rms = sqrt(mean(x * x, axis=-1, keepdims=True) + eps)
    return x / broadcast_to(rms, x.shape) * gain


# end def
def swiglu_ffn(x: Tensor, w_gate: Tensor, w_up: Tensor, w_down: Tensor) -> Tensor:
    """W_down( silu(W_gate x) ⊙ (W_up x) )"""
    return matmul(silu(matmul(x, w_gate)) * matmul(x, w_up), w_down)


# end def
def _pair_rotation(dim: int) -> np.ndarray:
    # (x_2i, x_2i+1) -> (−x_2i+1, x_2i)
    rotation = np.zeros((dim, dim))
    for i in range(0, dim, 2):
        rotation[i + 1, i] = -1.0
        rotation[i, i + 1] = 1.0
    return rotation


# end def
def rope_angles(positions, dim: int, base: float = HyperParameterCONFIG.ROPE_BASE) -> tuple[np.ndarray, np.ndarray]:
    """每个位置、每个维度的 (cos, sin)，成对维度共享同一角度"""
    if dim % 2:
        raise ShapeError(f"rotary encoding needs an even dimension, got {dim}")
    positions = np.asarray(positions, dtype=np.float64)
    inv_freq = base ** (-np.arange(0, dim, 2, dtype=np.float64) / dim)
    angles = np.repeat(np.outer(positions, inv_freq), 2, axis=-1)
    return np.cos(angles), np.sin(angles)


# end def
def rope_rotate(x: Tensor, cos: np.ndarray, sin: np.ndarray) -> Tensor:
    x = as_tensor(x)
    return x * cos + matmul(x, Tensor(_pair_rotation(x.shape[-1]))) * sin


# end def
def rope_apply(q, k, positions, base: float = HyperParameterCONFIG.ROPE_BASE) -> tuple[Tensor, Tensor]:
    """对 q、k 做旋转位置编码

    Parameters
    ----------
    `q` : Tensor
        ...×T×d
    `k` : Tensor
        ...×T×d
    `positions` : array_like
        T 个位置

    Returns
    -------
    tuple[Tensor, Tensor]
        旋转后的 (q', k')
    """
    q, k = as_tensor(q), as_tensor(k)
    cos, sin = rope_angles(positions, q.shape[-1], base)
    return rope_rotate(q, cos, sin), rope_rotate(k, cos, sin)


# end def
