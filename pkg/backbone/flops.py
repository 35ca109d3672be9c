"""
注意力乘加次数的解析公式
Author: ICO
Date: 2024-03-14"""

from defaultCONFIG import AttentionKind

from .modelConfig import ModelConfig
from .transformer import block_kinds


def attention_flops(cfg: ModelConfig, num_variates: int, num_patches: int, mode: str | None = None) -> int:
    """注意力分数与加权求和的乘加次数 (每个矩阵乘法各计一次)

    时间维块 M·T²·D，变量维块 T·M²·D，全注意力块 M²·T²·D。
    一个 segment (N 个时间维块 + 1 个变量维块) 合计 N·M·T²·D + T·M²·D，
    全注意力同样深度为 (N+1)·M²·T²·D。

    Parameters
    ----------
    `cfg` : ModelConfig
    `num_variates` : int
        M
    `num_patches` : int
        T
    `mode` : str | None, 可选
        `factorized` 或 `full`，默认值：None (取 cfg)

    Returns
    -------
    int
    """
    m, t, d = int(num_variates), int(num_patches), int(cfg.embed_dim)
    per_kind = {
        AttentionKind.TIMEWISE: m * t * t * d,
        AttentionKind.VARIATEWISE: t * m * m * d,
        AttentionKind.FULL: m * m * t * t * d,
    }
    return sum(per_kind[kind] for kind in block_kinds(cfg, mode))


# end def
