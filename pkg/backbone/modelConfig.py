"""
模型结构超参数
Author: ICO
Date: 2024-03-12"""

from dataclasses import asdict, dataclass, fields

from defaultCONFIG import AttentionMode, HyperParameterCONFIG
from error import ConfigError


@dataclass
class ModelConfig:
    """解码器结构

    每个 segment 由 N 个时间维注意力块和 1 个变量维注意力块组成，
    num_layers 不是 N+1 的整数倍时，多出来的块都是时间维块。
    """

    embed_dim: int = HyperParameterCONFIG.EMBED_DIM
    patch_size: int = HyperParameterCONFIG.PATCH_SIZE
    num_layers: int = HyperParameterCONFIG.NUM_LAYERS
    time_per_variate_ratio: int = HyperParameterCONFIG.TIME_PER_VARIATE_RATIO
    num_heads: int = HyperParameterCONFIG.NUM_HEADS
    mlp_dim: int = HyperParameterCONFIG.MLP_DIM
    num_components: int = HyperParameterCONFIG.MIXTURE_COMPONENTS
    head_feature_dim: int | None = None
    max_context: int = HyperParameterCONFIG.MAX_CONTEXT
    variate_layer_first: bool = False
    variate_attention: bool = True
    attention_mode: str = AttentionMode.FACTORIZED.value
    rope_base: float = HyperParameterCONFIG.ROPE_BASE
    init_std: float = 0.02

    @property
    def feature_dim(self) -> int:
        """D_h，默认等于 D"""
        return self.embed_dim if self.head_feature_dim is None else self.head_feature_dim

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads

    @property
    def max_patches(self) -> int:
        return self.max_context // self.patch_size

    def validate(self) -> "ModelConfig":
        positive = ("embed_dim", "patch_size", "num_layers", "num_heads", "mlp_dim", "num_components", "max_context")
        for name in positive:
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise ConfigError(name, f"must be a positive integer, got {value}")
        if self.time_per_variate_ratio < 0:
            raise ConfigError("time_per_variate_ratio", "must be >= 0")
        if self.embed_dim % self.num_heads:
            raise ConfigError("embed_dim", f"{self.embed_dim} is not divisible by num_heads {self.num_heads}")
        if self.head_dim % 2:
            raise ConfigError("num_heads", f"head dim {self.head_dim} must be even for rotary encoding")
        if self.feature_dim < 1:
            raise ConfigError("head_feature_dim", "must be positive")
        if self.max_context % self.patch_size:
            raise ConfigError("max_context", f"{self.max_context} is not divisible by patch_size {self.patch_size}")
        if self.attention_mode not in {m.value for m in AttentionMode}:
            raise ConfigError("attention_mode", f"unknown mode '{self.attention_mode}'")
        return self

    # end def
    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "ModelConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"model.{key}", "unknown key")
        return cls(**values)

    # end def


# end class
