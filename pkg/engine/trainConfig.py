"""
训练超参数与消融开关
Author: ICO
Date: 2024-03-24"""

from dataclasses import asdict, dataclass, fields, replace

from backbone import ModelConfig
from defaultCONFIG import Ablation, HyperParameterCONFIG, ShuffleMode
from error import ConfigError
from seriesData import ShuffleConfig
from smm import LossConfig


@dataclass
class TrainConfig:
    """训练配置

    warmup + stable + decay 即总步数；`total_steps` 为 None 时由三段相加得到。
    """

    learning_rate: float = HyperParameterCONFIG.LEARNING_RATE
    betas: tuple[float, float] = HyperParameterCONFIG.BETAS
    weight_decay: float = HyperParameterCONFIG.WEIGHT_DECAY
    adam_epsilon: float = HyperParameterCONFIG.ADAM_EPSILON
    warmup_steps: int = HyperParameterCONFIG.WARMUP_STEPS
    stable_steps: int = HyperParameterCONFIG.STABLE_STEPS
    decay_steps: int = HyperParameterCONFIG.DECAY_STEPS
    total_steps: int | None = None
    batch_size: int = HyperParameterCONFIG.BATCH_SIZE
    grad_clip: float | None = HyperParameterCONFIG.GRAD_CLIP
    max_variates: int = HyperParameterCONFIG.MAX_VARIATES
    shuffle_mode: str = ShuffleMode.ADJACENT.value
    shuffle_probability: float = HyperParameterCONFIG.SHUFFLE_PROBABILITY
    shuffle_normal_std: float = 1.0
    checkpoint_every: int = 0
    log_every: int = 50
    seed: int = 0
    # 消融开关
    disable_variate_attention: bool = False
    disable_robust_loss: bool = False
    single_student_t: bool = False
    global_scaling: bool = False

    def __post_init__(self):
        self.betas = tuple(float(b) for b in self.betas)
        if self.total_steps is None:
            self.total_steps = self.warmup_steps + self.stable_steps + self.decay_steps

    @property
    def shuffle(self) -> ShuffleConfig:
        return ShuffleConfig(self.shuffle_mode, self.shuffle_probability, self.shuffle_normal_std)

    def validate(self) -> "TrainConfig":
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate", "must be > 0")
        if len(self.betas) != 2 or not all(0.0 <= b < 1.0 for b in self.betas):
            raise ConfigError("betas", f"need two values in [0, 1), got {self.betas}")
        if self.weight_decay < 0:
            raise ConfigError("weight_decay", "must be >= 0")
        for name in ("warmup_steps", "stable_steps", "decay_steps", "checkpoint_every", "log_every"):
            if getattr(self, name) < 0:
                raise ConfigError(name, "must be >= 0")
        phases = self.warmup_steps + self.stable_steps + self.decay_steps
        if self.total_steps != phases:
            raise ConfigError("total_steps", f"{self.total_steps} != warmup + stable + decay = {phases}")
        if self.total_steps < 1:
            raise ConfigError("total_steps", "must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size", "must be >= 1")
        if self.grad_clip is not None and not self.grad_clip > 0:
            raise ConfigError("grad_clip", "must be > 0 or null")
        if self.max_variates < 1:
            raise ConfigError("max_variates", "must be >= 1")
        self.shuffle.validate()
        return self

    # end def
    def apply_ablation(self, name: str) -> "TrainConfig":
        """按消融名称打开对应的开关，返回新配置"""
        try:
            ablation = Ablation(name)
        except ValueError:
            raise ConfigError("ablation", f"unknown ablation '{name}'") from None
        match ablation:
            case Ablation.NONE:
                return replace(self)
            case Ablation.NO_VARIATE_ATTENTION:
                return replace(self, disable_variate_attention=True)
            case Ablation.NO_ROBUST_LOSS:
                return replace(self, disable_robust_loss=True)
            case Ablation.NO_SMM:
                return replace(self, single_student_t=True)
            case Ablation.NO_CAUSAL_SCALING:
                return replace(self, global_scaling=True)
        # end match

    # end def
    def effective_model_config(self, model_cfg: ModelConfig) -> ModelConfig:
        cfg = replace(model_cfg)
        if self.disable_variate_attention:
            cfg.variate_attention = False
        if self.single_student_t:
            cfg.num_components = 1
        return cfg

    # end def
    def effective_loss_config(self, loss_cfg: LossConfig) -> LossConfig:
        cfg = replace(loss_cfg)
        if self.disable_robust_loss:
            cfg.lambda_nll = 1.0
        return cfg

    # end def
    def to_dict(self) -> dict:
        values = asdict(self)
        values["betas"] = list(self.betas)
        return values

    @classmethod
    def from_dict(cls, values: dict) -> "TrainConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"train.{key}", "unknown key")
        return cls(**values)

    # end def


# end class
