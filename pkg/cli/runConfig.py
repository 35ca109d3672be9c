"""
运行配置：YAML 文件 + 命令行覆盖 + 环境变量种子
Author: ICO
Date: 2024-04-01"""

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from backbone import ModelConfig
from causalScaler import ScalerConfig
from dataExchange import write_yaml
from engine import TrainConfig
from error import ConfigError
from obsBench import EvalConfig
from seriesData import SynthConfig
from smm import LossConfig

SEED_ENVIRONMENT = "TOTOKIT_SEED"
SECTIONS = ("model", "scaler", "loss", "train", "synth", "eval")
_SEEDED_SECTIONS = ("train", "synth", "eval")


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    scaler: ScalerConfig = field(default_factory=ScalerConfig)
    loss: LossConfig = field(default_factory=LossConfig)
    train: TrainConfig = field(default_factory=TrainConfig)
    synth: SynthConfig = field(default_factory=SynthConfig)
    eval: EvalConfig = field(default_factory=EvalConfig)
    seed_given: bool = False

    @classmethod
    def from_dict(cls, document: dict | None) -> "RunConfig":
        document = document or {}
        if not isinstance(document, dict):
            raise ConfigError("config", "top level must be a mapping of sections")
        for key in document:
            if key not in SECTIONS:
                raise ConfigError(str(key), f"unknown section, expected one of {', '.join(SECTIONS)}")
        sections = {name: document.get(name) or {} for name in SECTIONS}
        for name, values in sections.items():
            if not isinstance(values, dict):
                raise ConfigError(name, "section must be a mapping")
        scaler_values = dict(sections["scaler"])
        if "kappa" in scaler_values:
            scaler_values["kappa"] = float(scaler_values["kappa"])
        for key in scaler_values:
            if key not in ScalerConfig.__dataclass_fields__:
                raise ConfigError(f"scaler.{key}", "unknown key")
        try:
            model = ModelConfig.from_dict(sections["model"])
            # 未单独设置时与模型的 patch 大小一致
            scaler_values.setdefault("patch_size", model.patch_size)
            config = cls(
                model,
                ScalerConfig(**scaler_values),
                LossConfig.from_dict(sections["loss"]),
                TrainConfig.from_dict(sections["train"]),
                SynthConfig.from_dict(sections["synth"]),
                EvalConfig.from_dict(sections["eval"]),
            )
        except TypeError as exc:
            raise ConfigError("config", str(exc)) from None
        config.seed_given = any("seed" in sections[name] for name in _SEEDED_SECTIONS)
        return config

    # end def
    @classmethod
    def load(cls, path: str | Path | None) -> "RunConfig":
        """读取 YAML 配置；path 为 None 时使用默认值"""
        if path is None:
            return cls()
        try:
            document = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigError("config", f"file not found: {path}") from None
        except yaml.YAMLError as exc:
            raise ConfigError("config", f"cannot parse {path}: {exc}") from None
        return cls.from_dict(document)

    # end def
    def with_seed(self, seed: int | None) -> "RunConfig":
        """命令行种子优先，其次配置文件，最后环境变量"""
        if seed is None and not self.seed_given:
            text = os.environ.get(SEED_ENVIRONMENT)
            if text is not None:
                try:
                    seed = int(text)
                except ValueError:
                    raise ConfigError(SEED_ENVIRONMENT, f"not an integer: {text!r}") from None
        if seed is None:
            return self
        return replace(
            self,
            train=replace(self.train, seed=seed),
            synth=replace(self.synth, seed=seed),
            eval=replace(self.eval, seed=seed),
            seed_given=True,
        )

    # end def
    def validate(self) -> "RunConfig":
        self.model.validate()
        self.scaler.validate()
        if self.scaler.patch_size != self.model.patch_size:
            raise ConfigError("scaler.patch_size", f"{self.scaler.patch_size} differs from model.patch_size {self.model.patch_size}")
        self.loss.validate()
        self.train.validate()
        self.synth.validate()
        self.eval.validate()
        return self

    # end def
    def to_dict(self) -> dict:
        return {
            "model": self.model.to_dict(),
            "scaler": self.scaler.to_dict(),
            "loss": self.loss.to_dict(),
            "train": self.train.to_dict(),
            "synth": self.synth.to_dict(),
            "eval": self.eval.to_dict(),
        }

    # end def
    def write_effective(self, out_dir: str | Path) -> Path:
        return write_yaml(self.to_dict(), Path(out_dir) / "effective_config.yaml")

    # end def


# end class
