"""
检查点：模型配置、参数、优化器状态、步数与随机数状态
Author: ICO
Date: 2024-03-25"""

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from loguru import logger

from backbone import ModelConfig, parameter_shapes
from causalScaler import ScalerConfig
from dataExchange import archive_paths, read_archive, write_archive
from error import CheckpointError
from mathTools import finite_check
from numKit import Tensor

from .optimizer import AdamWState

_MOMENT_PREFIXES = ("optim.m.", "optim.v.")


@dataclass
class Checkpoint:
    model_config: ModelConfig
    params: dict[str, np.ndarray]
    optimizer: AdamWState = field(default_factory=AdamWState)
    step: int = 0
    rng_state: dict | None = None
    scaler_config: ScalerConfig = field(default_factory=ScalerConfig)
    global_scaling: bool = False
    train_config: dict = field(default_factory=dict)

    def __post_init__(self):
        # 归一化的 patch 长度跟随模型
        if self.scaler_config.patch_size != self.model_config.patch_size:
            self.scaler_config = replace(self.scaler_config, patch_size=self.model_config.patch_size)

    # end def

    def check(self) -> "Checkpoint":
        """每个结构参数恰好出现一次，形状一致"""
        expected = parameter_shapes(self.model_config)
        unknown = [name for name in self.params if name not in expected]
        if unknown:
            raise CheckpointError(f"unknown parameter '{unknown[0]}'")
        for name, shape in expected.items():
            if name not in self.params:
                raise CheckpointError(f"missing parameter '{name}'")
            if tuple(self.params[name].shape) != shape:
                raise CheckpointError(f"parameter '{name}' has shape {self.params[name].shape}, expected {shape}")
            if not finite_check(self.params[name]):
                raise CheckpointError(f"parameter '{name}' holds non-finite values")
        return self

    # end def
    def tensors(self) -> dict[str, Tensor]:
        """推理用的只读张量"""
        return {name: Tensor(value) for name, value in self.params.items()}

    # end def


# end class
def save_checkpoint(ckpt: Checkpoint, path: str | Path) -> Path:
    """写出 checkpoint.manifest 与 checkpoint.bin

    Parameters
    ----------
    `ckpt` : Checkpoint
    `path` : str | Path
        输出目录

    Returns
    -------
    Path
        清单文件路径
    """
    ckpt.check()
    arrays = dict(ckpt.params)
    for name in ckpt.params:
        if name in ckpt.optimizer.m:
            arrays[f"optim.m.{name}"] = ckpt.optimizer.m[name]
            arrays[f"optim.v.{name}"] = ckpt.optimizer.v[name]
    meta = {
        "step": int(ckpt.step),
        "optimizer_step": int(ckpt.optimizer.step),
        "model_config": ckpt.model_config.to_dict(),
        "scaler_config": ckpt.scaler_config.to_dict(),
        "global_scaling": bool(ckpt.global_scaling),
        "train_config": ckpt.train_config,
        "rng_state": ckpt.rng_state,
    }
    manifest = write_archive(path, arrays, meta)
    logger.info(f"checkpoint at step {ckpt.step} written to {manifest.parent}")
    return manifest


# end def
def load_checkpoint(path: str | Path) -> Checkpoint:
    """读取检查点并检查参数与结构是否一致

    Raises
    ------
    CheckpointError
        清单与二进制不一致、未知参数、缺失参数
    """
    meta, arrays = read_archive(path)
    try:
        model_config = ModelConfig.from_dict(meta["model_config"]).validate()
        scaler_config = ScalerConfig(**meta.get("scaler_config", {})).validate()
    except (KeyError, TypeError) as exc:
        raise CheckpointError(f"manifest lacks a valid configuration: {exc}") from None
    params, moments = {}, {"m": {}, "v": {}}
    for name, array in arrays.items():
        if name.startswith(_MOMENT_PREFIXES):
            kind, target = name[len("optim.")], name[len("optim.m.") :]
            moments[kind][target] = array
        else:
            params[name] = array
    for target in list(moments["m"]) + list(moments["v"]):
        if target not in params:
            raise CheckpointError(f"optimizer moment for unknown parameter '{target}'")
    optimizer = AdamWState(int(meta.get("optimizer_step", 0)), moments["m"], moments["v"])
    ckpt = Checkpoint(
        model_config,
        params,
        optimizer,
        int(meta.get("step", 0)),
        meta.get("rng_state"),
        scaler_config,
        bool(meta.get("global_scaling", False)),
        meta.get("train_config", {}),
    )
    return ckpt.check()


# end def
def checkpoint_exists(path: str | Path) -> bool:
    return all(p.exists() for p in archive_paths(path))


# end def
