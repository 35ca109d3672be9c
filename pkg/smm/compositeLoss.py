"""
NLL 与鲁棒损失的加权组合
Author: ICO
Date: 2024-03-17"""

from dataclasses import dataclass, fields

import numpy as np

from defaultCONFIG import HyperParameterCONFIG
from error import CalculationError, ConfigError, ShapeError
from numKit import Tensor, sum_, where

from .mixtureParams import MixtureParams
from .robustLoss import check_robust_parameters, parse_alpha, robust_loss
from .studentT import log_prob, mixture_mean


@dataclass
class LossConfig:
    lambda_nll: float = HyperParameterCONFIG.LAMBDA_NLL
    alpha: float = HyperParameterCONFIG.ROBUST_ALPHA
    delta: float = HyperParameterCONFIG.ROBUST_DELTA

    def validate(self) -> "LossConfig":
        self.alpha = parse_alpha(self.alpha)
        if not 0.0 <= self.lambda_nll <= 1.0:
            raise ConfigError("lambda_nll", f"must lie in [0, 1], got {self.lambda_nll}")
        check_robust_parameters(self.alpha, self.delta)
        return self

    # end def
    def to_dict(self) -> dict:
        # α = −∞ 以字符串写出
        alpha = "-inf" if np.isneginf(self.alpha) else float(self.alpha)
        return {"lambda_nll": float(self.lambda_nll), "alpha": alpha, "delta": float(self.delta)}

    @classmethod
    def from_dict(cls, values: dict) -> "LossConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"loss.{key}", "unknown key")
        return cls(**values).validate()

    # end def


# end class
@dataclass(frozen=True)
class LossTerms:
    total: Tensor
    nll: Tensor
    robust: Tensor


# end class
def _masked_mean(values: Tensor, mask: np.ndarray, count: int) -> Tensor:
    return sum_(where(mask, values, 0.0)) * (1.0 / count)


# end def
def composite_loss_terms(params: MixtureParams, targets, weights, cfg: LossConfig) -> LossTerms:
    """组合损失及其两个分量

    Parameters
    ----------
    `params` : MixtureParams
        ...×K，批次形状与 targets 一致
    `targets` : np.ndarray
        真值 (已换算到归一化空间)
    `weights` : np.ndarray
        0/1 掩码，0 的位置不计入损失
    `cfg` : LossConfig

    Returns
    -------
    LossTerms
        total = λ·NLL + (1−λ)·Robust，均为未被掩码时间步上的平均
    """
    targets = np.asarray(targets, dtype=np.float64)
    mask = np.asarray(weights, dtype=np.float64) > 0
    if targets.shape != params.batch_shape or mask.shape != targets.shape:
        raise ShapeError("targets, weights and mixture parameters differ", targets.shape, mask.shape, params.batch_shape)
    count = int(mask.sum())
    if count == 0:
        raise CalculationError("every timestep is masked, the loss is undefined")
    # 被掩码的位置可能是 NaN，先换成 0，避免 0·NaN 进入梯度
    targets = np.where(mask, targets, 0.0)

    nll = _masked_mean(-log_prob(params, targets), mask, count)
    robust = _masked_mean(robust_loss(targets, mixture_mean(params), cfg.alpha, cfg.delta), mask, count)
    if cfg.lambda_nll == 1.0:
        total = nll
    elif cfg.lambda_nll == 0.0:
        total = robust
    else:
        total = nll * cfg.lambda_nll + robust * (1.0 - cfg.lambda_nll)
    return LossTerms(total, nll, robust)


# end def
def composite_loss(params: MixtureParams, targets, weights, cfg: LossConfig) -> Tensor:
    """λ·NLL + (1−λ)·Robust 的标量损失"""
    return composite_loss_terms(params, targets, weights, cfg).total


# end def
