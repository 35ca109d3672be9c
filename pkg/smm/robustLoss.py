"""
广义鲁棒损失
Author: ICO
Date: 2024-03-17"""

import math

import numpy as np

from error import ConfigError
from numKit import Tensor, as_tensor, exp, log1p, power


def parse_alpha(value) -> float:
    """把配置中的 α 解析为浮点数，字符串 `-inf` 表示 α = −∞"""
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("-inf", "-infinity"):
            return float("-inf")
        try:
            return float(text)
        except ValueError:
            raise ConfigError("alpha", f"cannot parse '{value}'") from None
    return float(value)


# end def
def check_robust_parameters(alpha: float, delta: float) -> None:
    if math.isnan(alpha) or alpha > 2:
        raise ConfigError("alpha", f"must be <= 2, got {alpha}")
    if not delta > 0:
        raise ConfigError("delta", f"must be > 0, got {delta}")


# end def
def robust_loss(x, x_hat, alpha: float, delta: float) -> Tensor:
    """逐点鲁棒损失，r = (x − x̂)/δ

    Parameters
    ----------
    `x` : array_like | Tensor
        真值
    `x_hat` : array_like | Tensor
        预测值
    `alpha` : float
        形状参数，≤ 2，可以为 −∞
    `delta` : float
        尺度，> 0

    Returns
    -------
    Tensor
        逐点损失：
        α = 2 时 r²/2；α = 0 时 log(r²/2 + 1)；α = −∞ 时 1 − exp(−r²/2)；
        其余 |α−2|/α · ((r²/|α−2| + 1)^{α/2} − 1)
    """
    check_robust_parameters(alpha, delta)
    r = (as_tensor(x) - as_tensor(x_hat)) * (1.0 / delta)
    r2 = r * r
    if alpha == 2:
        return r2 * 0.5
    if alpha == 0:
        return log1p(r2 * 0.5)
    if np.isneginf(alpha):
        return 1.0 - exp(r2 * -0.5)
    gap = abs(alpha - 2.0)
    return (power(r2 * (1.0 / gap) + 1.0, alpha / 2.0) - 1.0) * (gap / alpha)


# end def
