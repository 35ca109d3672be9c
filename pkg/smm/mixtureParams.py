"""
Student-T 混合分布的参数
Author: ICO
Date: 2024-03-16"""

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from error import CalculationError, ShapeError
from numKit import Tensor, as_tensor, clamp, exp, log_softmax, matmul, softplus, swap_last

MACHINE_EPSILON = float(np.finfo(np.float64).eps)
HEAD_NAMES = ("nu", "mu", "tau", "pi")


@dataclass(frozen=True)
class MixtureParams:
    """每个 (变量, 时间步) 上 K 个分量的参数，最后一个轴为 K

    `tau` 是平方尺度，`log_pi` 保存混合权重的对数 (one-hot 权重时含 -inf)
    """

    log_pi: Tensor
    mu: Tensor
    tau: Tensor
    nu: Tensor

    @property
    def pi(self) -> Tensor:
        return exp(self.log_pi)

    @property
    def num_components(self) -> int:
        return self.mu.shape[-1]

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.mu.shape[:-1]

    @classmethod
    def from_arrays(cls, pi, mu, tau, nu) -> "MixtureParams":
        """由数值直接构造 (测试与离线分析用)，会检查参数是否合法"""
        pi, mu, tau, nu = (np.asarray(v, dtype=np.float64) for v in (pi, mu, tau, nu))
        if not (pi.shape == mu.shape == tau.shape == nu.shape):
            raise ShapeError("mixture parameters differ in shape", pi.shape, mu.shape, tau.shape, nu.shape)
        with np.errstate(divide="ignore"):
            log_pi = np.log(pi)
        params = cls(Tensor(log_pi), Tensor(mu), Tensor(tau), Tensor(nu))
        params.check()
        return params

    # end def
    def check(self) -> None:
        """Σπ = 1 (1e-9 内)，τ > 0，ν > 2"""
        pi = np.exp(self.log_pi.data)
        if np.any(pi < 0) or np.any(np.abs(pi.sum(axis=-1) - 1.0) > 1e-9):
            raise CalculationError("mixture weights do not sum to one")
        if np.any(~(self.tau.data > 0)):
            raise CalculationError("mixture squared scale tau must be positive")
        if np.any(~(self.nu.data > 2)):
            raise CalculationError("mixture degrees of freedom nu must exceed 2")

    # end def
    def numpy(self) -> dict[str, np.ndarray]:
        return {
            "pi": np.exp(self.log_pi.data),
            "mu": self.mu.numpy(),
            "tau": self.tau.numpy(),
            "nu": self.nu.numpy(),
        }

    # end def
    def select(self, index) -> "MixtureParams":
        """对批次轴做 numpy 风格索引 (不保留梯度)"""
        return MixtureParams(*(Tensor(t.data[index]) for t in (self.log_pi, self.mu, self.tau, self.nu)))

    # end def


# end class
def _linear(h: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return matmul(h, swap_last(weight)) + bias


# end def
def compute_params(h, params: Mapping[str, Tensor], prefix: str = "head") -> MixtureParams:
    """由每个时间步的特征计算混合分布参数

    Parameters
    ----------
    `h` : Tensor
        ...×D_h
    `params` : Mapping[str, Tensor]
        含 `{prefix}.{nu,mu,tau,pi}.{weight,bias}`，权重 K×D_h，偏置 K
    `prefix` : str, 可选
        默认值：`head`

    Returns
    -------
    MixtureParams
        ν = 2 + max(softplus, ε)；μ 为线性输出；τ = max(softplus, ε)；π = softmax
    """
    h = as_tensor(h)
    pre = {name: _linear(h, params[f"{prefix}.{name}.weight"], params[f"{prefix}.{name}.bias"]) for name in HEAD_NAMES}
    nu = clamp(softplus(pre["nu"]), low=MACHINE_EPSILON) + 2.0
    tau = clamp(softplus(pre["tau"]), low=MACHINE_EPSILON)
    return MixtureParams(log_softmax(pre["pi"]), pre["mu"], tau, nu)


# end def
