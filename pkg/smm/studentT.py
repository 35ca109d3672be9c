"""
Student-T 混合分布：对数密度、矩、采样与分布函数
Author: ICO
Date: 2024-03-16"""

import numpy as np
from scipy import special

from numKit import Rng, Tensor, as_tensor, broadcast_to, lgamma, log, log1p, logsumexp, sum_

from .mixtureParams import MixtureParams


def _expand(x, params: MixtureParams) -> Tensor:
    # ... -> ...×K
    x = as_tensor(x)
    if x.shape != params.batch_shape:
        x = broadcast_to(x, params.batch_shape)
    return broadcast_to(x.reshape(x.shape + (1,)), params.mu.shape)


# end def
def component_log_density(params: MixtureParams, x) -> Tensor:
    """每个分量的 log T(x | μ, τ, ν)，τ 为平方尺度"""
    nu, tau = params.nu, params.tau
    z = _expand(x, params) - params.mu
    normalizer = lgamma((nu + 1.0) * 0.5) - lgamma(nu * 0.5) - 0.5 * log(nu * tau * np.pi)
    return normalizer - (nu + 1.0) * 0.5 * log1p(z * z / (nu * tau))


# end def
def log_prob(params: MixtureParams, x) -> Tensor:
    """log Σ_k π_k T(x | μ_k, τ_k, ν_k)

    Parameters
    ----------
    `params` : MixtureParams
        ...×K
    `x` : array_like | Tensor
        形状与批次形状一致，或可前导轴广播

    Returns
    -------
    Tensor
        与批次形状一致
    """
    params.check()
    return logsumexp(params.log_pi + component_log_density(params, x))


# end def
def mixture_mean(params: MixtureParams) -> Tensor:
    """Σ π_k μ_k"""
    return sum_(params.pi * params.mu, axis=-1)


# end def
def mixture_variance(params: MixtureParams) -> Tensor:
    """Σ π_k (τ_k ν_k / (ν_k − 2) + μ_k²) − mean²"""
    pi, mu, tau, nu = params.pi, params.mu, params.tau, params.nu
    second = sum_(pi * (tau * nu / (nu - 2.0) + mu * mu), axis=-1)
    mean = mixture_mean(params)
    return second - mean * mean


# end def
def sample(params: MixtureParams, rng: Rng, n: int) -> np.ndarray:
    """从混合分布中抽样

    先按 π 选择分量 k，再取 μ_k + sqrt(τ_k)·t，t 为标准 Student-T
    (标准正态 / sqrt(χ²_ν / ν))。

    Parameters
    ----------
    `params` : MixtureParams
        ...×K
    `rng` : Rng
    `n` : int
        样本数

    Returns
    -------
    np.ndarray
        n×...
    """
    if n < 1:
        raise ValueError(f"number of samples must be >= 1, got {n}")
    values = params.numpy()
    batch = params.batch_shape
    cumulative = np.cumsum(values["pi"], axis=-1)
    u = rng.random((n,) + batch)
    component = np.minimum((u[..., None] >= cumulative).sum(axis=-1), params.num_components - 1)

    def pick(name: str) -> np.ndarray:
        stacked = np.broadcast_to(values[name], (n,) + values[name].shape)
        return np.take_along_axis(stacked, component[..., None], axis=-1)[..., 0]

    mu, tau, nu = pick("mu"), pick("tau"), pick("nu")
    standard = rng.normal(size=(n,) + batch) / np.sqrt(rng.chisquare(nu) / nu)
    return mu + np.sqrt(tau) * standard


# end def
def mixture_cdf(params: MixtureParams, x) -> np.ndarray:
    """Σ π_k F_ν((x − μ_k) / sqrt(τ_k))，F_ν 为标准 Student-T 分布函数"""
    values = params.numpy()
    x = np.asarray(x, dtype=np.float64)[..., None]
    standardized = (x - values["mu"]) / np.sqrt(values["tau"])
    return (values["pi"] * special.stdtr(values["nu"], standardized)).sum(axis=-1)


# end def
