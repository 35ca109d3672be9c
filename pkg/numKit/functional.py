"""
非线性函数 (带梯度)
Author: ICO
Date: 2024-03-06"""

import numpy as np
from scipy import special

from .tensor import Tensor, as_tensor, mul


def sigmoid(a) -> Tensor:
    a = as_tensor(a)
    value = special.expit(a.data)
    return Tensor._from_op(value, (a,), lambda g: (g * value * (1.0 - value),), "sigmoid")


# end def
def silu(a) -> Tensor:
    """silu(z) = z · sigmoid(z)"""
    a = as_tensor(a)
    return mul(a, sigmoid(a))


# end def
def softplus(a) -> Tensor:
    """softplus(z) = log(1 + e^z)，用 logaddexp 保证大输入时稳定"""
    a = as_tensor(a)
    return Tensor._from_op(np.logaddexp(0.0, a.data), (a,), lambda g: (g * special.expit(a.data),), "softplus")


# end def
def log1p(a) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(np.log1p(a.data), (a,), lambda g: (g / (1.0 + a.data),), "log1p")


# end def
def lgamma(a) -> Tensor:
    """log Γ(z)，梯度为 digamma(z)"""
    a = as_tensor(a)
    return Tensor._from_op(special.gammaln(a.data), (a,), lambda g: (g * special.digamma(a.data),), "lgamma")


# end def
def softmax(a) -> Tensor:
    """沿最后一个轴的 softmax"""
    a = as_tensor(a)
    shifted = a.data - a.data.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    value = e / e.sum(axis=-1, keepdims=True)

    def backward(g):
        return (value * (g - (g * value).sum(axis=-1, keepdims=True)),)

    return Tensor._from_op(value, (a,), backward, "softmax")


# end def
def log_softmax(a) -> Tensor:
    a = as_tensor(a)
    value = a.data - special.logsumexp(a.data, axis=-1, keepdims=True)
    prob = np.exp(value)

    def backward(g):
        return (g - prob * g.sum(axis=-1, keepdims=True),)

    return Tensor._from_op(value, (a,), backward, "log_softmax")


# end def
def logsumexp(a, keepdims: bool = False) -> Tensor:
    """沿最后一个轴的 log-sum-exp"""
    a = as_tensor(a)
    value = special.logsumexp(a.data, axis=-1, keepdims=True)
    weight = np.exp(a.data - value)

    def backward(g):
        if not keepdims:
            g = g[..., None]
        return (g * weight,)

    return Tensor._from_op(value if keepdims else value[..., 0], (a,), backward, "logsumexp")


# end def
