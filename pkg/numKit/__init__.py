from .functional import lgamma, log1p, log_softmax, logsumexp, sigmoid, silu, softmax, softplus
from .gradCheck import check_parameters, finite_difference_check
from .macCounter import MacCounter, mac_tag
from .rng import Rng
from .tensor import (
    Tensor,
    add,
    as_tensor,
    backward,
    broadcast_to,
    clamp,
    concat,
    cumsum,
    div,
    exp,
    log,
    matmul,
    mean,
    mul,
    neg,
    power,
    reshape,
    slice_,
    sqrt,
    sub,
    sum_,
    swap_last,
    transpose,
    where,
)
