"""
带反向传播的稠密张量 (64 位浮点)
Author: ICO
Date: 2024-03-05

张量构造后数据只读，只有 `grad` 会被反向传播写入。
逐元素运算只支持前导轴广播 (较短的形状必须是较长形状的后缀)，
其余情况请显式调用 `broadcast_to` 或 `reshape`。
"""

from typing import Callable, Iterable, Sequence

import numpy as np

from error import CalculationError, GraphError, ShapeError

from .macCounter import record_macs

BackwardFn = Callable[[np.ndarray], Sequence[np.ndarray | None]]


class Tensor:
    """稠密张量

    Parameters
    ----------
    `data` : array_like
        数值，复制为只读的 float64 数组
    `requires_grad` : bool, 可选
        是否需要梯度，默认值：False
    """

    __slots__ = ("_data", "requires_grad", "grad", "_parents", "_backward", "op")
    # numpy 标量在左侧时交给反射运算符
    __array_ufunc__ = None

    def __init__(self, data, requires_grad: bool = False):
        array = np.array(data, dtype=np.float64)
        array.flags.writeable = False
        self._data = array
        self.requires_grad = bool(requires_grad)
        self.grad: np.ndarray | None = None
        self._parents: tuple["Tensor", ...] = ()
        self._backward: BackwardFn | None = None
        self.op = "leaf"

    # end alternate constructor
    @classmethod
    def _from_op(cls, data: np.ndarray, parents: Iterable["Tensor"], backward: BackwardFn, op: str) -> "Tensor":
        out = cls.__new__(cls)
        array = np.asarray(data, dtype=np.float64)
        array.flags.writeable = False
        out._data = array
        out.grad = None
        out.op = op
        parents = tuple(parents)
        out.requires_grad = any(p.requires_grad for p in parents)
        # 没有需要梯度的输入时不记录来源
        out._parents = parents if out.requires_grad else ()
        out._backward = backward if out.requires_grad else None
        return out

    # end def
    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def ndim(self) -> int:
        return self._data.ndim

    @property
    def size(self) -> int:
        return self._data.size

    def item(self) -> float:
        return float(self._data.reshape(-1)[0]) if self._data.size == 1 else float(self._data)

    def numpy(self) -> np.ndarray:
        return self._data.copy()

    def detach(self) -> "Tensor":
        return Tensor(self._data)

    def zero_grad(self) -> None:
        self.grad = None

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, op={self.op}, requires_grad={self.requires_grad})"

    def __len__(self) -> int:
        return self.shape[0]

    # 运算符
    def __add__(self, other):
        return add(self, other)

    def __radd__(self, other):
        return add(other, self)

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __mul__(self, other):
        return mul(self, other)

    def __rmul__(self, other):
        return mul(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)

    def __matmul__(self, other):
        return matmul(self, other)

    def __pow__(self, exponent: float):
        return power(self, exponent)

    def __getitem__(self, index):
        return slice_(self, index)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        return reshape(self, shape)

    def transpose(self, *axes) -> "Tensor":
        if len(axes) == 1 and isinstance(axes[0], (tuple, list)):
            axes = tuple(axes[0])
        return transpose(self, axes or None)

    def sum(self, axis=None, keepdims: bool = False) -> "Tensor":
        return sum_(self, axis, keepdims)

    def mean(self, axis=None, keepdims: bool = False) -> "Tensor":
        return mean(self, axis, keepdims)

    def exp(self) -> "Tensor":
        return exp(self)

    def log(self) -> "Tensor":
        return log(self)

    def sqrt(self) -> "Tensor":
        return sqrt(self)

    # end def


# end class
def as_tensor(value) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


# end def
def _broadcast_shape(a_shape: tuple, b_shape: tuple, op: str) -> tuple:
    """前导轴广播：较短的形状必须是较长形状的后缀"""
    if a_shape == b_shape:
        return a_shape
    short, long = (a_shape, b_shape) if len(a_shape) <= len(b_shape) else (b_shape, a_shape)
    if len(short) < len(long) and long[len(long) - len(short) :] == short:
        return long
    raise ShapeError(f"{op}: shapes are not broadcastable along leading axes", a_shape, b_shape)


# end def
def _unbroadcast(grad: np.ndarray, shape: tuple) -> np.ndarray:
    """把广播后的梯度求和回原始形状 (前导轴与长度为 1 的轴)"""
    if grad.shape == shape:
        return grad
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    singleton = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if singleton:
        grad = grad.sum(axis=singleton, keepdims=True)
    return grad.reshape(shape)


# end def
# ---------------------------------------------------------------- 逐元素二元运算
def add(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "add")

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return Tensor._from_op(a.data + b.data, (a, b), backward, "add")


# end def
def sub(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "sub")

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(-g, b.shape)

    return Tensor._from_op(a.data - b.data, (a, b), backward, "sub")


# end def
def mul(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "mul")

    def backward(g):
        return _unbroadcast(g * b.data, a.shape), _unbroadcast(g * a.data, b.shape)

    return Tensor._from_op(a.data * b.data, (a, b), backward, "mul")


# end def
def div(a, b) -> Tensor:
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(a.shape, b.shape, "div")
    if np.any(b.data == 0.0):
        raise CalculationError("division by zero")

    def backward(g):
        return _unbroadcast(g / b.data, a.shape), _unbroadcast(-g * a.data / (b.data * b.data), b.shape)

    return Tensor._from_op(a.data / b.data, (a, b), backward, "div")


# end def
def neg(a) -> Tensor:
    a = as_tensor(a)
    return Tensor._from_op(-a.data, (a,), lambda g: (-g,), "neg")


# end def
def power(a, exponent: float) -> Tensor:
    """常数指数的幂运算"""
    a = as_tensor(a)
    exponent = float(exponent)
    value = np.power(a.data, exponent)
    if not np.all(np.isfinite(value)):
        raise CalculationError(f"power: non-finite result for exponent {exponent}")

    def backward(g):
        return (g * exponent * np.power(a.data, exponent - 1.0),)

    return Tensor._from_op(value, (a,), backward, "power")


# end def
def matmul(a, b) -> Tensor:
    """矩阵乘法，最后两个轴做乘法，前导轴按前导轴规则广播"""
    a, b = as_tensor(a), as_tensor(b)
    if a.ndim < 2 or b.ndim < 2:
        raise ShapeError("matmul: both operands need at least 2 dims", a.shape, b.shape)
    if a.shape[-1] != b.shape[-2]:
        raise ShapeError("matmul: inner dimensions differ", a.shape, b.shape)
    batch = _broadcast_shape(a.shape[:-2], b.shape[:-2], "matmul")
    n, k, m = a.shape[-2], a.shape[-1], b.shape[-1]
    record_macs(int(np.prod(batch, dtype=np.int64)) * n * k * m)

    def backward(g):
        grad_a = g @ np.swapaxes(b.data, -1, -2)
        grad_b = np.swapaxes(a.data, -1, -2) @ g
        return _unbroadcast(grad_a, a.shape), _unbroadcast(grad_b, b.shape)

    return Tensor._from_op(a.data @ b.data, (a, b), backward, "matmul")


# end def
# ---------------------------------------------------------------- 逐元素一元运算
def exp(a) -> Tensor:
    a = as_tensor(a)
    value = np.exp(a.data)
    return Tensor._from_op(value, (a,), lambda g: (g * value,), "exp")


# end def
def log(a) -> Tensor:
    a = as_tensor(a)
    if np.any(a.data <= 0.0):
        raise CalculationError("log of a non-positive value")
    return Tensor._from_op(np.log(a.data), (a,), lambda g: (g / a.data,), "log")


# end def
def sqrt(a) -> Tensor:
    a = as_tensor(a)
    if np.any(a.data < 0.0):
        raise CalculationError("sqrt of a negative value")
    value = np.sqrt(a.data)

    def backward(g):
        with np.errstate(divide="ignore"):
            return (g * 0.5 / value,)

    return Tensor._from_op(value, (a,), backward, "sqrt")


# end def
def clamp(a, low: float | None = None, high: float | None = None) -> Tensor:
    """夹紧到 [low, high]，区间内 (含边界) 梯度直接传递"""
    a = as_tensor(a)
    if low is not None and high is not None and low > high:
        raise CalculationError(f"clamp: low {low} > high {high}")
    value = np.clip(a.data, low, high)
    inside = np.ones(a.shape, dtype=bool)
    if low is not None:
        inside &= a.data >= low
    if high is not None:
        inside &= a.data <= high

    return Tensor._from_op(value, (a,), lambda g: (g * inside,), "clamp")


# end def
def where(mask, a, b) -> Tensor:
    """按常数布尔掩码选择，`mask` 为 True 处取 a，否则取 b"""
    mask = np.asarray(mask, dtype=bool)
    a, b = as_tensor(a), as_tensor(b)
    _broadcast_shape(mask.shape, a.shape, "where")
    _broadcast_shape(mask.shape, b.shape, "where")
    value = np.where(mask, a.data, b.data)

    def backward(g):
        return _unbroadcast(np.where(mask, g, 0.0), a.shape), _unbroadcast(np.where(mask, 0.0, g), b.shape)

    return Tensor._from_op(value, (a, b), backward, "where")


# end def
# ---------------------------------------------------------------- 归约与扫描
def sum_(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    value = a.data.sum(axis=axis, keepdims=keepdims)

    def backward(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return (np.broadcast_to(g, a.shape).copy(),)

    return Tensor._from_op(value, (a,), backward, "sum")


# end def
def mean(a, axis=None, keepdims: bool = False) -> Tensor:
    a = as_tensor(a)
    count = a.size if axis is None else int(np.prod([a.shape[i] for i in np.atleast_1d(axis)]))
    return sum_(a, axis, keepdims) * (1.0 / count)


# end def
def cumsum(a) -> Tensor:
    """沿最后一个轴的前缀和"""
    a = as_tensor(a)

    def backward(g):
        return (np.flip(np.cumsum(np.flip(g, -1), axis=-1), -1),)

    return Tensor._from_op(np.cumsum(a.data, axis=-1), (a,), backward, "cumsum")


# end def
# ---------------------------------------------------------------- 形状运算
def reshape(a, shape) -> Tensor:
    a = as_tensor(a)
    shape = tuple(int(s) for s in shape)
    try:
        value = a.data.reshape(shape)
    except ValueError:
        raise ShapeError("reshape: element count differs", a.shape, shape) from None
    return Tensor._from_op(value, (a,), lambda g: (g.reshape(a.shape),), "reshape")


# end def
def transpose(a, axes=None) -> Tensor:
    a = as_tensor(a)
    axes = tuple(reversed(range(a.ndim))) if axes is None else tuple(axes)
    if sorted(axes) != list(range(a.ndim)):
        raise ShapeError(f"transpose: invalid permutation {axes}", a.shape)
    inverse = tuple(np.argsort(axes))
    return Tensor._from_op(np.transpose(a.data, axes), (a,), lambda g: (np.transpose(g, inverse),), "transpose")


# end def
def swap_last(a) -> Tensor:
    a = as_tensor(a)
    axes = list(range(a.ndim))
    axes[-1], axes[-2] = axes[-2], axes[-1]
    return transpose(a, axes)


# end def
def slice_(a, index) -> Tensor:
    a = as_tensor(a)
    value = a.data[index]
    parts = index if isinstance(index, tuple) else (index,)
    basic = all(isinstance(p, (slice, int, type(Ellipsis))) or p is None for p in parts)

    def backward(g):
        grad = np.zeros(a.shape)
        if basic:
            # 基本索引不会重复选中同一位置
            grad[index] += g
        else:
            np.add.at(grad, index, g)
        return (grad,)

    return Tensor._from_op(value, (a,), backward, "slice")


# end def
def concat(tensors: Sequence, axis: int = -1) -> Tensor:
    tensors = [as_tensor(t) for t in tensors]
    if not tensors:
        raise ShapeError("concat: empty input")
    ndim = tensors[0].ndim
    norm_axis = axis % ndim
    for t in tensors[1:]:
        if t.ndim != ndim or any(t.shape[i] != tensors[0].shape[i] for i in range(ndim) if i != norm_axis):
            raise ShapeError(f"concat: shapes differ outside axis {axis}", tensors[0].shape, t.shape)
    sizes = [t.shape[norm_axis] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def backward(g):
        return tuple(np.split(g, splits, axis=norm_axis))

    return Tensor._from_op(np.concatenate([t.data for t in tensors], axis=norm_axis), tensors, backward, "concat")


# end def
def broadcast_to(a, shape) -> Tensor:
    """显式广播 (允许前导轴与长度为 1 的轴扩展)"""
    a = as_tensor(a)
    shape = tuple(shape)
    try:
        value = np.broadcast_to(a.data, shape)
    except ValueError:
        raise ShapeError("broadcast_to: incompatible shapes", a.shape, shape) from None
    return Tensor._from_op(value.copy(), (a,), lambda g: (_unbroadcast(g, a.shape),), "broadcast_to")


# end def
# ---------------------------------------------------------------- 反向传播
def _topological_order(root: Tensor) -> list[Tensor]:
    order: list[Tensor] = []
    visited: set[int] = set()
    stack: list[tuple[Tensor, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in visited:
            continue
        visited.add(id(node))
        stack.append((node, True))
        for parent in node._parents:
            if parent.requires_grad and id(parent) not in visited:
                stack.append((parent, False))
    return order


# end def
def backward(loss: Tensor) -> None:
    """从标量损失反向传播，把梯度累加到所有可达的叶子张量

    Parameters
    ----------
    `loss` : Tensor
        标量损失

    Raises
    ------
    GraphError
        损失不是标量，或者与任何需要梯度的输入都没有连接
    """
    if loss.size != 1:
        raise GraphError(f"backward needs a scalar loss, got shape {loss.shape}")
    if not loss.requires_grad:
        raise GraphError("loss is detached: no input requires grad")
    pending: dict[int, np.ndarray] = {id(loss): np.ones(loss.shape)}
    for node in reversed(_topological_order(loss)):
        grad = pending.pop(id(node), None)
        if grad is None:
            continue
        if node._backward is None:
            # 叶子：多次调用累加
            node.grad = grad.copy() if node.grad is None else node.grad + grad
            continue
        for parent, parent_grad in zip(node._parents, node._backward(grad)):
            if parent_grad is None or not parent.requires_grad:
                continue
            key = id(parent)
            pending[key] = pending[key] + parent_grad if key in pending else parent_grad


# end def
