"""
矩阵乘法的乘加次数 (MAC) 统计
Author: ICO
Date: 2024-03-05"""

from contextlib import contextmanager
from contextvars import ContextVar

# 线程池中的每个任务各自持有计数器与标签
_ACTIVE_COUNTERS: ContextVar[tuple["MacCounter", ...]] = ContextVar("active_counters", default=())
_ACTIVE_TAGS: ContextVar[tuple[str, ...]] = ContextVar("active_tags", default=())


class MacCounter:
    """统计 `with` 作用域内的矩阵乘法乘加次数

    Parameters
    ----------
    `tag` : str | None, 可选
        只统计处于同名 `mac_tag` 作用域内的矩阵乘法，默认值：None (统计全部)
    """

    def __init__(self, tag: str | None = None):
        self.tag = tag
        self.total = 0
        self._token = None

    def __enter__(self) -> "MacCounter":
        self._token = _ACTIVE_COUNTERS.set(_ACTIVE_COUNTERS.get() + (self,))
        return self

    def __exit__(self, *exc_info) -> None:
        _ACTIVE_COUNTERS.reset(self._token)

    # end def


# end class
@contextmanager
def mac_tag(name: str):
    """给作用域内的矩阵乘法打上标签"""
    token = _ACTIVE_TAGS.set(_ACTIVE_TAGS.get() + (name,))
    try:
        yield
    finally:
        _ACTIVE_TAGS.reset(token)


# end def
def record_macs(count: int) -> None:
    counters = _ACTIVE_COUNTERS.get()
    if not counters:
        return
    tags = _ACTIVE_TAGS.get()
    for counter in counters:
        if counter.tag is None or counter.tag in tags:
            counter.total += int(count)


# end def
