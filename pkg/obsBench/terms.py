"""
预测期限与滚动窗口
Author: ICO
Date: 2024-03-28"""

from dataclasses import dataclass

from defaultCONFIG import HyperParameterCONFIG, Term
from error import ConfigError
from seriesData import parse_frequency


def holdout_length(series_len: int, fraction: float = HyperParameterCONFIG.TEST_FRACTION) -> int:
    """测试段长度 floor(0.10·L)"""
    return int(series_len * fraction)


# end def
def term_horizons(freq: str, series_len: int) -> list[tuple[Term, int]]:
    """某条序列参与评测的期限与预测长度

    short 总是包含；medium (10×) 与 long (15×) 只在能完整放进测试段时包含，
    期限是层级的：符合 long 的序列也会在 medium 与 short 上评测。

    Parameters
    ----------
    `freq` : str
        频率代码
    `series_len` : int

    Returns
    -------
    list[tuple[Term, int]]
    """
    frequency = parse_frequency(freq)
    available = holdout_length(series_len)
    horizons = [(Term.SHORT, frequency.horizon(Term.SHORT))]
    for term in (Term.MEDIUM, Term.LONG):
        horizon = frequency.horizon(term)
        if horizon <= available:
            horizons.append((term, horizon))
    return horizons


# end def
@dataclass(frozen=True)
class EvalWindow:
    """上下文为 [0, context_end)，目标为 [context_end, context_end + H)"""

    context_end: int
    horizon: int

    @property
    def target(self) -> slice:
        return slice(self.context_end, self.context_end + self.horizon)


# end class
def rolling_windows(series_len: int, horizon: int) -> list[EvalWindow]:
    """从测试段开头起不重叠地平铺目标窗口，不足 H 的尾部舍弃

    Raises
    ------
    ConfigError
        H < 1 或 H 超过测试段长度
    """
    available = holdout_length(series_len)
    if horizon < 1 or horizon > available:
        raise ConfigError("horizon", f"{horizon} does not fit the test split of {available} steps")
    start = series_len - available
    return [EvalWindow(start + i * horizon, horizon) for i in range(available // horizon)]


# end def
