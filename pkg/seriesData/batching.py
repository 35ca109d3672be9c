"""
训练批次预处理：左填充、随机偏移、变量混排与打包
Author: ICO
Date: 2024-03-20"""

from dataclasses import asdict, dataclass, fields

import numpy as np
from loguru import logger

from basicTyping import Array3D
from defaultCONFIG import HyperParameterCONFIG, ShuffleMode
from error import ConfigError, DataFormatError
from numKit import Rng

from .multivariateSeries import MultivariateSeries


@dataclass
class ShuffleConfig:
    mode: str = ShuffleMode.ADJACENT.value
    probability: float = HyperParameterCONFIG.SHUFFLE_PROBABILITY
    # mode 为 normal 时伙伴下标偏移的标准差
    normal_std: float = 1.0

    def validate(self) -> "ShuffleConfig":
        if self.mode not in {m.value for m in ShuffleMode}:
            raise ConfigError("shuffle_mode", f"unknown mode '{self.mode}'")
        if not 0.0 <= self.probability <= 1.0:
            raise ConfigError("shuffle_probability", "must lie in [0, 1]")
        if self.normal_std <= 0:
            raise ConfigError("shuffle_normal_std", "must be > 0")
        return self

    # end def
    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, values: dict) -> "ShuffleConfig":
        known = {f.name for f in fields(cls)}
        for key in values:
            if key not in known:
                raise ConfigError(f"shuffle.{key}", "unknown key")
        return cls(**values)

    # end def


# end class
@dataclass(frozen=True, eq=False)
class Batch:
    """打包后的批次

    Parameters
    ----------
    `values` : Array3D
        B×M×L，权重为 0 的位置取 0
    `weights` : Array3D
        B×M×L
    `id_mask` : np.ndarray
        B×M×M，同一原始序列的变量为 True，填充变量自成一组
    `sources` : list
        每个批次元素每个槽位的 (序列下标, 变量下标)，填充槽位为 None
    """

    values: Array3D
    weights: Array3D
    id_mask: np.ndarray
    sources: list

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.values.shape


# end class
@dataclass
class _Row:
    values: np.ndarray
    weights: np.ndarray
    group: int
    source: tuple[int, int]


# end class
def padded_length(length: int, patch_size: int) -> int:
    """补到 P 的整数倍之后的长度"""
    return -(-length // patch_size) * patch_size


# end def
def left_pad(values: np.ndarray, weights: np.ndarray, total: int) -> tuple[np.ndarray, np.ndarray]:
    pad = total - values.shape[-1]
    if pad < 0:
        raise DataFormatError(f"cannot pad length {values.shape[-1]} down to {total}")
    widths = [(0, 0)] * (values.ndim - 1) + [(pad, 0)]
    return np.pad(values, widths), np.pad(weights, widths)


# end def
def _shuffle_order(rows: list[_Row], cfg: ShuffleConfig, rng: Rng) -> list[int]:
    count = len(rows)
    match ShuffleMode(cfg.mode):
        case ShuffleMode.NONE:
            return list(range(count))
        case ShuffleMode.RANDOM:
            return [int(i) for i in rng.permutation(count)]
        case ShuffleMode.NORMAL:
            keys = np.clip(np.arange(count) + rng.normal(0.0, cfg.normal_std, size=count), 0, count - 1)
            return [int(i) for i in np.argsort(keys, kind="stable")]
        case ShuffleMode.ADJACENT:
            # 相邻序列两两交错：s0v0, s1v0, s0v1, s1v1, ...
            groups: dict[int, list[int]] = {}
            for i, row in enumerate(rows):
                groups.setdefault(row.group, []).append(i)
            ordered = list(groups.values())
            order = []
            for first in range(0, len(ordered), 2):
                pair = ordered[first : first + 2]
                for slot in range(max(len(g) for g in pair)):
                    order.extend(g[slot] for g in pair if slot < len(g))
            return order
    # end match


# end def
def _pack(units: list[list[_Row]], max_variates: int) -> list[list[_Row]]:
    items: list[list[_Row]] = [[]]
    for unit in units:
        if len(items[-1]) + len(unit) > max_variates:
            items.append([])
        items[-1].extend(unit)
    return [item for item in items if item]


# end def
def preprocess_batch(
    series: list[MultivariateSeries],
    patch_size: int,
    max_variates: int = HyperParameterCONFIG.MAX_VARIATES,
    rng: Rng | None = None,
    shuffle: ShuffleConfig | None = None,
    random_offset: bool = True,
) -> Batch:
    """把若干序列整理为一个打包批次

    每条序列的窗口起点先后移一个 [0, P) 的随机偏移，再在左侧补齐到 P 的整数倍，
    补出的位置权重为 0；按概率混排不同序列的变量后，
    以最多 max_variates 个变量为一个批次元素打包。

    Parameters
    ----------
    `series` : list[MultivariateSeries]
    `patch_size` : int
        P
    `max_variates` : int, 可选
        每个批次元素的变量上限，默认值：32
    `rng` : Rng | None, 可选
        偏移与混排使用的随机数；为 None 时偏移为 0 且不混排，默认值：None
    `shuffle` : ShuffleConfig | None, 可选
        默认值：None (不混排)
    `random_offset` : bool, 可选
        默认值：True

    Returns
    -------
    Batch
    """
    if not series:
        raise DataFormatError("cannot preprocess an empty batch")
    if patch_size < 1:
        raise ConfigError("patch_size", "must be >= 1")
    if max_variates < 1:
        raise ConfigError("max_variates", "must be >= 1")

    rows: list[_Row] = []
    lengths = []
    for index, item in enumerate(series):
        offset = int(rng.integers(0, patch_size)) if (rng is not None and random_offset) else 0
        # 窗口起点后移 offset，至少保留最后一个时间步
        start = min(offset, item.length - 1)
        kept_values, kept_weights = item.values[:, start:], item.weights[:, start:]
        total = padded_length(kept_values.shape[-1], patch_size)
        lengths.append(total)
        values, weights = left_pad(np.where(kept_weights > 0, kept_values, 0.0), kept_weights, total)
        for variate in range(item.num_variates):
            rows.append(_Row(values[variate], weights[variate], index, (index, variate)))

    shuffled = False
    if shuffle is not None and rng is not None and shuffle.probability > 0 and rng.random() < shuffle.probability:
        if len(series) < 2:
            logger.warning("variate shuffling skipped: the batch holds a single series")
        else:
            shuffled = True
    if shuffled:
        units = [[rows[i]] for i in _shuffle_order(rows, shuffle, rng)]
    else:
        units = []
        for index in range(len(series)):
            own = [row for row in rows if row.group == index]
            units.extend(own[i : i + max_variates] for i in range(0, len(own), max_variates))
    items = _pack(units, max_variates)

    width = max(len(item) for item in items)
    length = max(lengths)
    values = np.zeros((len(items), width, length))
    weights = np.zeros((len(items), width, length))
    groups = np.empty((len(items), width), dtype=np.int64)
    sources: list[list] = []
    for b, item in enumerate(items):
        slots = []
        for m in range(width):
            if m < len(item):
                row = item[m]
                values[b, m], weights[b, m] = left_pad(row.values, row.weights, length)
                groups[b, m] = row.group
                slots.append(row.source)
            else:
                # 填充变量各自成组
                groups[b, m] = -(m + 1)
                slots.append(None)
        sources.append(slots)
    id_mask = groups[:, :, None] == groups[:, None, :]
    return Batch(values, weights, id_mask, sources)


# end def
def build_id_mask(group_ids) -> np.ndarray:
    """由每个变量的组号构造 M×M 的 ID 掩码"""
    group_ids = np.asarray(group_ids)
    return group_ids[:, None] == group_ids[None, :]


# end def
def sample_training_windows(series: list[MultivariateSeries], context_length: int, rng: Rng) -> list[MultivariateSeries]:
    """每条序列随机截取一个不超过 context_length 的窗口

    Parameters
    ----------
    `series` : list[MultivariateSeries]
    `context_length` : int
    `rng` : Rng

    Returns
    -------
    list[MultivariateSeries]
    """
    windows = []
    for item in series:
        if item.length <= context_length:
            windows.append(item)
            continue
        start = int(rng.integers(0, item.length - context_length + 1))
        windows.append(item.window(start, start + context_length))
    return windows


# end def
