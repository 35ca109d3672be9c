"""
数据集文件：每行一条 JSON 记录
Author: ICO
Date: 2024-03-21

字段：id (字符串)，freq (频率代码)，values (M 个长度为 L 的数组，缺失为 null)，
可选 weights (同形状，默认全 1)，可选 start，可选 metric_type。
"""

import json
import math
from pathlib import Path

import numpy as np
import pandas as pd
from loguru import logger

from error import DataFormatError
from seriesData import MultivariateSeries

METRIC_TYPES = ("count", "gauge", "rate")


def _encode_row(row: np.ndarray) -> list:
    return [float(v) if math.isfinite(v) else None for v in row.tolist()]


# end def
def series_to_record(series: MultivariateSeries) -> dict:
    record = {
        "id": series.id,
        "freq": series.freq,
        "values": [_encode_row(row) for row in series.values],
    }
    # 权重与“有限值为 1”一致时省略
    if not np.array_equal(series.weights, np.isfinite(series.values).astype(np.float64)):
        record["weights"] = series.weights.tolist()
    if series.start is not None:
        record["start"] = series.start
    if series.metric_type is not None:
        record["metric_type"] = series.metric_type
    return record


# end def
def _field(record: dict, name: str, line: int):
    if name not in record:
        raise DataFormatError("missing required field", line=line, field=name)
    return record[name]


# end def
def record_to_series(record: dict, line: int) -> MultivariateSeries:
    """把一条记录转换为序列，错误信息带上行号与字段名"""
    if not isinstance(record, dict):
        raise DataFormatError("record is not an object", line=line)
    series_id = _field(record, "id", line)
    freq = _field(record, "freq", line)
    rows = _field(record, "values", line)
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise DataFormatError("must be a non-empty array of arrays", line=line, field="values")
    lengths = {len(r) for r in rows}
    if len(lengths) != 1:
        raise DataFormatError(f"ragged variate lengths {sorted(lengths)}", line=line, field="values")
    try:
        values = np.array([[np.nan if v is None else float(v) for v in r] for r in rows], dtype=np.float64)
    except (TypeError, ValueError):
        raise DataFormatError("contains a non-numeric entry", line=line, field="values") from None
    weights = record.get("weights")
    metric_type = record.get("metric_type")
    if metric_type is not None and metric_type not in METRIC_TYPES:
        raise DataFormatError(f"unknown metric type '{metric_type}'", line=line, field="metric_type")
    try:
        return MultivariateSeries(str(series_id), str(freq), values, weights, record.get("start"), metric_type)
    except DataFormatError as exc:
        raise DataFormatError(str(exc), line=line) from None


# end def
def impute_missing(series: MultivariateSeries) -> MultivariateSeries:
    """按 metric_type 填补缺失值

    count 用 0 填补，gauge 与 rate 做线性插值 (两端外推为最近值)，
    没有标注类型的序列保持 NaN、权重为 0。
    """
    if series.metric_type is None or np.all(np.isfinite(series.values)):
        return series
    frame = pd.DataFrame(series.values.T)
    match series.metric_type:
        case "count":
            filled = frame.fillna(0.0)
        case "gauge" | "rate":
            filled = frame.interpolate(method="linear", limit_direction="both")
        case _:
            return series
    # end match
    values = filled.to_numpy().T
    weights = np.where(np.isfinite(values), 1.0, 0.0)
    return MultivariateSeries(series.id, series.freq, values, weights, series.start, series.metric_type)


# end def
def load_dataset(path: str | Path, impute: bool = False) -> list[MultivariateSeries]:
    """读取数据集文件

    Parameters
    ----------
    `path` : str | Path
    `impute` : bool, 可选
        是否按 metric_type 填补缺失值，默认值：False

    Returns
    -------
    list[MultivariateSeries]

    Raises
    ------
    DataFormatError
        记录格式错误 (带行号)
    """
    dataset = []
    with open(path, "r", encoding="utf-8") as handle:
        for number, text in enumerate(handle, start=1):
            if not text.strip():
                continue
            try:
                record = json.loads(text)
            except json.JSONDecodeError as exc:
                raise DataFormatError(f"invalid JSON ({exc.msg})", line=number) from None
            series = record_to_series(record, number)
            dataset.append(impute_missing(series) if impute else series)
    logger.debug(f"loaded {len(dataset)} series from {path}")
    return dataset


# end def
def save_dataset(dataset: list[MultivariateSeries], path: str | Path) -> None:
    """写出数据集文件，浮点数按最短可往返的十进制表示"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for series in dataset:
            handle.write(json.dumps(series_to_record(series), allow_nan=False, separators=(",", ":")) + "\n")
    logger.debug(f"saved {len(dataset)} series to {path}")


# end def
