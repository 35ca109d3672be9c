"""
结果表格与摘要的读写
Author: ICO
Date: 2024-03-22"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import yaml

from error import DataFormatError

FORECAST_KEY_COLUMNS = ("series", "variate", "context_end", "step")


def level_column(level: float) -> str:
    """分位数列名，例如 0.1 -> q0.1"""
    return f"q{float(level):g}"


# end def
def write_table(frame: pd.DataFrame, path: str | Path) -> Path:
    """写出 CSV，浮点数保留 17 位有效数字，可无损读回且重复运行字节一致"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return path


# end def
def read_forecast_table(path: str | Path) -> pd.DataFrame:
    frame = pd.read_csv(path, float_precision="round_trip")
    missing = [c for c in FORECAST_KEY_COLUMNS + ("point",) if c not in frame.columns]
    if missing:
        raise DataFormatError(f"forecast table lacks columns {missing}", field=missing[0])
    return frame


# end def
def _plain(value, keep_infinite: bool = False):
    if isinstance(value, dict):
        return {str(k): _plain(v, keep_infinite) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v, keep_infinite) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not keep_infinite and not np.isfinite(value):
        return None
    return value


# end def
def write_summary(summary: dict, path: str | Path) -> Path:
    """写出 JSON 摘要，非有限值写为 null"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(summary), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# end def
def write_yaml(document: dict, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(_plain(document, keep_infinite=True), sort_keys=False), encoding="utf-8")
    return path


# end def
