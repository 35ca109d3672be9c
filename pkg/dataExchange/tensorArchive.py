"""
命名数组归档：文本清单 + 小端 float64 二进制
Author: ICO
Date: 2024-03-22"""

import json
from pathlib import Path

import numpy as np

from error import CheckpointError

ARCHIVE_FORMAT = "obsforecast-archive"
ARCHIVE_VERSION = 1
BYTES_PER_VALUE = 8


def archive_paths(directory: str | Path, stem: str = "checkpoint") -> tuple[Path, Path]:
    directory = Path(directory)
    return directory / f"{stem}.manifest", directory / f"{stem}.bin"


# end def
def write_archive(directory: str | Path, arrays: dict[str, np.ndarray], meta: dict, stem: str = "checkpoint") -> Path:
    """按清单顺序写出数组

    Parameters
    ----------
    `directory` : str | Path
        输出目录
    `arrays` : dict[str, np.ndarray]
        有序的命名数组
    `meta` : dict
        写入清单的附加信息 (需可 JSON 序列化)

    Returns
    -------
    Path
        清单文件路径
    """
    manifest_path, blob_path = archive_paths(directory, stem)
    manifest_path.parent.mkdir(parents=True, exist_ok=True)
    entries = []
    offset = 0
    with open(blob_path, "wb") as blob:
        for name, array in arrays.items():
            data = np.ascontiguousarray(array, dtype="<f8")
            blob.write(data.tobytes())
            entries.append({"name": name, "shape": list(data.shape), "offset": offset, "count": int(data.size)})
            offset += data.size * BYTES_PER_VALUE
    manifest = {"format": ARCHIVE_FORMAT, "version": ARCHIVE_VERSION, "meta": meta, "tensors": entries}
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=False) + "\n", encoding="utf-8")
    return manifest_path


# end def
def read_archive(directory: str | Path, stem: str = "checkpoint") -> tuple[dict, dict[str, np.ndarray]]:
    """读取归档并检查清单与二进制是否一致

    Returns
    -------
    tuple[dict, dict[str, np.ndarray]]
        清单中的附加信息与有序的命名数组

    Raises
    ------
    CheckpointError
        清单缺失或损坏，偏移/元素数不一致，二进制被截断
    """
    manifest_path, blob_path = archive_paths(directory, stem)
    if not manifest_path.exists() or not blob_path.exists():
        raise CheckpointError(f"missing {manifest_path.name} or {blob_path.name} in {directory}")
    try:
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise CheckpointError(f"manifest is not valid JSON: {exc.msg}") from None
    if manifest.get("format") != ARCHIVE_FORMAT:
        raise CheckpointError(f"unexpected manifest format {manifest.get('format')!r}")

    blob = blob_path.read_bytes()
    arrays: dict[str, np.ndarray] = {}
    expected_offset = 0
    for entry in manifest.get("tensors", []):
        name = entry["name"]
        shape = tuple(int(s) for s in entry["shape"])
        count = int(entry["count"])
        if int(np.prod(shape, dtype=np.int64)) != count:
            raise CheckpointError(f"tensor '{name}': shape {shape} does not hold {count} values")
        if int(entry["offset"]) != expected_offset:
            raise CheckpointError(f"tensor '{name}': offset {entry['offset']} != expected {expected_offset}")
        if name in arrays:
            raise CheckpointError(f"tensor '{name}' listed twice")
        end = expected_offset + count * BYTES_PER_VALUE
        if end > len(blob):
            raise CheckpointError(
                f"blob truncated: tensor '{name}' needs bytes up to {end}, "
                f"file has {len(blob)} ({end - len(blob)} bytes missing)"
            )
        arrays[name] = np.frombuffer(blob, dtype="<f8", count=count, offset=expected_offset).astype(np.float64).reshape(shape)
        expected_offset = end
    if expected_offset != len(blob):
        raise CheckpointError(f"blob has {len(blob) - expected_offset} trailing bytes not listed in the manifest")
    return manifest.get("meta", {}), arrays


# end def
