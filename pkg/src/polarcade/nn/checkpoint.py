"""Flat checkpoint format: a JSON manifest line followed by raw array bytes.

Arrays are written little-endian in manifest order, so a load on any
platform reproduces every parameter bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


def _canonical_dtype(dtype: np.dtype) -> str:
    return np.dtype(dtype).newbyteorder("<").str


def save_arrays(path: str | Path, arrays: dict[str, np.ndarray]):
    entries = [
        {"name": name, "shape": list(arr.shape), "dtype": _canonical_dtype(arr.dtype)}
        for name, arr in arrays.items()
    ]
    manifest = {"version": FORMAT_VERSION, "entries": entries}
    with open(path, "wb") as fh:
        fh.write(json.dumps(manifest, sort_keys=True).encode("utf-8"))
        fh.write(b"\n")
        for name, arr in arrays.items():
            fh.write(np.ascontiguousarray(arr, dtype=_canonical_dtype(arr.dtype)).tobytes())


def load_arrays(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, "rb") as fh:
        manifest = json.loads(fh.readline().decode("utf-8"))
        if manifest["version"] != FORMAT_VERSION:
            raise ValueError(f"unsupported checkpoint version {manifest['version']}")
        out: dict[str, np.ndarray] = {}
        for entry in manifest["entries"]:
            dtype = np.dtype(entry["dtype"])
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            raw = fh.read(count * dtype.itemsize)
            if len(raw) != count * dtype.itemsize:
                raise ValueError(f"checkpoint truncated at entry {entry['name']!r}")
            out[entry["name"]] = np.frombuffer(raw, dtype=dtype).reshape(entry["shape"]).copy()
        if fh.read(1):
            raise ValueError("trailing bytes after final checkpoint entry")
    return out
