"""Matrix files: sparse "i,j,re,im" CSV and a little-endian binary format.

Binary layout: the 8 magic bytes ``SPRGMAT1``, the dimension as uint64, then
n*n (re, im) float64 pairs in row-major order.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .linalg import as_matrix

MAGIC = b"SPRGMAT1"
SCHEMA_LINE = "# specrange-schema v1"


def fmt(x: float) -> str:
    """17 significant digits, enough to round-trip a float64."""
    return format(float(x), ".17g")


def write_binary(path, x) -> None:
    x = as_matrix(x)
    n = x.shape[0]
    pairs = np.empty((n, n, 2), dtype="<f8")
    pairs[..., 0] = x.real
    pairs[..., 1] = x.imag
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", n))
        fh.write(pairs.tobytes())


def read_binary(path) -> np.ndarray:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise ValueError(f"{path}: not a specrange binary matrix")
    (n,) = struct.unpack("<Q", data[8:16])
    if len(data) - 16 != 16 * n * n:
        raise ValueError(f"{path}: expected {2 * n * n} float64 values, found {(len(data) - 16) // 8}")
    # (re, im) pairs are exactly the complex128 layout; a view keeps signed zeros
    return np.frombuffer(data[16:], dtype="<c16").reshape(n, n).astype(np.complex128)


def write_csv(path, x) -> None:
    """Nonzero entries only; the dimension goes in a header comment."""
    x = as_matrix(x)
    n = x.shape[0]
    lines = [SCHEMA_LINE, f"# n={n}", "i,j,re,im"]
    for i, j in zip(*np.nonzero(x)):
        z = x[i, j]
        lines.append(f"{i},{j},{fmt(z.real)},{fmt(z.imag)}")
    Path(path).write_text("\n".join(lines) + "\n")


def read_csv(path) -> np.ndarray:
    n = None
    rows = []
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if line[1:].strip().startswith("n="):
                n = int(line[1:].strip()[2:])
            continue
        if line.startswith("i,"):
            continue
        i, j, re, im = line.split(",")
        rows.append((int(i), int(j), float(re), float(im)))
    if n is None:
        n = 1 + max(max(i, j) for i, j, _, _ in rows)
    x = np.zeros((n, n), dtype=np.complex128)
    for i, j, re, im in rows:
        x[i, j] = complex(re, im)
    return x


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(8)
    if head == MAGIC:
        return read_binary(path)
    return read_csv(path)


def _json_text(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return "null"
        text = fmt(x)
        return text if any(ch in text for ch in ".en") else text + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {_json_text(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{_json_text(v, indent, level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps_json(obj, indent: int = 2) -> str:
    """JSON text with every float printed to 17 significant digits."""
    return _json_text(obj, indent, 0) + "\n"


def write_json(path, obj) -> None:
    Path(path).write_text(dumps_json(obj))
