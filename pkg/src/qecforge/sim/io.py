"""Shot-table files.

``b8`` layout: one record per shot, row-major.  A record holds the shot's
bits in order (detectors first, then observables) packed little-endian
within each byte, so bit ``i`` lives in byte ``i // 8`` at position
``i % 8``.  A record is ``ceil(num_bits / 8)`` bytes and the file has no
header; the reader must know ``num_bits``.

The CSV fallback writes one shot per line as a string of ``0``/``1``.
"""
from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

PathLike = Union[str, Path]


def to_b8(table: np.ndarray) -> bytes:
    table = np.asarray(table, dtype=bool)
    if table.ndim != 2:
        raise ValueError("expected a 2-D shot table")
    return np.packbits(table, axis=1, bitorder="little").tobytes()


def from_b8(data: bytes, num_bits: int) -> np.ndarray:
    width = (num_bits + 7) // 8
    if width == 0:
        if data:
            raise ValueError("nonempty data for zero-width records")
        return np.zeros((0, 0), dtype=bool)
    if len(data) % width:
        raise ValueError(f"{len(data)} bytes is not a whole number of {width}-byte records")
    raw = np.frombuffer(data, dtype=np.uint8).reshape(-1, width)
    return np.unpackbits(raw, axis=1, count=num_bits, bitorder="little").astype(bool)


def to_csv(table: np.ndarray) -> str:
    table = np.asarray(table, dtype=bool)
    return "".join("".join("1" if b else "0" for b in row) + "\n" for row in table)


def from_csv(text: str) -> np.ndarray:
    rows = [line.strip().replace(",", "") for line in text.splitlines() if line.strip()]
    if not rows:
        return np.zeros((0, 0), dtype=bool)
    width = len(rows[0])
    if any(len(r) != width or set(r) - {"0", "1"} for r in rows):
        raise ValueError("CSV rows must be equal-length strings of 0/1")
    return np.array([[c == "1" for c in r] for r in rows], dtype=bool).reshape(len(rows), width)


def write_table(path: PathLike, table: np.ndarray, fmt: str = "b8") -> None:
    path = Path(path)
    if fmt == "b8":
        path.write_bytes(to_b8(table))
    elif fmt == "csv":
        path.write_text(to_csv(table))
    else:
        raise ValueError(f"unknown format {fmt!r}")


def read_table(path: PathLike, num_bits: int = None, fmt: str = "b8") -> np.ndarray:
    path = Path(path)
    if fmt == "b8":
        if num_bits is None:
            raise ValueError("b8 files need num_bits")
        return from_b8(path.read_bytes(), num_bits)
    if fmt == "csv":
        return from_csv(path.read_text())
    raise ValueError(f"unknown format {fmt!r}")
