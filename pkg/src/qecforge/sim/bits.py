"""Bit-packing helpers: shots live in little-endian bit order inside uint64 words."""
from __future__ import annotations

import numpy as np

ALL_ONES = np.uint64(0xFFFFFFFFFFFFFFFF)


def num_words(num_bits: int) -> int:
    return max(1, (num_bits + 63) // 64)


def pack(bits: np.ndarray) -> np.ndarray:
    """Pack a bool array along its last axis into uint64 words."""
    bits = np.asarray(bits, dtype=bool)
    n = bits.shape[-1]
    w = num_words(n)
    pad = w * 64 - n
    if pad:
        bits = np.concatenate([bits, np.zeros(bits.shape[:-1] + (pad,), dtype=bool)], axis=-1)
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return np.ascontiguousarray(packed).view("<u8").reshape(bits.shape[:-1] + (w,))


def unpack(words: np.ndarray, num_bits: int) -> np.ndarray:
    """Inverse of :func:`pack`."""
    words = np.ascontiguousarray(words, dtype="<u8")
    as_bytes = words.view(np.uint8).reshape(words.shape[:-1] + (words.shape[-1] * 8,))
    return np.unpackbits(as_bytes, axis=-1, count=num_bits, bitorder="little").astype(bool)
