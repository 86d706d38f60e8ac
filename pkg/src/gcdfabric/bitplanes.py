"""Bit-plane packing.

A group of ``width`` bits observed over ``n`` lanes is stored as a ``uint64``
array of shape ``(width, ceil(n / 64))``: row ``i`` holds bit ``i`` of every
lane, lane ``j`` at bit ``j % 64`` of word ``j // 64``.  Padding lanes are
zero on input and undefined on output.
"""

import numpy as np


def n_words(n_lanes: int) -> int:
    return max(1, -(-n_lanes // 64))


def pack(values, width: int) -> np.ndarray:
    """Pack unsigned lane values (each < 2**width, width <= 64) into planes."""
    vals = np.ascontiguousarray(values, dtype=np.uint64).reshape(-1)
    n = vals.shape[0]
    padded = np.zeros(n_words(n) * 64, dtype=np.uint64)
    padded[:n] = vals
    bits = np.unpackbits(padded.view(np.uint8).reshape(-1, 8), axis=1, bitorder="little")
    packed = np.packbits(bits.T[:width], axis=1, bitorder="little")
    return np.ascontiguousarray(packed).view(np.uint64)


def unpack(planes: np.ndarray, n_lanes: int) -> np.ndarray:
    """Inverse of :func:`pack`; returns ``uint64`` lane values."""
    width = planes.shape[0]
    raw = np.ascontiguousarray(planes, dtype=np.uint64).view(np.uint8)
    bits = np.zeros((n_lanes, 64), dtype=np.uint8)
    if width:
        bits[:, :width] = np.unpackbits(raw, axis=1, bitorder="little")[:, :n_lanes].T
    return np.packbits(bits, axis=1, bitorder="little").view(np.uint64).reshape(n_lanes)


def gather(planes: np.ndarray, lanes: np.ndarray) -> np.ndarray:
    """Values of selected lanes only (cost proportional to ``len(lanes)``)."""
    lanes = np.asarray(lanes, dtype=np.int64)
    words = planes[:, lanes // 64]
    bits = (words >> (lanes % 64).astype(np.uint64)) & np.uint64(1)
    shifts = np.arange(planes.shape[0], dtype=np.uint64)[:, None]
    return np.bitwise_or.reduce(bits << shifts, axis=0) if planes.shape[0] else np.zeros(len(lanes), np.uint64)


def lane_mask(planes_row: np.ndarray, n_lanes: int) -> np.ndarray:
    """One plane row as a boolean array over lanes."""
    raw = np.ascontiguousarray(planes_row, dtype=np.uint64).view(np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n_lanes].astype(bool)


def pack_int(value: int, width: int) -> np.ndarray:
    """Single-lane packing for arbitrary widths."""
    return np.array([[(value >> i) & 1] for i in range(width)], dtype=np.uint64).reshape(width, 1)


def unpack_int(planes: np.ndarray) -> int:
    value = 0
    for i in range(planes.shape[0]):
        value |= int(planes[i, 0] & np.uint64(1)) << i
    return value
