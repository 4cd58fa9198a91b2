"""Packed bit sequences and integer encodings of bit windows.

Bit-order convention, used everywhere in the package and round-trip tested:
the most recent bit of a window sits in the lowest position of its integer
encoding.  Concretely, a context (x_{t-1}, ..., x_{t-p}) passed most recent
first maps bit j of the tuple to bit j of the integer, while a future
(x_t, ..., x_{t+n}) passed in time order maps x_{t+n} (the most recent) to
bit 0.  Appending a freshly emitted bit x to either kind of window is then
``index = (index << 1) | x`` followed by masking.
"""

from __future__ import annotations

import numpy as np

MAX_INDEX_WIDTH = 30


def _check_width(width: int) -> None:
    if width < 1:
        raise ValueError(f"window width must be >= 1, got {width}")
    if width > MAX_INDEX_WIDTH:
        raise ValueError(
            f"window width {width} exceeds the {MAX_INDEX_WIDTH}-bit indexing cap"
        )


def _check_bits(bits) -> None:
    for b in bits:
        if b not in (0, 1):
            raise ValueError(f"window bits must be 0 or 1, got {b!r}")


def encode_context(bits) -> int:
    """Encode a context tuple (x_{t-1}, ..., x_{t-p}), most recent first."""
    bits = tuple(bits)
    _check_width(len(bits))
    _check_bits(bits)
    value = 0
    for j, b in enumerate(bits):
        value |= int(b) << j
    return value


def decode_context(index: int, p: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_context` for a width-p context."""
    _check_width(p)
    if not 0 <= index < (1 << p):
        raise ValueError(f"context index {index} out of range for p={p}")
    return tuple((index >> j) & 1 for j in range(p))


def encode_future(bits) -> int:
    """Encode a future tuple (x_t, ..., x_{t+n}) given in time order."""
    bits = tuple(bits)
    _check_width(len(bits))
    _check_bits(bits)
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return value


def decode_future(index: int, width: int) -> tuple[int, ...]:
    """Inverse of :func:`encode_future` for a width-bit future."""
    _check_width(width)
    if not 0 <= index < (1 << width):
        raise ValueError(f"future index {index} out of range for width={width}")
    return tuple((index >> (width - 1 - j)) & 1 for j in range(width))


class BitSequence:
    """Immutable binary stream stored byte-packed (little-endian bit order).

    The packed layout matches the on-disk interchange format: the earliest
    bit of the stream is the lowest bit of the first byte.
    """

    __slots__ = ("_packed", "_length")

    def __init__(self, packed: np.ndarray, length: int):
        packed = np.asarray(packed, dtype=np.uint8)
        if length < 0 or length > packed.size * 8 or packed.size * 8 - length >= 8:
            raise ValueError(
                f"length {length} inconsistent with {packed.size} packed bytes"
            )
        self._packed = packed
        self._length = int(length)

    @classmethod
    def from_bits(cls, bits) -> "BitSequence":
        """Pack an iterable/array of {0,1} values."""
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1:
            raise ValueError("bits must be one-dimensional")
        if arr.size and arr.max() > 1:
            raise ValueError("bits must contain only 0 and 1")
        return cls(np.packbits(arr, bitorder="little"), arr.size)

    def to_array(self) -> np.ndarray:
        """Unpack to a uint8 array of 0/1 values."""
        if self._length == 0:
            return np.zeros(0, dtype=np.uint8)
        return np.unpackbits(self._packed, count=self._length, bitorder="little")

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, i):
        if isinstance(i, slice):
            return BitSequence.from_bits(self.to_array()[i])
        i = int(i)
        if i < 0:
            i += self._length
        if not 0 <= i < self._length:
            raise IndexError("bit index out of range")
        return int((self._packed[i >> 3] >> (i & 7)) & 1)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitSequence):
            return NotImplemented
        return self._length == other._length and np.array_equal(
            self._packed, other._packed
        )

    def __repr__(self) -> str:
        return f"BitSequence(length={self._length})"
