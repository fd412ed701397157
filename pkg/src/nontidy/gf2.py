"""Dense GF(2) linear algebra on bit-packed rows.

Each row (and each vector) is a Python int whose bit ``j`` holds column
``j``; XOR of two ints is a word-parallel row operation.  Pivots are always
taken at the lowest available index so reduced forms are reproducible.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Sequence


@dataclass(frozen=True)
class BitVector:
    length: int
    bits: int = 0

    def __post_init__(self):
        if self.length < 0:
            raise ValueError("negative length")
        if self.bits >> self.length:
            raise ValueError("bits set beyond vector length")

    @classmethod
    def from_list(cls, values: Sequence[int]) -> "BitVector":
        bits = 0
        for j, v in enumerate(values):
            if v & 1:
                bits |= 1 << j
        return cls(len(values), bits)

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> "BitVector":
        bits = 0
        for j in support:
            bits ^= 1 << j
        return cls(length, bits)

    @classmethod
    def ones(cls, length: int) -> "BitVector":
        return cls(length, (1 << length) - 1)

    @classmethod
    def random(cls, length: int, rng: random.Random) -> "BitVector":
        return cls(length, rng.getrandbits(length) if length else 0)

    def __getitem__(self, j: int) -> int:
        if not 0 <= j < self.length:
            raise IndexError(j)
        return (self.bits >> j) & 1

    def __xor__(self, other: "BitVector") -> "BitVector":
        if other.length != self.length:
            raise ValueError("length mismatch")
        return BitVector(self.length, self.bits ^ other.bits)

    __add__ = __xor__

    def __len__(self) -> int:
        return self.length

    def is_zero(self) -> bool:
        return self.bits == 0

    def weight(self) -> int:
        return bin(self.bits).count("1")

    def support(self) -> list[int]:
        return [j for j in range(self.length) if (self.bits >> j) & 1]

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]

    def __str__(self) -> str:
        return "".join(str(b) for b in self.to_list())


class BitMatrix:
    """rows x cols matrix over GF(2); ``data[i]`` is row ``i`` as an int."""

    def __init__(self, rows: int, cols: int, data: Sequence[int] | None = None):
        self.rows = rows
        self.cols = cols
        if data is None:
            data = [0] * rows
        if len(data) != rows:
            raise ValueError("row data does not match row count")
        mask = (1 << cols) - 1
        if any(r & ~mask for r in data):
            raise ValueError("row data wider than column count")
        self.data = list(data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, k: int) -> "BitMatrix":
        return cls(k, k, [1 << i for i in range(k)])

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> "BitMatrix":
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, [BitVector.from_list(r).bits for r in rows])

    @classmethod
    def random(cls, rows: int, cols: int, rng: random.Random) -> "BitMatrix":
        return cls(rows, cols, [rng.getrandbits(cols) if cols else 0 for _ in range(rows)])

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return (self.data[i] >> j) & 1

    def row(self, i: int) -> BitVector:
        return BitVector(self.cols, self.data[i])

    def column(self, j: int) -> BitVector:
        if not 0 <= j < self.cols:
            raise IndexError(j)
        return BitVector.from_support(self.rows, (i for i, r in enumerate(self.data) if (r >> j) & 1))

    def transpose(self) -> "BitMatrix":
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            bit = 1 << i
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= bit
                r ^= low
        return BitMatrix(self.cols, self.rows, out)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and (self.rows, self.cols) == (other.rows, other.cols)
            and self.data == other.data
        )

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch")
        out = []
        for r in self.data:
            acc = 0
            while r:
                low = r & -r
                acc ^= other.data[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return BitMatrix(self.rows, other.cols, out)

    def left_apply(self, x: BitVector) -> BitVector:
        """``x · M``: XOR of the rows selected by ``x``."""
        if x.length != self.rows:
            raise ValueError("vector length does not match row count")
        acc = 0
        bits = x.bits
        while bits:
            low = bits & -bits
            acc ^= self.data[low.bit_length() - 1]
            bits ^= low
        return BitVector(self.cols, acc)

    def right_apply(self, y: BitVector) -> BitVector:
        """``M · y`` for a column vector ``y``."""
        if y.length != self.cols:
            raise ValueError("vector length does not match column count")
        out = 0
        for i, r in enumerate(self.data):
            if bin(r & y.bits).count("1") & 1:
                out |= 1 << i
        return BitVector(self.rows, out)

    def is_zero(self) -> bool:
        return not any(self.data)

    def dump(self) -> str:
        return "\n".join(str(self.row(i)) for i in range(self.rows))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _echelon(rows: Sequence[int]) -> tuple[dict[int, tuple[int, int]], list[int]]:
    """Reduce rows; returns ``pivot column -> (reduced row, combination)`` and
    the combinations of rows that reduced to zero.

    A combination is a bitmask over the original row indices.
    """
    pivots: dict[int, tuple[int, int]] = {}
    null: list[int] = []
    for i, r in enumerate(rows):
        combo = 1 << i
        while r:
            p = (r & -r).bit_length() - 1
            hit = pivots.get(p)
            if hit is None:
                pivots[p] = (r, combo)
                break
            r ^= hit[0]
            combo ^= hit[1]
        else:
            null.append(combo)
    return pivots, null


def rank(M: BitMatrix) -> int:
    pivots: dict[int, int] = {}
    for r in M.data:
        while r:
            p = (r & -r).bit_length() - 1
            q = pivots.get(p)
            if q is None:
                pivots[p] = r
                break
            r ^= q
    return len(pivots)


def solve_in_span(rows: BitMatrix, target: BitVector) -> BitVector | None:
    """Coefficients ``x`` with ``x · rows = target``, or None."""
    if target.length != rows.cols:
        raise ValueError(f"width mismatch: {target.length} != {rows.cols}")
    pivots, _ = _echelon(rows.data)
    r, combo = target.bits, 0
    while r:
        p = (r & -r).bit_length() - 1
        hit = pivots.get(p)
        if hit is None:
            return None
        r ^= hit[0]
        combo ^= hit[1]
    x = BitVector(rows.rows, combo)
    assert rows.left_apply(x) == target
    return x


def kernel_basis(M: BitMatrix) -> list[BitVector]:
    """Basis of the left kernel ``{x : x · M = 0}``."""
    _, null = _echelon(M.data)
    return [BitVector(M.rows, c) for c in null]


def span_contains(rows: BitMatrix, target: BitVector) -> bool:
    return solve_in_span(rows, target) is not None
