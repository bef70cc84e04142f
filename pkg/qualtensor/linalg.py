"""
qualtensor/linalg.py
─────────────────────
Exact rational matrices.

Rank and determinant use fraction-free (Bareiss) elimination on an
integer copy of the matrix: every row is scaled by the lcm of its
denominators first, so the elimination never leaves the integers.
Inverse and kernel computations use plain Gauss-Jordan over Fraction.

Indexing
────────
  rows[i][j]      0-based, for internal loops
  entry(i, j)     1-based, matching the tensor conventions
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from qualtensor.errors import ShapeMismatchError, UnsupportedShapeError


class RationalMatrix:
    """Immutable rectangular matrix with Fraction entries."""

    __slots__ = ("_rows", "_cols")

    def __init__(self, rows: Iterable[Iterable[object]], cols: Optional[int] = None) -> None:
        data = tuple(tuple(Fraction(v) for v in row) for row in rows)
        widths = {len(row) for row in data}
        if len(widths) > 1:
            raise ShapeMismatchError(
                f"matrix must be rectangular, got row lengths {sorted(widths)}"
            )
        width = widths.pop() if widths else (cols or 0)
        if cols is not None and cols != width:
            raise ShapeMismatchError(f"expected {cols} columns, got {width}")
        self._rows = data
        self._cols = width

    # ── Constructors ──────────────────────────────────────────────────────────

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[int(i == j) for j in range(n)] for i in range(n)])

    # ── Accessors ─────────────────────────────────────────────────────────────

    @property
    def rows(self) -> tuple[tuple[Fraction, ...], ...]:
        return self._rows

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    @property
    def n_cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return self.n_rows, self.n_cols

    @property
    def is_square(self) -> bool:
        return self.n_rows == self.n_cols

    def column(self, j: int) -> tuple[Fraction, ...]:
        return tuple(row[j - 1] for row in self._rows)

    def to_array(self) -> np.ndarray:
        return np.array([[float(v) for v in row] for row in self._rows], dtype=float).reshape(
            self.n_rows, self.n_cols
        )

    # ── Algebra ───────────────────────────────────────────────────────────────

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(
            [[self._rows[i][j] for i in range(self.n_rows)] for j in range(self.n_cols)],
            cols=self.n_rows,
        )

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.n_cols != other.n_rows:
            raise ShapeMismatchError(
                f"cannot multiply {self.n_rows}x{self.n_cols} by {other.n_rows}x{other.n_cols}"
            )
        cols = other.transpose().rows
        return RationalMatrix(
            [[sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in cols] for row in self._rows],
            cols=other.n_cols,
        )

    # ── Exact elimination ────────────────────────────────────────────────────

    def rank(self) -> int:
        return _bareiss_rank(_integer_rows(self._rows)[0])

    def determinant(self) -> Fraction:
        if not self.is_square:
            raise UnsupportedShapeError(
                f"determinant needs a square matrix, got {self.n_rows}x{self.n_cols}"
            )
        if self.n_rows == 0:
            return Fraction(1)
        rows, scales = _integer_rows(self._rows)
        return Fraction(_bareiss_determinant(rows), math.prod(scales))

    def inverse(self) -> Optional["RationalMatrix"]:
        """Gauss-Jordan inverse, or None when the matrix is singular."""
        if not self.is_square:
            raise UnsupportedShapeError(
                f"inverse needs a square matrix, got {self.n_rows}x{self.n_cols}"
            )
        n = self.n_rows
        left = [list(row) for row in self._rows]
        right = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]

        for col in range(n):
            pivot = next((r for r in range(col, n) if left[r][col] != 0), None)
            if pivot is None:
                return None
            left[col], left[pivot] = left[pivot], left[col]
            right[col], right[pivot] = right[pivot], right[col]

            scale = left[col][col]
            left[col] = [v / scale for v in left[col]]
            right[col] = [v / scale for v in right[col]]

            for r in range(n):
                factor = left[r][col]
                if r == col or factor == 0:
                    continue
                left[r] = [a - factor * b for a, b in zip(left[r], left[col])]
                right[r] = [a - factor * b for a, b in zip(right[r], right[col])]

        return RationalMatrix(right)

    def left_kernel_vector(self) -> Optional[tuple[Fraction, ...]]:
        """A nonzero y with yᵀM = 0, or None when the rows are independent."""
        basis = _null_space(self.transpose())
        return basis[0] if basis else None

    # ── Dunder ────────────────────────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self.shape, self._rows))

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(v) for v in row) + "]" for row in self._rows)
        return f"RationalMatrix([{body}])"


# ──────────────────────────────────────────────────────────────────────────────
# Helpers
# ──────────────────────────────────────────────────────────────────────────────

def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators. Returns (rows, scales)."""
    out, scales = [], []
    for row in rows:
        scale = math.lcm(*(v.denominator for v in row)) if row else 1
        out.append([int(v * scale) for v in row])
        scales.append(scale)
    return out, scales


def _bareiss_rank(rows: list[list[int]]) -> int:
    m = [list(row) for row in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    rank, prev = 0, 1

    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if m[r][col] != 0), None)
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        p = m[rank][col]
        for r in range(rank + 1, n_rows):
            lead = m[r][col]
            for c in range(col + 1, n_cols):
                m[r][c] = (m[r][c] * p - lead * m[rank][c]) // prev
            m[r][col] = 0
        prev = p
        rank += 1

    return rank


def _bareiss_determinant(rows: list[list[int]]) -> int:
    m = [list(row) for row in rows]
    n = len(m)
    sign, prev = 1, 1

    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]

    return sign * m[n - 1][n - 1]


def _null_space(matrix: RationalMatrix) -> list[tuple[Fraction, ...]]:
    """Basis of {x : Mx = 0}, one vector per free column of the RREF."""
    m = [list(row) for row in matrix.rows]
    n_rows, n_cols = matrix.n_rows, matrix.n_cols
    pivots: list[int] = []
    r = 0

    for c in range(n_cols):
        pivot = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        scale = m[r][c]
        m[r] = [v / scale for v in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                factor = m[i][c]
                m[i] = [a - factor * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break

    basis = []
    for free in (c for c in range(n_cols) if c not in pivots):
        vec = [Fraction(0)] * n_cols
        vec[free] = Fraction(1)
        for row, pc in enumerate(pivots):
            vec[pc] = -m[row][free]
        basis.append(tuple(vec))
    return basis
