"""
qualtensor/tensor.py
─────────────────────
Exact sparse order-k tensors and the structural operations on them.

Conventions
───────────
  - Multi-indices are 1-based tuples (i_1, …, i_k), 1 ≤ i_j ≤ n_j.
  - Only nonzero entries are stored; an absent index reads as zero.
    Two tensors are equal iff their shapes and stored maps are equal.
  - Unfoldings list their columns in lexicographic order of the
    remaining indices, later modes varying fastest.
  - DenseTensor values are fractions.Fraction. Nothing here rounds.

Values are immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import itertools
import math
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from types import MappingProxyType
from typing import Any, Iterable, Iterator, Mapping, Sequence, TypeVar, Union

import numpy as np

from qualtensor.errors import (
    IndexOutOfRangeError,
    ShapeMismatchError,
    UnsupportedShapeError,
    ZeroVectorError,
)
from qualtensor.linalg import RationalMatrix

Index = tuple[int, ...]
T = TypeVar("T", bound="SparseTensor")


# ──────────────────────────────────────────────────────────────────────────────
# Shape
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class Shape:
    """Dimensions (n_1, …, n_k); the order is k = len(dims)."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        if not dims:
            raise UnsupportedShapeError("a tensor needs order k >= 1")
        if any(d < 1 for d in dims):
            raise UnsupportedShapeError(f"every dimension must be >= 1, got {list(dims)}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, *dims: int) -> "Shape":
        return cls(tuple(dims))

    @classmethod
    def cube(cls, n: int, k: int) -> "Shape":
        return cls((n,) * k)

    @property
    def order(self) -> int:
        return len(self.dims)

    @property
    def size(self) -> int:
        return math.prod(self.dims)

    @property
    def is_cubical(self) -> bool:
        return len(set(self.dims)) == 1

    @property
    def dimension(self) -> int:
        """n for an order-k dimension-n tensor."""
        if not self.is_cubical:
            raise UnsupportedShapeError(f"expected a cubical tensor, got shape {self}")
        return self.dims[0]

    def indices(self) -> Iterator[Index]:
        return itertools.product(*(range(1, d + 1) for d in self.dims))

    def contains(self, index: Index) -> bool:
        return len(index) == self.order and all(1 <= i <= d for i, d in zip(index, self.dims))

    def check_mode(self, mode: int) -> int:
        """Validate a 1-based mode number and return it 0-based."""
        if not 1 <= mode <= self.order:
            raise IndexOutOfRangeError(f"mode {mode} is outside [1, {self.order}]")
        return mode - 1

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.dims)


# ──────────────────────────────────────────────────────────────────────────────
# Sparse storage shared by DenseTensor and SignTensor
# ──────────────────────────────────────────────────────────────────────────────

class SparseTensor:
    """Map from in-bounds multi-indices to nonzero values."""

    __slots__ = ("_shape", "_entries")

    zero: Any = 0

    def __init__(
        self,
        shape: Union[Shape, Sequence[int]],
        entries: Union[Mapping[Index, Any], Iterable[tuple[Index, Any]]] = (),
    ) -> None:
        shape = shape if isinstance(shape, Shape) else Shape(tuple(shape))
        items = entries.items() if isinstance(entries, Mapping) else entries
        store: dict[Index, Any] = {}
        for index, value in items:
            index = tuple(int(i) for i in index)
            if not shape.contains(index):
                raise IndexOutOfRangeError(
                    f"index {list(index)} lies outside shape {shape}"
                )
            value = self._coerce(value)
            if value:
                store[index] = value
            else:
                store.pop(index, None)
        self._shape = shape
        self._entries = store

    @classmethod
    def _coerce(cls, value: Any) -> Any:
        raise NotImplementedError

    @classmethod
    def _trusted(cls: type[T], shape: Shape, store: dict[Index, Any]) -> T:
        """Build without re-validating; callers guarantee bounds and nonzero values."""
        obj = cls.__new__(cls)
        obj._shape = shape
        obj._entries = {i: v for i, v in store.items() if v}
        return obj

    @classmethod
    def from_nested(cls: type[T], nested: Any) -> T:
        """Build from nested lists, e.g. [[1, 0], [0, 1]] (positions are 0-based)."""
        array = np.asarray(nested, dtype=object)
        if array.ndim == 0:
            raise UnsupportedShapeError("nested input must have at least one axis")
        entries = {
            tuple(i + 1 for i in pos): value for pos, value in np.ndenumerate(array)
        }
        return cls(Shape(array.shape), entries)

    # ── Accessors ─────────────────────────────────────────────────────────────

    @property
    def shape(self) -> Shape:
        return self._shape

    @property
    def dims(self) -> tuple[int, ...]:
        return self._shape.dims

    @property
    def order(self) -> int:
        return self._shape.order

    @property
    def entries(self) -> Mapping[Index, Any]:
        return MappingProxyType(self._entries)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    @property
    def is_zero(self) -> bool:
        return not self._entries

    def __getitem__(self, index: Index) -> Any:
        return self._entries.get(tuple(index), self.zero)

    def sorted_items(self) -> list[tuple[Index, Any]]:
        return sorted(self._entries.items())

    def to_nested(self) -> list:
        array = np.full(self.dims, self.zero, dtype=object)
        for index, value in self._entries.items():
            array[tuple(i - 1 for i in index)] = value
        return array.tolist()

    def to_array(self) -> np.ndarray:
        array = np.zeros(self.dims, dtype=float)
        for index, value in self._entries.items():
            array[tuple(i - 1 for i in index)] = float(value)
        return array

    # ── Dunder ────────────────────────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self._shape == other._shape and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((type(self).__name__, self._shape, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shape={self._shape}, nnz={self.nnz})"


class DenseTensor(SparseTensor):
    """Order-k tensor with exact rational entries."""

    __slots__ = ()

    zero = Fraction(0)

    @classmethod
    def _coerce(cls, value: Any) -> Fraction:
        return Fraction(value)

    def __add__(self, other: "DenseTensor") -> "DenseTensor":
        if not isinstance(other, DenseTensor):
            return NotImplemented
        if self.shape != other.shape:
            raise ShapeMismatchError(f"cannot add shapes {self.shape} and {other.shape}")
        store = dict(self._entries)
        for index, value in other._entries.items():
            store[index] = store.get(index, Fraction(0)) + value
        return DenseTensor._trusted(self.shape, store)

    def __neg__(self) -> "DenseTensor":
        return DenseTensor._trusted(self.shape, {i: -v for i, v in self._entries.items()})

    def scale(self, c: object) -> "DenseTensor":
        c = Fraction(c)
        return DenseTensor._trusted(self.shape, {i: c * v for i, v in self._entries.items()})


# ──────────────────────────────────────────────────────────────────────────────
# Rank-one sums
# ──────────────────────────────────────────────────────────────────────────────

Vector = tuple[Fraction, ...]


@dataclass(frozen=True)
class FactorList:
    """r tuples (α_1^j, …, α_k^j); the tensor is Σ_j α_1^j ⊗ ⋯ ⊗ α_k^j."""

    factors: tuple[tuple[Vector, ...], ...]

    def __post_init__(self) -> None:
        clean = tuple(tuple(tuple(Fraction(v) for v in vec) for vec in term) for term in self.factors)
        orders = {len(term) for term in clean}
        if len(orders) > 1:
            raise ShapeMismatchError(f"all rank-one terms need the same order, got {sorted(orders)}")
        for j, term in enumerate(clean, start=1):
            for i, vec in enumerate(term, start=1):
                if not any(vec):
                    raise ZeroVectorError(f"factor α_{i}^{j} is the zero vector")
        object.__setattr__(self, "factors", clean)

    @property
    def rank(self) -> int:
        return len(self.factors)

    def check_shape(self, shape: Shape) -> None:
        for j, term in enumerate(self.factors, start=1):
            lengths = tuple(len(v) for v in term)
            if lengths != shape.dims:
                raise ShapeMismatchError(
                    f"term {j} has factor lengths {list(lengths)}, shape is {shape}"
                )

    def to_list(self) -> list[list[list[Fraction]]]:
        return [[list(vec) for vec in term] for term in self.factors]


def make_unit(n: int, k: int) -> DenseTensor:
    """The order-k dimension-n unit tensor δ_{i_1⋯i_k}."""
    shape = Shape.cube(n, k)
    return DenseTensor._trusted(shape, {(i,) * k: Fraction(1) for i in range(1, n + 1)})


def outer_product(vectors: Sequence[Sequence[object]]) -> DenseTensor:
    """Segre outer product α_1 ⊗ ⋯ ⊗ α_k."""
    vecs = [tuple(Fraction(v) for v in vec) for vec in vectors]
    for j, vec in enumerate(vecs, start=1):
        if not vec:
            raise UnsupportedShapeError(f"vector {j} is empty")
        if not any(vec):
            raise ZeroVectorError(f"vector {j} of the outer product is zero")

    supports = [[(i, v) for i, v in enumerate(vec, start=1) if v] for vec in vecs]
    store = {}
    for combo in itertools.product(*supports):
        store[tuple(i for i, _ in combo)] = math.prod((v for _, v in combo), start=Fraction(1))
    return DenseTensor._trusted(Shape(tuple(len(v) for v in vecs)), store)


def sum_of_rank_ones(f: FactorList, shape: Shape) -> DenseTensor:
    f.check_shape(shape)
    total: dict[Index, Fraction] = defaultdict(Fraction)
    for term in f.factors:
        for index, value in outer_product(term).entries.items():
            total[index] += value
    return DenseTensor._trusted(shape, dict(total))


# ──────────────────────────────────────────────────────────────────────────────
# Index rearrangements (work on any SparseTensor subclass)
# ──────────────────────────────────────────────────────────────────────────────

def transpose_pq(A: T, p: int, q: int) -> T:
    """Swap modes p and q."""
    a, b = A.shape.check_mode(p), A.shape.check_mode(q)
    if a == b:
        return A

    def swap(seq: Sequence[int]) -> tuple[int, ...]:
        out = list(seq)
        out[a], out[b] = out[b], out[a]
        return tuple(out)

    return type(A)._trusted(Shape(swap(A.dims)), {swap(i): v for i, v in A.entries.items()})


def subtensor(A: T, subsets: Sequence[Iterable[int]]) -> T:
    """A[γ_1, …, γ_k]: keep the listed indices in each mode, re-indexed in sorted order."""
    if len(subsets) != A.order:
        raise ShapeMismatchError(f"need {A.order} index subsets, got {len(subsets)}")

    positions = []
    for mode, (subset, n) in enumerate(zip(subsets, A.dims), start=1):
        chosen = sorted(set(int(i) for i in subset))
        if not chosen:
            raise UnsupportedShapeError(f"index subset for mode {mode} is empty")
        if chosen[0] < 1 or chosen[-1] > n:
            raise IndexOutOfRangeError(f"subset {chosen} for mode {mode} is outside [1, {n}]")
        positions.append({old: new for new, old in enumerate(chosen, start=1)})

    store = {}
    for index, value in A.entries.items():
        if all(i in pos for i, pos in zip(index, positions)):
            store[tuple(pos[i] for i, pos in zip(index, positions))] = value
    return type(A)._trusted(Shape(tuple(len(p) for p in positions)), store)


def slice_tensor(A: T, mode: int, index: int) -> T:
    """(A)_i^{(j)}: the order k−1 slice with the mode-j index fixed to i."""
    j = A.shape.check_mode(mode)
    if A.order < 2:
        raise UnsupportedShapeError("slicing needs order k >= 2")
    if not 1 <= index <= A.dims[j]:
        raise IndexOutOfRangeError(f"slice index {index} is outside [1, {A.dims[j]}]")

    dims = A.dims[:j] + A.dims[j + 1:]
    store = {idx[:j] + idx[j + 1:]: v for idx, v in A.entries.items() if idx[j] == index}
    return type(A)._trusted(Shape(dims), store)


def slices(A: T, mode: int) -> list[T]:
    j = A.shape.check_mode(mode)
    return [slice_tensor(A, mode, i) for i in range(1, A.dims[j] + 1)]


def unfold_rows(A: SparseTensor, mode: int) -> list[list[Any]]:
    """Mode-s unfolding as plain rows of stored values (zeros filled in)."""
    s = A.shape.check_mode(mode)
    other = A.dims[:s] + A.dims[s + 1:]
    n_cols = math.prod(other)
    rows = [[A.zero] * n_cols for _ in range(A.dims[s])]
    for index, value in A.entries.items():
        rest = index[:s] + index[s + 1:]
        col = 0
        for i, d in zip(rest, other):
            col = col * d + (i - 1)
        rows[index[s] - 1][col] = value
    return rows


def unfold(A: SparseTensor, mode: int) -> RationalMatrix:
    """n_s × ∏_{j≠s} n_j matrix whose columns are the mode-s fibers."""
    rows = unfold_rows(A, mode)
    return RationalMatrix(rows, cols=len(rows[0]))


# ──────────────────────────────────────────────────────────────────────────────
# Products
# ──────────────────────────────────────────────────────────────────────────────

def mode_product(A: DenseTensor, L: RationalMatrix, mode: int) -> DenseTensor:
    """Apply L (c × n_s) along one mode: (I, …, L, …, I)·A."""
    s = A.shape.check_mode(mode)
    if L.n_cols != A.dims[s]:
        raise ShapeMismatchError(
            f"matrix for mode {mode} has {L.n_cols} columns, mode has dimension {A.dims[s]}"
        )
    columns = [L.column(i) for i in range(1, L.n_cols + 1)]
    store: dict[Index, Fraction] = defaultdict(Fraction)
    for index, value in A.entries.items():
        for row, weight in enumerate(columns[index[s] - 1], start=1):
            if weight:
                store[index[:s] + (row,) + index[s + 1:]] += weight * value
    dims = A.dims[:s] + (L.n_rows,) + A.dims[s + 1:]
    return DenseTensor._trusted(Shape(dims), dict(store))


def multilinear_transform(mats: Sequence[RationalMatrix], A: DenseTensor) -> DenseTensor:
    """(L_1, …, L_k)·A."""
    if len(mats) != A.order:
        raise ShapeMismatchError(f"need {A.order} matrices, got {len(mats)}")
    out = A
    for mode, L in enumerate(mats, start=1):
        out = mode_product(out, L, mode)
    return out


def matrix_tensor(M: RationalMatrix) -> DenseTensor:
    """View a matrix as an order-2 tensor."""
    store = {
        (i, j): v
        for i, row in enumerate(M.rows, start=1)
        for j, v in enumerate(row, start=1)
    }
    return DenseTensor._trusted(Shape((M.n_rows, M.n_cols)), store)


def shao_product(A: DenseTensor, B: DenseTensor) -> DenseTensor:
    """
    General product of dimension-n tensors A (order m ≥ 2) and B (order k ≥ 1):

        (A·B)_{i α_1 ⋯ α_{m−1}} = Σ a_{i i_2 ⋯ i_m} b_{i_2 α_1} ⋯ b_{i_m α_{m−1}}

    with every α_t ∈ [n]^{k−1}; the result has order (m−1)(k−1)+1.
    """
    if not (A.shape.is_cubical and B.shape.is_cubical):
        raise UnsupportedShapeError(
            f"the general product is defined for cubical tensors, got {A.shape} and {B.shape}"
        )
    n = A.shape.dimension
    if B.shape.dimension != n:
        raise ShapeMismatchError(f"dimension mismatch: {n} vs {B.shape.dimension}")
    m, k = A.order, B.order
    if m < 2:
        raise UnsupportedShapeError(f"left factor needs order m >= 2, got {m}")

    fibers: dict[int, list[tuple[Index, Fraction]]] = defaultdict(list)
    for index, value in B.entries.items():
        fibers[index[0]].append((index[1:], value))

    store: dict[Index, Fraction] = defaultdict(Fraction)
    for index, a in A.entries.items():
        choices = [fibers.get(j) for j in index[1:]]
        if not all(choices):
            continue
        for combo in itertools.product(*choices):
            value, tail = a, (index[0],)
            for rest, b in combo:
                value *= b
                tail += rest
            store[tail] += value

    return DenseTensor._trusted(Shape.cube(n, (m - 1) * (k - 1) + 1), dict(store))


def apply_power(A: DenseTensor, x: Sequence[object]) -> tuple[Fraction, ...]:
    """Ax^{k−1}: component i is Σ a_{i i_2 ⋯ i_k} x_{i_2} ⋯ x_{i_k}."""
    n = A.shape.dimension
    if len(x) != n:
        raise ShapeMismatchError(f"vector has length {len(x)}, tensor dimension is {n}")
    xs = [Fraction(v) for v in x]
    out = [Fraction(0)] * n
    for index, value in A.entries.items():
        out[index[0] - 1] += value * math.prod((xs[j - 1] for j in index[1:]), start=Fraction(1))
    return tuple(out)


def majorization_matrix(A: DenseTensor) -> RationalMatrix:
    """M(A) with m_ij = a_{ij⋯j}, for shapes n_1 × n_2 × ⋯ × n_2."""
    if A.order < 2:
        raise UnsupportedShapeError("majorization matrix needs order k >= 2")
    tail = set(A.dims[1:])
    if len(tail) != 1:
        raise UnsupportedShapeError(
            f"modes 2..k must share one dimension for a majorization matrix, got shape {A.shape}"
        )
    n1, n2, k = A.dims[0], A.dims[1], A.order
    return RationalMatrix(
        [[A[(i,) + (j,) * (k - 1)] for j in range(1, n2 + 1)] for i in range(1, n1 + 1)],
        cols=n2,
    )
