"""
qualtensor/combinatorics.py
────────────────────────────
Term rank, SNS matrices, L-matrices, and the full-multilinear-rank test
that every SNS tensor must pass.

Term rank
─────────
Exact k-dimensional matching. Entries split into components that share no
coordinate value (the optimum is the sum over them); each component is
solved by depth-first branch-and-bound:
  - candidates are the nonzero entries sorted by scarcity (entries whose
    coordinates are shared by few other nonzeros come first)
  - the greedy matching over that order is the first incumbent
  - each node tries its candidates in order, one pick per loop step; the
    node ends once |chosen| plus a bound on the remaining suffix cannot
    beat the incumbent
  - the bound is the smallest maximum bipartite matching (Hopcroft-Karp,
    scipy.sparse.csgraph) of the candidates projected onto any two modes
  - the search stops as soon as the incumbent reaches the root bound

Sign nonsingularity
───────────────────
  is_sns_matrix  enumerates determinant terms row by row, skipping zero
                 entries and stopping at the first pair of opposite terms
  is_l_matrix    enumerates row signings u ∈ {−1,0,1}^m up to ±u and looks
                 for a column that u turns into a nonzero unisigned column
"""

from __future__ import annotations

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, maximum_bipartite_matching

from qualtensor.errors import UnsupportedShapeError
from qualtensor.qualitative import SignTensor
from qualtensor.tensor import Index, unfold_rows

logger = logging.getLogger(__name__)

MAX_SNS_ORDER = 10
MAX_L_ROWS = 12
SIGNING_CHUNK = 4096


# ──────────────────────────────────────────────────────────────────────────────
# Types
# ──────────────────────────────────────────────────────────────────────────────

class SignMatrix:
    """m × n matrix with entries in {−1, 0, +1}."""

    __slots__ = ("_rows", "_cols")

    def __init__(self, rows: Iterable[Iterable[int]], cols: Optional[int] = None) -> None:
        data = tuple(tuple(_sign(v) for v in row) for row in rows)
        widths = {len(r) for r in data}
        if len(widths) > 1:
            raise UnsupportedShapeError(f"sign matrix must be rectangular, got row lengths {sorted(widths)}")
        self._rows = data
        self._cols = widths.pop() if widths else (cols or 0)

    @classmethod
    def from_tensor(cls, S: SignTensor) -> "SignMatrix":
        if S.order != 2:
            raise UnsupportedShapeError(f"expected an order-2 pattern, got order {S.order}")
        return cls(unfold_rows(S, 1))

    @property
    def rows(self) -> tuple[tuple[int, ...], ...]:
        return self._rows

    @property
    def shape(self) -> tuple[int, int]:
        return len(self._rows), self._cols

    @property
    def is_square(self) -> bool:
        return len(self._rows) == self._cols

    def to_array(self) -> np.ndarray:
        return np.array(self._rows, dtype=np.int8).reshape(self.shape)

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self._rows]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    def __hash__(self) -> int:
        return hash(self._rows)

    def __repr__(self) -> str:
        return f"SignMatrix({self.to_list()})"


@dataclass(frozen=True)
class Matching:
    """Nonzero positions, no two sharing a coordinate value in any mode."""

    indices: tuple[Index, ...]

    def __len__(self) -> int:
        return len(self.indices)

    def is_valid_for(self, S: SignTensor) -> bool:
        if any(S[i] == 0 for i in self.indices):
            return False
        for mode in range(S.order):
            values = [i[mode] for i in self.indices]
            if len(values) != len(set(values)):
                return False
        return True

    def to_list(self) -> list[list[int]]:
        return [list(i) for i in self.indices]


@dataclass(frozen=True)
class TermRankResult:
    value: int
    matching: Matching
    nodes: int = 0


@dataclass(frozen=True)
class SnsNecessaryReport:
    per_mode: tuple[bool, ...]

    @property
    def overall(self) -> bool:
        return all(self.per_mode)

    def to_dict(self) -> dict:
        return {"per_mode": list(self.per_mode), "overall": self.overall}


# ──────────────────────────────────────────────────────────────────────────────
# Term rank
# ──────────────────────────────────────────────────────────────────────────────

def term_rank(S: SignTensor) -> TermRankResult:
    entries = list(S.entries)
    if not entries:
        return TermRankResult(0, Matching(()))

    components = _components(entries, S.dims)
    best: list[Index] = []
    nodes = 0
    for component in components:
        chosen, searched = _max_matching(component, S.dims)
        best.extend(chosen)
        nodes += searched

    matching = Matching(tuple(sorted(best)))
    logger.debug(
        f"[combinatorics] term_rank.done | shape={S.shape} | nnz={S.nnz} | "
        f"components={len(components)} | value={len(matching)} | nodes={nodes}"
    )
    return TermRankResult(len(matching), matching, nodes)


def _components(entries: Sequence[Index], dims: Sequence[int]) -> list[list[Index]]:
    """Groups of entries linked through shared coordinate values; matchings add across groups."""
    k, count = len(dims), len(entries)
    offsets = np.cumsum((count,) + tuple(dims[:-1]))
    rows = np.repeat(np.arange(count), k)
    cols = np.array([offsets[m] + index[m] - 1 for index in entries for m in range(k)])
    size = count + sum(dims)
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
    _, labels = connected_components(graph, directed=False)

    groups: dict[int, list[Index]] = {}
    for index, label in zip(entries, labels[:count]):
        groups.setdefault(int(label), []).append(index)
    return list(groups.values())


def _max_matching(entries: list[Index], dims: Sequence[int]) -> tuple[list[Index], int]:
    k = len(dims)
    load = [Counter(index[mode] for index in entries) for mode in range(k)]
    entries = sorted(entries, key=lambda idx: (sum(load[m][idx[m]] for m in range(k)), idx))

    best = _greedy(entries)
    ceiling = _upper_bound(entries, dims)
    nodes = 0

    def extend(candidates: list[Index], chosen: list[Index]) -> bool:
        """Tries each candidate as the next pick; True once the incumbent hits the ceiling."""
        nonlocal best, nodes
        nodes += 1
        for p, head in enumerate(candidates):
            # suffixes only shrink, so the first failed bound ends this node
            if len(chosen) + _upper_bound(candidates[p:], dims, len(best) - len(chosen)) <= len(best):
                return False
            chosen.append(head)
            if len(chosen) > len(best):
                best = list(chosen)
                if len(best) == ceiling:
                    return True
            compatible = [c for c in candidates[p + 1:] if all(c[m] != head[m] for m in range(k))]
            if compatible and extend(compatible, chosen):
                return True
            chosen.pop()
        return False

    if len(best) < ceiling:
        extend(entries, [])
    return best, nodes


def _upper_bound(candidates: Sequence[Index], dims: Sequence[int], floor: int = -1) -> int:
    """Matching size bound: the smallest pairwise-mode bipartite matching.

    Returns early once the bound drops to ``floor`` or below.
    """
    k = len(dims)
    bound = min(len(candidates), *(len({c[m] for c in candidates}) for m in range(k)))
    for a, b in itertools.combinations(range(k), 2):
        if bound <= floor:
            break
        bound = min(bound, _pair_matching(candidates, dims, a, b))
    return bound


def _pair_matching(candidates: Sequence[Index], dims: Sequence[int], a: int, b: int) -> int:
    pairs = {(c[a] - 1, c[b] - 1) for c in candidates}
    rows, cols = zip(*pairs)
    graph = csr_matrix((np.ones(len(pairs)), (rows, cols)), shape=(dims[a], dims[b]))
    matched = maximum_bipartite_matching(graph, perm_type="column")
    return int(np.count_nonzero(matched >= 0))


def _greedy(entries: Sequence[Index]) -> list[Index]:
    used: list[set[int]] = [set() for _ in range(len(entries[0]))] if entries else []
    chosen = []
    for index in entries:
        if all(i not in u for i, u in zip(index, used)):
            chosen.append(index)
            for i, u in zip(index, used):
                u.add(i)
    return chosen


# ──────────────────────────────────────────────────────────────────────────────
# SNS and L-matrices
# ──────────────────────────────────────────────────────────────────────────────

def is_sns_matrix(S: SignMatrix) -> bool:
    """Every member of Q(S) is nonsingular."""
    m, n = S.shape
    if m != n:
        raise UnsupportedShapeError(f"SNS test needs a square matrix, got {m}x{n}")
    if n > MAX_SNS_ORDER:
        raise UnsupportedShapeError(f"SNS test is limited to n <= {MAX_SNS_ORDER}, got {n}")

    rows = S.rows
    supports = [[j for j in range(n) if rows[i][j]] for i in range(n)]
    seen: set[int] = set()

    def walk(i: int, used: list[int], sign: int) -> bool:
        """False as soon as two nonzero terms of opposite sign exist."""
        if i == n:
            seen.add(sign)
            return len(seen) < 2
        for j in supports[i]:
            if j in used:
                continue
            inversions = sum(1 for u in used if u > j)
            term = sign * rows[i][j] * (-1 if inversions % 2 else 1)
            used.append(j)
            ok = walk(i + 1, used, term)
            used.pop()
            if not ok:
                return False
        return True

    consistent = walk(0, [], 1)
    return consistent and len(seen) == 1


def is_l_matrix(S: SignMatrix) -> bool:
    """Every member of Q(S) has full row rank."""
    m, n = S.shape
    if m > MAX_L_ROWS:
        raise UnsupportedShapeError(f"L-matrix test is limited to m <= {MAX_L_ROWS} rows, got {m}")
    if m == 0:
        return True
    if n == 0:
        return False

    matrix = S.to_array().astype(np.int8)
    for block in _signing_blocks(m):
        products = block[:, :, None] * matrix[None, :, :]
        has_pos = (products > 0).any(axis=1)
        has_neg = (products < 0).any(axis=1)
        unisigned = (has_pos ^ has_neg).any(axis=1)
        if not unisigned.all():
            return False
    return True


def _signing_blocks(m: int) -> Iterable[np.ndarray]:
    """Nonzero u ∈ {−1,0,1}^m whose first nonzero entry is +1, in chunks."""
    block: list[tuple[int, ...]] = []
    for u in itertools.product((0, 1, -1), repeat=m):
        lead = next((v for v in u if v), 0)
        if lead != 1:
            continue
        block.append(u)
        if len(block) == SIGNING_CHUNK:
            yield np.array(block, dtype=np.int8)
            block = []
    if block:
        yield np.array(block, dtype=np.int8)


def unfolding_pattern(S: SignTensor, mode: int) -> SignMatrix:
    return SignMatrix(unfold_rows(S, mode))


def sns_tensor_necessary(S: SignTensor) -> SnsNecessaryReport:
    """
    Every mode unfolding pattern must be an L-matrix, i.e. every member has
    multilinear rank (n, …, n). False means S is certainly not SNS; True is
    only necessary.
    """
    if not S.shape.is_cubical:
        raise UnsupportedShapeError(f"SNS tensors are cubical, got shape {S.shape}")
    n = S.shape.dimension
    if n > MAX_L_ROWS:
        raise UnsupportedShapeError(f"SNS necessary test is limited to n <= {MAX_L_ROWS}, got {n}")

    per_mode = tuple(is_l_matrix(unfolding_pattern(S, mode)) for mode in range(1, S.order + 1))
    report = SnsNecessaryReport(per_mode)
    logger.debug(
        f"[combinatorics] sns_necessary.done | shape={S.shape} | per_mode={list(per_mode)}"
    )
    return report


def _sign(value: object) -> int:
    if value not in (-1, 0, 1):
        raise UnsupportedShapeError(f"sign matrix entries must be -1, 0 or 1, got {value!r}")
    return int(value)
