"""
qualtensor/qualitative.py
──────────────────────────
Sign patterns and qualitative classes.

A qualitative class Q(S) is carried as the pair (sign pattern S, sampler):
`sample_member` draws members with independent log-uniform magnitudes and
`probe_member` returns the deterministic all-unit member.

Condensation
────────────
`condense` deletes, mode by mode (1..k, repeated until nothing changes),
every slice whose sign pattern is zero or equal/opposite to an earlier
kept slice of the same mode. The earliest slice always survives, so the
output is deterministic. Only the minimum rank is preserved by this
deletion, so nothing about the maximum rank is ever read off a condensed
pattern.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence, Union

import numpy as np

from qualtensor.errors import ShapeMismatchError, TensorFormatError, UnsupportedShapeError
from qualtensor.tensor import DenseTensor, Index, Shape, SparseTensor, slices, subtensor

logger = logging.getLogger(__name__)

DEFAULT_MAGNITUDES = (0.1, 10.0)
MAX_DENOMINATOR = 1000

SeedLike = Union[int, np.random.Generator, None]


class SignTensor(SparseTensor):
    """Order-k tensor with entries in {−1, 0, +1}; zeros implicit."""

    __slots__ = ()

    zero = 0

    @classmethod
    def _coerce(cls, value: Any) -> int:
        if value not in (-1, 0, 1):
            raise TensorFormatError(f"sign entries must be -1, 0 or 1, got {value!r}")
        return int(value)

    def __neg__(self) -> "SignTensor":
        return SignTensor._trusted(self.shape, {i: -s for i, s in self.entries.items()})

    def support(self) -> frozenset[Index]:
        return frozenset(self.entries)

    def counts(self) -> dict[str, int]:
        positive = sum(1 for s in self.entries.values() if s > 0)
        negative = self.nnz - positive
        return {"positive": positive, "negative": negative, "zero": self.shape.size - self.nnz}


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


# ──────────────────────────────────────────────────────────────────────────────
# Patterns and members
# ──────────────────────────────────────────────────────────────────────────────

def sign_pattern(A: SparseTensor) -> SignTensor:
    return SignTensor._trusted(
        A.shape, {i: (1 if v > 0 else -1) for i, v in A.entries.items()}
    )


def probe_member(S: SignTensor) -> DenseTensor:
    """The member with every magnitude equal to 1."""
    return DenseTensor._trusted(S.shape, {i: Fraction(s) for i, s in S.entries.items()})


def sample_member(
    S: SignTensor,
    seed: SeedLike = 0,
    magnitude_range: tuple[float, float] = DEFAULT_MAGNITUDES,
) -> DenseTensor:
    """
    Draw a member of Q(S): every nonzero sign gets an independent
    log-uniform magnitude from magnitude_range, snapped to a rational with
    denominator ≤ 1000. Deterministic for a given seed; pass a Generator to
    draw a sequence of members from one stream.
    """
    low, high = magnitude_range
    if not (0 < low <= high):
        raise UnsupportedShapeError(
            f"magnitude range must satisfy 0 < low <= high, got ({low}, {high})"
        )
    rng = as_generator(seed)
    items = S.sorted_items()
    logs = rng.uniform(math.log(low), math.log(high), size=len(items))
    store = {}
    for (index, sign), log_mag in zip(items, logs):
        magnitude = Fraction(float(np.exp(log_mag))).limit_denominator(MAX_DENOMINATOR)
        store[index] = sign * max(magnitude, Fraction(1, MAX_DENOMINATOR))
    return DenseTensor._trusted(S.shape, store)


def is_sign_symmetric(S: SignTensor) -> bool:
    """sgn(a_{i_1⋯i_k}) is invariant under every permutation of the indices."""
    if not S.shape.is_cubical:
        return False
    for index, sign in S.entries.items():
        for perm in set(itertools.permutations(index)):
            if S[perm] != sign:
                return False
    return True


# ──────────────────────────────────────────────────────────────────────────────
# Equivalence moves
# ──────────────────────────────────────────────────────────────────────────────

@dataclass(frozen=True)
class SignedPermutation:
    """
    One (D_j, P_j) per mode. perms[j][i-1] is the image of index i under
    P_j; signs[j][i-1] is the diagonal entry of D_j at output position i.
    """

    perms: tuple[tuple[int, ...], ...]
    signs: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        perms = tuple(tuple(int(i) for i in p) for p in self.perms)
        signs = tuple(tuple(int(s) for s in d) for d in self.signs)
        if len(perms) != len(signs):
            raise ShapeMismatchError("need one permutation and one signing per mode")
        for mode, (p, d) in enumerate(zip(perms, signs), start=1):
            if sorted(p) != list(range(1, len(p) + 1)):
                raise ShapeMismatchError(f"mode {mode}: {list(p)} is not a permutation")
            if len(d) != len(p) or any(s not in (-1, 1) for s in d):
                raise ShapeMismatchError(f"mode {mode}: signing must be ±1 of length {len(p)}")
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "signs", signs)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(len(p) for p in self.perms)

    @classmethod
    def identity(cls, shape: Shape) -> "SignedPermutation":
        return cls(
            tuple(tuple(range(1, n + 1)) for n in shape.dims),
            tuple((1,) * n for n in shape.dims),
        )

    @classmethod
    def random(cls, shape: Shape, seed: SeedLike = None) -> "SignedPermutation":
        rng = as_generator(seed)
        perms = tuple(tuple(int(i) + 1 for i in rng.permutation(n)) for n in shape.dims)
        signs = tuple(tuple(int(s) for s in rng.choice((-1, 1), size=n)) for n in shape.dims)
        return cls(perms, signs)


def signed_permute(S: SignTensor, g: SignedPermutation) -> SignTensor:
    """sgn((D_1P_1, …, D_kP_k)·Ã) for any member Ã of Q(S)."""
    if g.dims != S.dims:
        raise ShapeMismatchError(f"signed permutation for {list(g.dims)} applied to shape {S.shape}")
    store = {}
    for index, sign in S.entries.items():
        target = tuple(p[i - 1] for p, i in zip(g.perms, index))
        for d, t in zip(g.signs, target):
            sign *= d[t - 1]
        store[target] = sign
    return SignTensor._trusted(S.shape, store)


# ──────────────────────────────────────────────────────────────────────────────
# Condensation and the mr = 1 decision
# ──────────────────────────────────────────────────────────────────────────────

def condense(S: SignTensor) -> SignTensor:
    if S.is_zero:
        return SignTensor(Shape((1,) * S.order))

    current = S
    passes = 0
    changed = True
    while changed:
        changed = False
        passes += 1
        for mode in range(1, current.order + 1):
            keep: list[int] = []
            kept_patterns: list[frozenset] = []
            for i, pattern in enumerate(_slice_patterns(current, mode), start=1):
                if not pattern:
                    continue
                opposite = frozenset((idx, -s) for idx, s in pattern)
                if pattern in kept_patterns or opposite in kept_patterns:
                    continue
                keep.append(i)
                kept_patterns.append(pattern)
            if len(keep) < current.dims[mode - 1]:
                subsets = [range(1, n + 1) for n in current.dims]
                subsets[mode - 1] = keep
                current = subtensor(current, subsets)
                changed = True

    logger.debug(
        f"[qualitative] condense.done | shape={S.shape} | condensed={current.shape} | passes={passes}"
    )
    return current


def _slice_patterns(S: SignTensor, mode: int) -> list[frozenset]:
    if S.order == 1:
        return [frozenset({((), S[(i,)])}) if S[(i,)] else frozenset() for i in range(1, S.dims[0] + 1)]
    return [frozenset(piece.entries.items()) for piece in slices(S, mode)]


def is_mr1(S: SignTensor) -> bool:
    """True iff some member of Q(S) has rank one."""
    C = condense(S)
    return all(d == 1 for d in C.dims) and C.nnz == 1


def sign_outer_product(vectors: Sequence[Sequence[int]]) -> SignTensor:
    """Sign pattern of α_1 ⊗ ⋯ ⊗ α_k for sign vectors α_j (each nonzero)."""
    store = {}
    supports = [[(i, s) for i, s in enumerate(v, start=1) if s] for v in vectors]
    if any(not s for s in supports):
        raise UnsupportedShapeError("every sign vector of an outer product must be nonzero")
    for combo in itertools.product(*supports):
        store[tuple(i for i, _ in combo)] = math.prod(s for _, s in combo)
    return SignTensor(Shape(tuple(len(v) for v in vectors)), store)


def random_sign_tensor(shape: Shape, seed: SeedLike = None, density: float = 0.6) -> SignTensor:
    rng = as_generator(seed)
    store = {}
    for index in shape.indices():
        if rng.random() < density:
            store[index] = int(rng.choice((-1, 1)))
    return SignTensor(shape, store)


def member_sequence(
    S: SignTensor,
    count: int,
    seed: SeedLike = 0,
    magnitude_range: tuple[float, float] = DEFAULT_MAGNITUDES,
    include_probe: bool = True,
) -> list[DenseTensor]:
    """The probe member (optional) followed by sampled members from one stream."""
    rng = as_generator(seed)
    members = [probe_member(S)] if include_probe and count > 0 else []
    while len(members) < count:
        members.append(sample_member(S, rng, magnitude_range))
    return members

