"""
qualtensor/determinant.py
──────────────────────────
Exact determinants where they are tractable:

  - order 2        the ordinary matrix determinant (fraction-free)
  - dimension 2    det(A) is the resultant of the two binary forms
                   f_i(x_1, x_2) = (Ax^{k−1})_i, taken as the determinant
                   of their Sylvester matrix

Coefficient vectors list the highest power of x_1 first, and the
Sylvester matrix stacks the f_1 rows above the f_2 rows. With that
ordering det(make_unit(2, k)) = 1 and the k = 2 case is the ordinary
determinant.

Sign nonsingularity of a dimension-2 pattern can only be refuted here:
`sns_falsify_sample` looks for a singular member, starting with the
all-unit probe.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from qualtensor.errors import ShapeMismatchError, UnsupportedShapeError
from qualtensor.linalg import RationalMatrix
from qualtensor.qualitative import DEFAULT_MAGNITUDES, SeedLike, SignTensor, as_generator, probe_member, sample_member
from qualtensor.tensor import DenseTensor

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BinaryFormPair:
    """f_1 and f_2 as coefficient vectors, x_1^{k−1} first."""

    f1: tuple[Fraction, ...]
    f2: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        f1 = tuple(Fraction(c) for c in self.f1)
        f2 = tuple(Fraction(c) for c in self.f2)
        if len(f1) != len(f2):
            raise ShapeMismatchError(f"binary forms need equal lengths, got {len(f1)} and {len(f2)}")
        if len(f1) < 2:
            raise UnsupportedShapeError("binary forms need degree >= 1")
        object.__setattr__(self, "f1", f1)
        object.__setattr__(self, "f2", f2)

    @property
    def degree(self) -> int:
        return len(self.f1) - 1


@dataclass(frozen=True)
class SnsSampleReport:
    """Outcome of a singular-member search. Only a counterexample is proof."""

    trials: int
    counterexample: Optional[DenseTensor] = None
    min_abs_det: Optional[Fraction] = None

    @property
    def refuted(self) -> bool:
        return self.counterexample is not None


def _check_dim2(A: DenseTensor) -> int:
    if not A.shape.is_cubical or A.dims[0] != 2:
        raise UnsupportedShapeError(f"expected a dimension-2 cubical tensor, got shape {A.shape}")
    if A.order < 2:
        raise UnsupportedShapeError(f"determinant needs order k >= 2, got {A.order}")
    return A.order


def to_binary_forms(A: DenseTensor) -> BinaryFormPair:
    k = _check_dim2(A)
    coeffs = [[Fraction(0)] * k, [Fraction(0)] * k]
    for index, value in A.entries.items():
        ones = sum(1 for i in index[1:] if i == 1)
        coeffs[index[0] - 1][k - 1 - ones] += value
    return BinaryFormPair(tuple(coeffs[0]), tuple(coeffs[1]))


def sylvester_matrix(f: Sequence[object], g: Sequence[object]) -> RationalMatrix:
    """2d × 2d Sylvester matrix of two degree-d forms (d shifted copies of each)."""
    forms = BinaryFormPair(tuple(f), tuple(g))
    d = forms.degree
    size = 2 * d
    rows = []
    for coeffs in (forms.f1, forms.f2):
        for shift in range(d):
            row = [Fraction(0)] * size
            row[shift:shift + d + 1] = coeffs
            rows.append(row)
    return RationalMatrix(rows, cols=size)


def det_dim2(A: DenseTensor) -> Fraction:
    """Zero iff Ax^{k−1} = 0 has a nonzero complex solution."""
    forms = to_binary_forms(A)
    return sylvester_matrix(forms.f1, forms.f2).determinant()


def det_matrix(M: RationalMatrix) -> Fraction:
    return M.determinant()


def product_det_exponents(m: int, k: int, n: int = 2) -> tuple[int, int]:
    """(e_A, e_B) with det(A·B) = det(A)^e_A · det(B)^e_B for orders m, k and dimension n."""
    if m < 2 or k < 1 or n < 1:
        raise UnsupportedShapeError(f"need m >= 2, k >= 1, n >= 1, got m={m} k={k} n={n}")
    return (k - 1) ** (n - 1), (m - 1) ** n


def sns_falsify_sample(
    S: SignTensor,
    trials: int = 1000,
    seed: SeedLike = 0,
    magnitude_range: tuple[float, float] = DEFAULT_MAGNITUDES,
) -> SnsSampleReport:
    if not S.shape.is_cubical or S.dims[0] != 2:
        raise UnsupportedShapeError(f"expected a dimension-2 cubical pattern, got shape {S.shape}")
    if S.is_zero:
        logger.info(f"[determinant] sns_sample.refuted | shape={S.shape} | reason=zero_pattern")
        return SnsSampleReport(trials=0, counterexample=DenseTensor(S.shape), min_abs_det=Fraction(0))

    rng = as_generator(seed)
    smallest: Optional[Fraction] = None
    for trial in range(1, max(trials, 1) + 1):
        member = probe_member(S) if trial == 1 else sample_member(S, rng, magnitude_range)
        value = abs(det_dim2(member))
        if smallest is None or value < smallest:
            smallest = value
        if value == 0:
            logger.info(
                f"[determinant] sns_sample.refuted | shape={S.shape} | trial={trial}"
            )
            return SnsSampleReport(trials=trial, counterexample=member, min_abs_det=Fraction(0))

    logger.info(
        f"[determinant] sns_sample.done | shape={S.shape} | trials={trials} | "
        f"min_abs_det={float(smallest):.6g}"
    )
    return SnsSampleReport(trials=max(trials, 1), min_abs_det=smallest)
