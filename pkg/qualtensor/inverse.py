"""
qualtensor/inverse.py
──────────────────────
Order-2 inverses of cubical tensors under the general product.

A member A has an order-2 left inverse exactly when A = P·I for an
invertible matrix P, and an order-2 right inverse exactly when A = I·Q.
At the pattern level this gives two decisions:

  left   every nonzero sits at some (i, j, …, j) and the majorization
         pattern is an SNS matrix
  right  each mode-1 slice holds one nonzero, at (i, j_i, …, j_i) with
         i ↦ j_i a bijection; for odd order every sign is +

Constructed inverses are always verified with `shao_product` before they
are returned. A failed verification is a bug and raises RuntimeError.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Optional

from qualtensor.combinatorics import SignMatrix, is_sns_matrix
from qualtensor.errors import UnsupportedShapeError
from qualtensor.linalg import RationalMatrix
from qualtensor.qualitative import SignTensor, is_sign_symmetric, sign_pattern
from qualtensor.tensor import (
    DenseTensor,
    SparseTensor,
    majorization_matrix,
    make_unit,
    matrix_tensor,
    outer_product,
    shao_product,
    slice_tensor,
)

logger = logging.getLogger(__name__)


class DecisionReason(str, Enum):
    ACCEPTED      = "accepted"
    STRUCTURE     = "structure"        # a nonzero outside the allowed positions
    NOT_SNS       = "not_sns"          # majorization pattern is not SNS
    NOT_BIJECTION = "not_bijection"    # slices do not pick distinct columns
    ODD_SIGN      = "odd_order_sign"   # odd order with a negative entry


@dataclass(frozen=True)
class InverseDecision:
    decision: bool
    reason: DecisionReason
    majorization: Optional[SignMatrix] = None
    permutation: Optional[tuple[int, ...]] = None    # j_i for i = 1..n
    signing: Optional[tuple[int, ...]] = None        # sign of a_{i j_i ⋯ j_i}

    def to_dict(self) -> dict:
        out: dict = {"decision": self.decision, "reason": self.reason.value}
        if self.majorization is not None:
            out["majorization"] = self.majorization.to_list()
        if self.permutation is not None:
            out["permutation"] = list(self.permutation)
            out["signing"] = list(self.signing or ())
        return out


# ──────────────────────────────────────────────────────────────────────────────
# Structure helpers
# ──────────────────────────────────────────────────────────────────────────────

def _check_order(S: SparseTensor, minimum: int) -> int:
    if not S.shape.is_cubical:
        raise UnsupportedShapeError(f"sign inverses need a cubical tensor, got shape {S.shape}")
    if S.order < minimum:
        raise UnsupportedShapeError(f"order-2 sign inverse decisions need k >= {minimum}, got {S.order}")
    return S.shape.dimension


def _majorization_structured(A: SparseTensor) -> bool:
    """Every nonzero sits at an index (i, j, …, j)."""
    return all(len(set(index[1:])) == 1 for index in A.entries)


# ──────────────────────────────────────────────────────────────────────────────
# Pattern decisions
# ──────────────────────────────────────────────────────────────────────────────

def has_sign_left_inverse_order2(S: SignTensor) -> InverseDecision:
    n = _check_order(S, 3)
    if not _majorization_structured(S):
        return InverseDecision(False, DecisionReason.STRUCTURE)

    k = S.order
    M = SignMatrix([[S[(i,) + (j,) * (k - 1)] for j in range(1, n + 1)] for i in range(1, n + 1)])
    if not is_sns_matrix(M):
        return InverseDecision(False, DecisionReason.NOT_SNS, majorization=M)
    return InverseDecision(True, DecisionReason.ACCEPTED, majorization=M)


def has_sign_right_inverse_order2(S: SignTensor) -> InverseDecision:
    n = _check_order(S, 3)
    if not _majorization_structured(S):
        return InverseDecision(False, DecisionReason.STRUCTURE)

    targets: dict[int, list[int]] = {i: [] for i in range(1, n + 1)}
    for index in S.entries:
        targets[index[0]].append(index[1])
    if any(len(js) != 1 for js in targets.values()):
        return InverseDecision(False, DecisionReason.STRUCTURE)

    permutation = tuple(targets[i][0] for i in range(1, n + 1))
    if len(set(permutation)) != n:
        return InverseDecision(False, DecisionReason.NOT_BIJECTION)

    k = S.order
    signing = tuple(S[(i,) + (j,) * (k - 1)] for i, j in enumerate(permutation, start=1))
    if k % 2 == 1 and any(s < 0 for s in signing):
        return InverseDecision(False, DecisionReason.ODD_SIGN, permutation=permutation, signing=signing)
    return InverseDecision(True, DecisionReason.ACCEPTED, permutation=permutation, signing=signing)


# ──────────────────────────────────────────────────────────────────────────────
# Member inverses
# ──────────────────────────────────────────────────────────────────────────────

def left_inverse_order2(A: DenseTensor) -> Optional[RationalMatrix]:
    """P^{-1} when A = P·I with P invertible, else None."""
    n = _check_order(A, 2)
    if not _majorization_structured(A):
        return None
    P = majorization_matrix(A)
    P_inv = P.inverse()
    if P_inv is None:
        return None

    _verify(shao_product(matrix_tensor(P_inv), A), n, A.order, side="left")
    return P_inv


def right_inverse_order2(A: DenseTensor) -> Optional[RationalMatrix]:
    """Q^{-1} when A = I·Q with Q invertible, else None."""
    n = _check_order(A, 2)
    k = A.order
    rows = []
    for i in range(1, n + 1):
        piece = slice_tensor(A, 1, i)
        q = _outer_power_root(piece, k - 1)
        if q is None:
            return None
        rows.append(q)

    Q_inv = RationalMatrix(rows).inverse()
    if Q_inv is None:
        return None

    _verify(shao_product(A, matrix_tensor(Q_inv)), n, k, side="right")
    return Q_inv


def _outer_power_root(piece: DenseTensor, power: int) -> Optional[tuple[Fraction, ...]]:
    """q with q ⊗ ⋯ ⊗ q (power factors) equal to piece, or None."""
    if not is_sign_symmetric(sign_pattern(piece)):
        logger.debug(f"[inverse] right_inverse.asymmetric_slice | shape={piece.shape}")
        return None
    n = piece.dims[0]
    p = next((j for j in range(1, n + 1) if piece[(j,) * power]), None)
    if p is None:
        return None

    q_p = rational_root(piece[(p,) * power], power)
    if q_p is None:
        logger.warning(
            f"[inverse] right_inverse.irrational_root | value={piece[(p,) * power]} | degree={power}"
        )
        return None

    scale = q_p ** (power - 1)
    q = tuple(piece[(p,) * (power - 1) + (j,)] / scale for j in range(1, n + 1))
    if outer_product([q] * power) != piece:
        return None
    return q


def _verify(product: DenseTensor, n: int, k: int, side: str) -> None:
    if product != make_unit(n, k):
        logger.critical(
            f"[inverse] verification.failed | side={side} | n={n} | k={k} | nnz={product.nnz}"
        )
        raise RuntimeError(f"constructed {side} inverse does not reproduce the unit tensor")
    logger.debug(f"[inverse] verification.ok | side={side} | n={n} | k={k}")


# ──────────────────────────────────────────────────────────────────────────────
# Exact roots
# ──────────────────────────────────────────────────────────────────────────────

def rational_root(value: object, degree: int) -> Optional[Fraction]:
    """The real degree-th root of a rational when it is rational, else None."""
    if degree < 1:
        raise UnsupportedShapeError(f"root degree must be >= 1, got {degree}")
    value = Fraction(value)
    if value == 0 or degree == 1:
        return value
    if value < 0:
        if degree % 2 == 0:
            return None
        root = rational_root(-value, degree)
        return None if root is None else -root

    num = _integer_root(value.numerator, degree)
    den = _integer_root(value.denominator, degree)
    if num is None or den is None:
        return None
    return Fraction(num, den)


def _integer_root(n: int, degree: int) -> Optional[int]:
    if degree == 2:
        r = math.isqrt(n)
    else:
        # Newton from above on integers; converges to floor(n^(1/degree))
        r = 1 << -(-n.bit_length() // degree)
        while True:
            nxt = ((degree - 1) * r + n // r ** (degree - 1)) // degree
            if nxt >= r:
                break
            r = nxt
    return r if r ** degree == n else None
