"""
qualtensor/rank.py
───────────────────
Rank bounds for tensors and for qualitative classes.

Exact
─────
  multilinear_rank    ranks of the mode unfoldings (fraction-free)
  rank_lower_bound    rank(A) ≥ max_s r_s(A)
  hyperdet_222        Cayley hyperdeterminant Δ of a 2×2×2 tensor
  rank_222_exact      real rank of a 2×2×2 tensor from (rank_⊞, sgn Δ)
  rank_222_pattern    every member of a 2×2×2 class has rank 3
  mode_compress       invertible P that zeroes the last mode-s slice

Numerical
─────────
  cp_fit              alternating least squares with random restarts; a
                      2×2×2 tensor with Δ > 0 starts from its slice pencil
  mr_upper_search     ALS alternated with projection onto the sign class

A numerical failure is a FitFailure value. It is never read as a lower
bound; every lower bound in a BoundsReport carries an exact justification.

Logging levels
──────────────
  WARNING   a search exhausted its restarts
  INFO      search summaries, bounds_report steps
  DEBUG     per-restart residuals
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from string import ascii_lowercase
from typing import Any, Optional, Sequence, Union

import numpy as np
from scipy import linalg as la

from qualtensor.combinatorics import (
    Matching,
    SignMatrix,
    TermRankResult,
    is_l_matrix,
    is_sns_matrix,
    term_rank,
    unfolding_pattern,
)
from qualtensor.config import SamplingConfig, SearchConfig
from qualtensor.errors import UnsupportedShapeError
from qualtensor.inverse import has_sign_left_inverse_order2, has_sign_right_inverse_order2
from qualtensor.linalg import RationalMatrix
from qualtensor.qualitative import SignTensor, is_mr1, member_sequence, probe_member, sign_pattern
from qualtensor.tensor import DenseTensor, FactorList, Shape, mode_product, unfold
from qualtensor.tensor_io import tensor_to_dict

logger = logging.getLogger(__name__)

MEMBER_DENOMINATOR = 10**6
MAX_DECISION_DIM = 10
PENCIL_SHIFTS = (0.0, 1.0, -1.0, 0.5, -2.0)     # pencil members tried as the invertible P


# ──────────────────────────────────────────────────────────────────────────────
# Types
# ──────────────────────────────────────────────────────────────────────────────

class BoundKind(str, Enum):
    UPPER = "upper"
    LOWER = "lower"


class Justification(str, Enum):
    ZERO           = "zero"
    NONZERO        = "nonzero"
    NOT_MR1        = "not-mr1"
    TERM_RANK      = "term-rank"
    UNFOLDING_RANK = "unfolding-rank"
    ORACLE_222     = "oracle-222"
    PATTERN_222    = "pattern-222"
    SNS_MATRIX     = "sns-matrix"
    SIGN_INVERSE   = "sign-inverse"
    CUBE_222       = "222-max-rank"
    NUMERIC_FIT    = "numeric-fit"


@dataclass(frozen=True)
class MultilinearRank:
    ranks: tuple[int, ...]

    def __iter__(self):
        return iter(self.ranks)

    def __getitem__(self, mode: int) -> int:
        """1-based mode."""
        return self.ranks[mode - 1]

    @property
    def maximum(self) -> int:
        return max(self.ranks)

    def dominated_by(self, other: "MultilinearRank") -> bool:
        return all(a <= b for a, b in zip(self.ranks, other.ranks))

    def to_list(self) -> list[int]:
        return list(self.ranks)


@dataclass(frozen=True)
class RankCertificate:
    """
    Evidence for one bound. Upper certificates from a numerical search carry
    the FactorList (exact=False, residual set); exact lower certificates
    carry their justification and, where one exists, the member or matching
    that realizes the value.
    """

    kind: BoundKind
    value: int
    justification: Justification
    exact: bool = True
    factors: Optional[FactorList] = None
    member: Optional[DenseTensor] = None
    matching: Optional[Matching] = None
    residual: Optional[float] = None
    restart: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "kind": self.kind.value,
            "value": self.value,
            "justification": self.justification.value,
            "exact": self.exact,
        }
        if self.residual is not None:
            out["residual"] = self.residual
        if self.restart is not None:
            out["restart"] = self.restart
        if self.matching is not None:
            out["witness"] = self.matching.to_list()
        if self.member is not None:
            out["member"] = tensor_to_dict(self.member)
        if self.factors is not None:
            out["factors"] = [[[float(v) for v in vec] for vec in term] for term in self.factors.factors]
        return out


@dataclass(frozen=True)
class FitFailure:
    """Search exhausted its restarts. Proves nothing."""

    rank: int
    best_residual: float
    restarts: int

    def to_dict(self) -> dict[str, Any]:
        return {"rank": self.rank, "best_residual": self.best_residual, "restarts": self.restarts}


FitOutcome = Union[RankCertificate, FitFailure]


@dataclass(frozen=True)
class BoundsReport:
    min_rank_low: RankCertificate
    min_rank_high: Optional[RankCertificate]
    max_rank_low: RankCertificate
    max_rank_high: Optional[RankCertificate]
    failures: tuple[FitFailure, ...] = field(default_factory=tuple)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "mr_low": self.min_rank_low.value,
            "mr_high": self.min_rank_high.value if self.min_rank_high else None,
            "Mr_low": self.max_rank_low.value,
        }
        if self.max_rank_high is not None:
            out["Mr_high"] = self.max_rank_high.value
        certificates = {"mr_low": self.min_rank_low.to_dict(), "Mr_low": self.max_rank_low.to_dict()}
        if self.min_rank_high is not None:
            certificates["mr_high"] = self.min_rank_high.to_dict()
        if self.max_rank_high is not None:
            certificates["Mr_high"] = self.max_rank_high.to_dict()
        out["certificates"] = certificates
        out["failures"] = [f.to_dict() for f in self.failures]
        return out


# ──────────────────────────────────────────────────────────────────────────────
# Exact ranks
# ──────────────────────────────────────────────────────────────────────────────

def multilinear_rank(A: DenseTensor) -> MultilinearRank:
    return MultilinearRank(tuple(unfold(A, s).rank() for s in range(1, A.order + 1)))


def rank_lower_bound(A: DenseTensor) -> RankCertificate:
    value = multilinear_rank(A).maximum
    return RankCertificate(BoundKind.LOWER, value, Justification.UNFOLDING_RANK, member=A)


def _check_222(A: Union[DenseTensor, SignTensor]) -> None:
    if A.dims != (2, 2, 2):
        raise UnsupportedShapeError(f"expected a 2x2x2 tensor, got shape {A.shape}")


def hyperdet_222(A: DenseTensor) -> Fraction:
    _check_222(A)

    def a(*index: int) -> Fraction:
        return A[index]

    p = (
        a(1, 1, 1) * a(2, 2, 2),
        a(1, 1, 2) * a(2, 2, 1),
        a(1, 2, 1) * a(2, 1, 2),
        a(1, 2, 2) * a(2, 1, 1),
    )
    squares = sum((x * x for x in p), Fraction(0))
    cross = sum((p[i] * p[j] for i in range(4) for j in range(i + 1, 4)), Fraction(0))
    quartic = (
        a(1, 1, 1) * a(1, 2, 2) * a(2, 1, 2) * a(2, 2, 1)
        + a(1, 1, 2) * a(1, 2, 1) * a(2, 1, 1) * a(2, 2, 2)
    )
    return squares - 2 * cross + 4 * quartic


def rank_222_exact(A: DenseTensor) -> int:
    _check_222(A)
    if A.is_zero:
        return 0
    ranks = multilinear_rank(A)
    if all(r == 1 for r in ranks):
        return 1
    if any(r == 1 for r in ranks):
        return 2
    return 2 if hyperdet_222(A) > 0 else 3


# Monomials of Δ as multisets of positions. No two coincide, so Δ vanishes
# identically on a support iff every monomial touches a zero position.
_PAIRS = (
    ((1, 1, 1), (2, 2, 2)),
    ((1, 1, 2), (2, 2, 1)),
    ((1, 2, 1), (2, 1, 2)),
    ((1, 2, 2), (2, 1, 1)),
)
_HYPERDET_MONOMIALS = (
    [pair + pair for pair in _PAIRS]
    + [_PAIRS[i] + _PAIRS[j] for i in range(4) for j in range(i + 1, 4)]
    + [
        ((1, 1, 1), (1, 2, 2), (2, 1, 2), (2, 2, 1)),
        ((1, 1, 2), (1, 2, 1), (2, 1, 1), (2, 2, 2)),
    ]
)


def hyperdet_vanishes_on(S: SignTensor) -> bool:
    _check_222(S)
    support = S.support()
    return not any(all(pos in support for pos in monomial) for monomial in _HYPERDET_MONOMIALS)


def rank_222_pattern(S: SignTensor) -> bool:
    """
    True when every member of Q(S) has rank 3: Δ is identically zero on the
    support and each unfolding pattern is an L-matrix, so every member has
    rank_⊞ = (2, 2, 2) and Δ = 0.
    """
    _check_222(S)
    if not hyperdet_vanishes_on(S):
        return False
    return all(is_l_matrix(unfolding_pattern(S, mode)) for mode in (1, 2, 3))


def mode_compress(A: DenseTensor, mode: int) -> Optional[tuple[RationalMatrix, DenseTensor]]:
    """
    (P, (I, …, P, …, I)·A) with the last mode-s slice of the result zero,
    or None when the mode-s unfolding has full row rank. The last row of P
    is a left-kernel vector y of the unfolding; the other rows are the unit
    vectors e_i for every i except the last nonzero position of y.
    """
    y = unfold(A, mode).left_kernel_vector()
    if y is None:
        return None
    n = len(y)
    pivot = max(i for i, v in enumerate(y) if v != 0)
    rows = [[int(i == j) for j in range(n)] for i in range(n) if i != pivot]
    P = RationalMatrix(rows + [list(y)], cols=n)
    return P, mode_product(A, P, mode)


# ──────────────────────────────────────────────────────────────────────────────
# Alternating least squares
# ──────────────────────────────────────────────────────────────────────────────

def _restart_generators(config: SearchConfig) -> list[np.random.Generator]:
    children = np.random.SeedSequence(config.seed).spawn(config.restarts)
    return [np.random.default_rng(child) for child in children]


def _random_factors(dims: Sequence[int], r: int, rng: np.random.Generator) -> list[np.ndarray]:
    return [rng.standard_normal((n, r)) for n in dims]


def _reconstruct(factors: Sequence[np.ndarray]) -> np.ndarray:
    letters = ascii_lowercase[: len(factors)]
    spec = ",".join(f"{c}z" for c in letters) + "->" + letters
    return np.einsum(spec, *factors, optimize=True)


def _normal_equations(X: np.ndarray, factors: Sequence[np.ndarray], mode: int) -> tuple[np.ndarray, np.ndarray]:
    """(Hadamard product of the other Gram matrices, MTTKRP) for one mode."""
    letters = ascii_lowercase[: len(factors)]
    r = factors[0].shape[1]
    lhs = np.ones((r, r))
    operands = [X]
    spec = letters
    for j, F in enumerate(factors):
        if j == mode:
            continue
        lhs *= F.T @ F
        spec += f",{letters[j]}z"
        operands.append(F)
    spec += f"->z{letters[mode]}"
    return lhs, np.einsum(spec, *operands, optimize=True)


def _solve_normal(lhs: np.ndarray, rhs: np.ndarray, ridge: float) -> np.ndarray:
    shifted = lhs + ridge * np.eye(lhs.shape[0])
    try:
        return la.cho_solve(la.cho_factor(shifted), rhs)
    except la.LinAlgError:
        return la.lstsq(shifted, rhs)[0]


def _als_sweep(X: np.ndarray, factors: list[np.ndarray], ridge: float) -> None:
    for mode in range(len(factors)):
        lhs, rhs = _normal_equations(X, factors, mode)
        factors[mode] = _solve_normal(lhs, rhs, ridge).T


def _relative_residual(X: np.ndarray, approx: np.ndarray) -> float:
    norm = float(np.linalg.norm(X))
    return float(np.linalg.norm(X - approx)) / norm if norm else float(np.linalg.norm(approx))


def _factor_list(factors: Sequence[np.ndarray]) -> FactorList:
    """Exact binary values of the float factors; terms with a zero vector are dropped."""
    terms = []
    for j in range(factors[0].shape[1]):
        vectors = tuple(tuple(Fraction(float(v)) for v in F[:, j]) for F in factors)
        if all(any(vec) for vec in vectors):
            terms.append(vectors)
    return FactorList(tuple(terms))


def _pencil_factors(X: np.ndarray) -> Optional[list[np.ndarray]]:
    """
    Rank-2 factors of a 2×2×2 array read off its slice pencil. With
    X[:, :, l] = U diag(c_l) Vᵀ the columns of U are the eigenvectors of
    X₂P⁻¹ for any invertible P in the pencil; U⁻¹X[:, :, l] then has rank-one
    rows (c_j ⊗ b_j) across l. Returns None when the eigenvalues are not
    real and distinct.
    """
    A1, A2 = X[:, :, 0], X[:, :, 1]
    P = max((A1 + t * A2 for t in PENCIL_SHIFTS), key=lambda M: abs(la.det(M)))
    try:
        values, U = la.eig(la.solve(P.T, A2.T).T)
    except la.LinAlgError:
        return None
    if np.any(np.abs(values.imag) > 1e-9) or abs(values[0] - values[1]) < 1e-9:
        return None

    U = U.real
    slices = [la.solve(U, X[:, :, l]) for l in range(2)]
    B, C = np.empty((2, 2)), np.empty((2, 2))
    for j in range(2):
        u, s, vt = np.linalg.svd(np.stack([slices[0][j], slices[1][j]]))
        C[:, j] = s[0] * u[:, 0]
        B[:, j] = vt[0]
    return [U, B, C]


def cp_fit(
    A: DenseTensor,
    r: int,
    config: Optional[SearchConfig] = None,
    init: Optional[Sequence[np.ndarray]] = None,
) -> FitOutcome:
    """
    Look for A ≈ Σ_{j≤r} α_1^j ⊗ ⋯ ⊗ α_k^j. Restart 0 starts from init when
    given, or from the slice-pencil factors for a 2×2×2 tensor with Δ > 0 at
    r = 2; every restart draws from its own child of the run seed. The first
    restart whose relative residual drops below tol wins.
    """
    if r < 1:
        raise UnsupportedShapeError(f"target rank must be >= 1, got {r}")
    config = config or SearchConfig()
    X = A.to_array()
    if not X.any():
        return RankCertificate(BoundKind.UPPER, 0, Justification.ZERO, factors=FactorList(()), residual=0.0)
    if init is None and r == 2 and A.dims == (2, 2, 2) and hyperdet_222(A) > 0:
        init = _pencil_factors(X)

    best = math.inf
    for restart, rng in enumerate(_restart_generators(config)):
        if restart == 0 and init is not None:
            factors = [np.array(F, dtype=float) for F in init]
        else:
            factors = _random_factors(X.shape, r, rng)

        residual, prev, sweeps = math.inf, math.inf, 0
        for sweeps in range(1, config.iterations + 1):
            _als_sweep(X, factors, config.ridge)
            residual = _relative_residual(X, _reconstruct(factors))
            if residual < config.tol or abs(prev - residual) < config.stall_tol:
                break
            prev = residual

        best = min(best, residual)
        logger.debug(
            f"[rank] cp_fit.restart | r={r} | restart={restart} | sweeps={sweeps} | residual={residual:.3e}"
        )
        if residual < config.tol:
            factor_list = _factor_list(factors)
            logger.info(
                f"[rank] cp_fit.success | shape={A.shape} | r={r} | restart={restart} | residual={residual:.3e}"
            )
            return RankCertificate(
                BoundKind.UPPER,
                factor_list.rank,
                Justification.NUMERIC_FIT,
                exact=False,
                factors=factor_list,
                residual=residual,
                restart=restart,
            )

    logger.warning(
        f"[rank] cp_fit.exhausted | shape={A.shape} | r={r} | restarts={config.restarts} | best={best:.3e}"
    )
    return FitFailure(r, best, config.restarts)


# ──────────────────────────────────────────────────────────────────────────────
# Sign-constrained search
# ──────────────────────────────────────────────────────────────────────────────

def _project(approx: np.ndarray, signs: np.ndarray, low: float, high: float) -> np.ndarray:
    """Nearest member of the sign class within the magnitude box."""
    return signs * np.clip(signs * approx, low, high)


def _random_member(signs: np.ndarray, low: float, high: float, rng: np.random.Generator) -> np.ndarray:
    return signs * np.exp(rng.uniform(math.log(low), math.log(high), size=signs.shape))


def _exact_member(target: np.ndarray, S: SignTensor) -> DenseTensor:
    store = {
        index: Fraction(float(target[tuple(i - 1 for i in index)])).limit_denominator(MEMBER_DENOMINATOR)
        for index in S.entries
    }
    return DenseTensor(S.shape, store)


def mr_upper_search(S: SignTensor, r: int, config: Optional[SearchConfig] = None) -> FitOutcome:
    """
    Certify mr(S) ≤ r by finding a member of Q(S) with a rank-r fit.

    Each sweep alternates one ALS pass against the current member with a
    projection of the reconstruction back onto the sign class. Restart 0
    starts from the all-unit member, later restarts from random members.
    Success needs the relative residual below tol and every nonzero entry of
    the reconstruction on the right side of zero by sign_margin.
    """
    if r < 1:
        raise UnsupportedShapeError(f"target rank must be >= 1, got {r}")
    config = config or SearchConfig()
    if S.is_zero:
        return RankCertificate(BoundKind.UPPER, 0, Justification.ZERO, member=DenseTensor(S.shape))

    signs = S.to_array()
    mask = signs != 0
    low, high = config.magnitude_low, config.magnitude_high

    best = math.inf
    for restart, rng in enumerate(_restart_generators(config)):
        if restart == 0:
            target = probe_member(S).to_array()
        else:
            target = _random_member(signs, low, high, rng)
        factors = _random_factors(signs.shape, r, rng)

        residual, prev, approx = math.inf, math.inf, target
        for _ in range(config.iterations):
            _als_sweep(target, factors, config.ridge)
            approx = _reconstruct(factors)
            target = _project(approx, signs, low, high)
            residual = _relative_residual(target, approx)
            if residual < config.tol or abs(prev - residual) < config.stall_tol:
                break
            prev = residual

        best = min(best, residual)
        logger.debug(f"[rank] mr_search.restart | r={r} | restart={restart} | residual={residual:.3e}")
        if residual >= config.tol:
            continue
        if not np.all(signs[mask] * approx[mask] >= config.sign_margin):
            continue

        member = _exact_member(target, S)
        if sign_pattern(member) != S:
            logger.warning(f"[rank] mr_search.rounding_broke_signs | r={r} | restart={restart}")
            continue

        factor_list = _factor_list(factors)
        logger.info(
            f"[rank] mr_search.success | shape={S.shape} | r={r} | restart={restart} | residual={residual:.3e}"
        )
        return RankCertificate(
            BoundKind.UPPER,
            factor_list.rank,
            Justification.NUMERIC_FIT,
            exact=False,
            factors=factor_list,
            member=member,
            residual=residual,
            restart=restart,
        )

    logger.warning(
        f"[rank] mr_search.exhausted | shape={S.shape} | r={r} | restarts={config.restarts} | best={best:.3e}"
    )
    return FitFailure(r, best, config.restarts)


# ──────────────────────────────────────────────────────────────────────────────
# Bounds over a qualitative class
# ──────────────────────────────────────────────────────────────────────────────

def _lower(value: int, why: Justification, **witness: Any) -> RankCertificate:
    return RankCertificate(BoundKind.LOWER, value, why, **witness)


def _best(*certificates: Optional[RankCertificate]) -> RankCertificate:
    """Largest value wins; ties keep the earliest."""
    present = [c for c in certificates if c is not None]
    return max(present, key=lambda c: c.value)


def _min_rank_lower(S: SignTensor) -> RankCertificate:
    found = [_lower(1, Justification.NONZERO)]
    if not is_mr1(S):
        found.append(_lower(2, Justification.NOT_MR1))

    cubical = S.shape.is_cubical
    n = S.dims[0]
    if S.order == 2 and cubical and n <= MAX_DECISION_DIM:
        if is_sns_matrix(SignMatrix.from_tensor(S)):
            found.append(_lower(n, Justification.SNS_MATRIX))
    if S.order >= 3 and cubical and n <= MAX_DECISION_DIM:
        if has_sign_left_inverse_order2(S).decision or has_sign_right_inverse_order2(S).decision:
            found.append(_lower(n, Justification.SIGN_INVERSE))
    if S.dims == (2, 2, 2) and rank_222_pattern(S):
        found.append(_lower(3, Justification.PATTERN_222))
    return _best(*found)


def _max_rank_upper(S: SignTensor, rho: int) -> Optional[RankCertificate]:
    if S.order == 2:
        return RankCertificate(BoundKind.UPPER, rho, Justification.TERM_RANK)
    if S.dims == (2, 2, 2):
        return RankCertificate(BoundKind.UPPER, 3, Justification.CUBE_222)
    return None


def _max_rank_lower(
    S: SignTensor,
    rho: TermRankResult,
    sampling: SamplingConfig,
    floor: RankCertificate,
    ceiling: Optional[int],
) -> RankCertificate:
    by_term = _lower(rho.value, Justification.TERM_RANK, matching=rho.matching)
    best = _best(by_term, floor)

    is_cube = S.dims == (2, 2, 2)
    members = member_sequence(S, sampling.samples, sampling.seed, sampling.magnitude_range)
    for member in members:
        if ceiling is not None and best.value >= ceiling:
            break
        if is_cube:
            value, why = rank_222_exact(member), Justification.ORACLE_222
        else:
            value, why = multilinear_rank(member).maximum, Justification.UNFOLDING_RANK
        if value > best.value:
            best = _lower(value, why, member=member)
    return best


def default_r_max(shape: Shape) -> int:
    """∏ of every dimension except one largest: a rank bound for every tensor of this shape."""
    return shape.size // max(shape.dims)


def bounds_report(
    S: SignTensor,
    config: Optional[SearchConfig] = None,
    sampling: Optional[SamplingConfig] = None,
) -> BoundsReport:
    if S.order < 2:
        raise UnsupportedShapeError(f"rank bounds need order k >= 2, got {S.order}")
    config = config or SearchConfig()
    sampling = sampling or SamplingConfig()

    if S.is_zero:
        zero_low = _lower(0, Justification.ZERO)
        zero_high = RankCertificate(BoundKind.UPPER, 0, Justification.ZERO, member=DenseTensor(S.shape))
        return BoundsReport(zero_low, zero_high, zero_low, zero_high)

    # ── Step 1: exact lower bound on mr ──────────────────────────────────────
    mr_low = _min_rank_lower(S)
    logger.info(f"[rank] bounds.mr_low | value={mr_low.value} | why={mr_low.justification.value}")

    # ── Step 2: Mr bounds (term rank, sampled members, shape caps) ────────────
    rho = term_rank(S)
    max_high = _max_rank_upper(S, rho.value)
    max_low = _max_rank_lower(S, rho, sampling, mr_low, max_high.value if max_high else None)
    logger.info(f"[rank] bounds.Mr_low | value={max_low.value} | why={max_low.justification.value}")

    # ── Step 3: scan r for an mr upper certificate ───────────────────────────
    r_max = config.r_max or default_r_max(S.shape)
    if max_high is not None:
        r_max = min(r_max, max_high.value)
    failures: list[FitFailure] = []
    mr_high: Optional[RankCertificate] = None
    for r in range(max(1, mr_low.value), r_max + 1):
        outcome = mr_upper_search(S, r, config)
        if isinstance(outcome, RankCertificate):
            mr_high = outcome
            break
        failures.append(outcome)

    if mr_high is None:
        logger.warning(f"[rank] bounds.mr_high_missing | shape={S.shape} | r_max={r_max}")
    else:
        logger.info(f"[rank] bounds.mr_high | value={mr_high.value} | restart={mr_high.restart}")

    return BoundsReport(mr_low, mr_high, max_low, max_high, tuple(failures))
