from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from qualtensor.errors import IndexOutOfRangeError, ShapeMismatchError, UnsupportedShapeError, ZeroVectorError
from qualtensor.linalg import RationalMatrix
from qualtensor.tensor import (
    DenseTensor,
    FactorList,
    Shape,
    apply_power,
    majorization_matrix,
    make_unit,
    matrix_tensor,
    mode_product,
    multilinear_transform,
    outer_product,
    shao_product,
    slice_tensor,
    subtensor,
    sum_of_rank_ones,
    transpose_pq,
    unfold,
)


def random_integer_tensor(rng: np.random.Generator, dims: tuple[int, ...], low: int = -3, high: int = 3) -> DenseTensor:
    values = rng.integers(low, high + 1, size=dims)
    return DenseTensor(Shape(dims), {tuple(i + 1 for i in pos): int(v) for pos, v in np.ndenumerate(values)})


def random_matrix(rng: np.random.Generator, rows: int, cols: int) -> RationalMatrix:
    return RationalMatrix(rng.integers(-2, 3, size=(rows, cols)).tolist(), cols=cols)


class TestShape:
    def test_rejects_empty_and_nonpositive_dims(self):
        with pytest.raises(UnsupportedShapeError):
            Shape(())
        with pytest.raises(UnsupportedShapeError, match=">= 1"):
            Shape.of(2, 0)

    def test_indices_are_lexicographic_and_one_based(self):
        assert list(Shape.of(2, 2).indices()) == [(1, 1), (1, 2), (2, 1), (2, 2)]

    def test_dimension_needs_cubical(self):
        assert Shape.cube(3, 4).dimension == 3
        with pytest.raises(UnsupportedShapeError):
            Shape.of(2, 3).dimension

    def test_str(self):
        assert str(Shape.of(2, 3, 4)) == "2x3x4"


class TestStorage:
    def test_zeros_are_dropped_and_missing_reads_zero(self):
        A = DenseTensor(Shape.of(2, 2), {(1, 1): 0, (2, 2): Fraction(1, 2)})
        assert A.nnz == 1
        assert A[(1, 1)] == 0
        assert A[(2, 2)] == Fraction(1, 2)

    def test_out_of_range_index(self):
        with pytest.raises(IndexOutOfRangeError):
            DenseTensor(Shape.of(2, 2), {(3, 1): 1})

    def test_equality_depends_on_shape(self):
        assert DenseTensor(Shape.of(2, 2), {(1, 1): 1}) != DenseTensor(Shape.of(2, 3), {(1, 1): 1})
        assert DenseTensor(Shape.of(2, 2), {(1, 1): 1}) == DenseTensor.from_nested([[1, 0], [0, 0]])

    def test_arithmetic(self):
        A = DenseTensor.from_nested([[1, 2], [3, 4]])
        assert (A + (-A)).is_zero
        assert (A + A) == A.scale(2)


class TestConstructors:
    def test_make_unit(self):
        I = make_unit(2, 3)
        assert I.nnz == 2
        assert I[(1, 1, 1)] == 1 and I[(2, 2, 2)] == 1

    def test_outer_product_entries(self):
        T = outer_product([[1, 2], [3, 0, -1]])
        assert T.dims == (2, 3)
        assert T[(2, 3)] == -2
        assert T[(1, 2)] == 0

    def test_outer_product_rejects_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            outer_product([[1, 0], [0, 0]])

    def test_factor_list_rejects_zero_vector(self):
        with pytest.raises(ZeroVectorError):
            FactorList((((1, 0), (0, 0)),))

    def test_sum_of_rank_ones(self):
        f = FactorList((((1, 0), (1, 0)), ((0, 1), (0, 1))))
        assert sum_of_rank_ones(f, Shape.of(2, 2)) == make_unit(2, 2)

    def test_sum_of_rank_ones_checks_shape(self):
        f = FactorList((((1, 0), (1, 0, 0)),))
        with pytest.raises(ShapeMismatchError):
            sum_of_rank_ones(f, Shape.of(2, 2))


class TestRearrangements:
    def test_transpose_twice_is_identity(self, rng):
        A = random_integer_tensor(rng, (2, 3, 4))
        B = transpose_pq(A, 1, 3)
        assert B.dims == (4, 3, 2)
        assert B[(4, 2, 1)] == A[(1, 2, 4)]
        assert transpose_pq(B, 1, 3) == A

    def test_subtensor_reindexes(self):
        A = DenseTensor.from_nested([[1, 2, 3], [4, 5, 6]])
        assert subtensor(A, [[2], [1, 3]]) == DenseTensor.from_nested([[4, 6]])

    def test_subtensor_rejects_empty_subset(self):
        with pytest.raises(UnsupportedShapeError):
            subtensor(make_unit(2, 2), [[], [1]])

    def test_slice(self, remark_tensor):
        S = slice_tensor(remark_tensor, 1, 1)
        assert S == DenseTensor(Shape.of(2, 2), {(1, 1): 2, (2, 2): 3})

    def test_unfold_column_order(self):
        A = DenseTensor(Shape.of(2, 2, 2), {(1, 2, 1): 5, (2, 1, 2): 7})
        M = unfold(A, 1)
        # columns (i2, i3) = (1,1), (1,2), (2,1), (2,2)
        assert M.rows == ((0, 0, 5, 0), (0, 7, 0, 0))

    def test_unfold_mode_range(self):
        with pytest.raises(IndexOutOfRangeError):
            unfold(make_unit(2, 3), 4)

    def test_unfold_rank_ignores_order_of_other_modes(self, rng):
        for _ in range(20):
            A = outer_product([[int(v) for v in rng.integers(1, 4, size=n)] for n in (3, 2, 3, 2)])
            A = A + random_integer_tensor(rng, (3, 2, 3, 2), low=0, high=1)
            for mode, (p, q) in ((1, (2, 4)), (2, (1, 3)), (3, (1, 2)), (4, (2, 3))):
                assert unfold(transpose_pq(A, p, q), mode).rank() == unfold(A, mode).rank()


class TestProducts:
    def test_mode_product_matches_matrix_product(self):
        A = DenseTensor.from_nested([[1, 2], [3, 4]])
        L = RationalMatrix([[0, 1], [1, 0]])
        assert mode_product(A, L, 1) == DenseTensor.from_nested([[3, 4], [1, 2]])

    def test_multilinear_identity(self, rng):
        A = random_integer_tensor(rng, (2, 3, 2))
        mats = [RationalMatrix.identity(n) for n in A.dims]
        assert multilinear_transform(mats, A) == A

    def test_multilinear_transform_composes(self, rng):
        A = random_integer_tensor(rng, (2, 3, 2))
        outer = [random_matrix(rng, 2, n) for n in A.dims]
        inner = [random_matrix(rng, n, n) for n in A.dims]
        composed = [L @ M for L, M in zip(outer, inner)]
        assert multilinear_transform(composed, A) == multilinear_transform(outer, multilinear_transform(inner, A))

    def test_matrix_product_commutes_with_apply_power(self, rng):
        for k in (2, 3, 4):
            A = random_integer_tensor(rng, (3,) * k)
            P = random_matrix(rng, 3, 3)
            x = (Fraction(1, 2), -1, 2)
            y = apply_power(A, x)
            expected = tuple(sum((p * v for p, v in zip(row, y)), Fraction(0)) for row in P.rows)
            assert apply_power(shao_product(matrix_tensor(P), A), x) == expected

    def test_matrix_times_unit(self):
        M = matrix_tensor(RationalMatrix([[2, 0], [0, 3]]))
        assert shao_product(M, make_unit(2, 3)) == DenseTensor(Shape.cube(2, 3), {(1, 1, 1): 2, (2, 2, 2): 3})

    def test_product_of_matrices_is_matrix_product(self):
        P = RationalMatrix([[1, 2], [3, 4]])
        Q = RationalMatrix([[0, 1], [5, -1]])
        assert shao_product(matrix_tensor(P), matrix_tensor(Q)) == matrix_tensor(P @ Q)

    def test_product_order(self, rng):
        A = random_integer_tensor(rng, (2, 2, 2))
        B = random_integer_tensor(rng, (2, 2, 2))
        assert shao_product(A, B).order == 5

    def test_unit_is_left_identity(self, rng):
        B = random_integer_tensor(rng, (2, 2, 2))
        assert shao_product(make_unit(2, 2), B) == B

    def test_product_with_vector_is_apply_power(self, rng):
        A = random_integer_tensor(rng, (3, 3, 3))
        x = (1, -2, Fraction(1, 2))
        vec = DenseTensor(Shape.of(3), {(i,): v for i, v in enumerate(x, start=1)})
        result = shao_product(A, vec)
        assert tuple(result[(i,)] for i in range(1, 4)) == apply_power(A, x)

    def test_apply_power_on_unit(self):
        assert apply_power(make_unit(2, 3), (2, 3)) == (4, 9)

    def test_product_rejects_dimension_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            shao_product(make_unit(2, 3), make_unit(3, 2))

    def test_majorization_matrix(self, remark_tensor):
        assert majorization_matrix(remark_tensor) == RationalMatrix([[2, 3], [0, 0]])
