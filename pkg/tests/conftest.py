from __future__ import annotations

from pathlib import Path
from typing import Callable

import numpy as np
import pytest

from qualtensor.config import SamplingConfig, SearchConfig
from qualtensor.qualitative import SignTensor, sign_pattern
from qualtensor.tensor import DenseTensor, Shape, SparseTensor
from qualtensor.tensor_io import dump_tensor


@pytest.fixture
def remark_tensor() -> DenseTensor:
    """Every member of this class is SNS yet has rank 3 > n."""
    return DenseTensor(Shape.of(2, 2, 2), {(1, 1, 1): 2, (1, 2, 2): 3, (2, 1, 2): 3})


@pytest.fixture
def example41_tensor() -> DenseTensor:
    """Term rank 2, but its members reach rank 3."""
    return DenseTensor(
        Shape.of(2, 2, 2),
        {(1, 1, 1): 2, (1, 2, 2): 1, (2, 1, 1): 1, (2, 1, 2): -1, (2, 2, 1): 1, (2, 2, 2): 1},
    )


@pytest.fixture
def remark_pattern(remark_tensor: DenseTensor) -> SignTensor:
    return sign_pattern(remark_tensor)


@pytest.fixture
def example41_pattern(example41_tensor: DenseTensor) -> SignTensor:
    return sign_pattern(example41_tensor)


@pytest.fixture
def all_plus_222() -> SignTensor:
    return SignTensor(Shape.of(2, 2, 2), {index: 1 for index in Shape.of(2, 2, 2).indices()})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def fast_search() -> SearchConfig:
    return SearchConfig(restarts=5, iterations=300)


@pytest.fixture
def fast_sampling() -> SamplingConfig:
    return SamplingConfig(samples=50, trials=200)


@pytest.fixture
def tensor_file(tmp_path: Path) -> Callable[[str, SparseTensor], str]:
    def write(name: str, tensor: SparseTensor) -> str:
        return str(dump_tensor(tensor, tmp_path / name))

    return write
