"""
qualtensor/tensor_io.py
────────────────────────
Tensor file format (UTF-8 JSON):

    {"shape": [n1, ..., nk],
     "entries": [{"idx": [i1, ..., ik], "val": "p/q"}, ...]}

"val" is a decimal integer or a "p/q" rational string; omitted indices
are zero and a repeated idx is an error. Sign tensors use the same
layout with "val" in {"-1", "0", "1"}.

Parsing is schema-validated with pydantic; every failure surfaces as a
TensorFormatError (or IndexOutOfRangeError for indices outside the
shape) with a message naming the broken rule.
"""

from __future__ import annotations

import json
import logging
import re
from fractions import Fraction
from pathlib import Path
from typing import Any, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from qualtensor.errors import IndexOutOfRangeError, TensorFormatError, UnsupportedShapeError
from qualtensor.linalg import RationalMatrix
from qualtensor.tensor import DenseTensor, Shape, SparseTensor

logger = logging.getLogger(__name__)

RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


# ──────────────────────────────────────────────────────────────────────────────
# Schema
# ──────────────────────────────────────────────────────────────────────────────

class EntryModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    idx: list[int] = Field(min_length=1)
    val: Union[int, str]


class TensorFileModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    shape: list[int] = Field(min_length=1)
    entries: list[EntryModel] = Field(default_factory=list)

    @field_validator("shape")
    @classmethod
    def _positive_dims(cls, dims: list[int]) -> list[int]:
        if any(d < 1 for d in dims):
            raise ValueError(f"every dimension must be >= 1, got {dims}")
        return dims


# ──────────────────────────────────────────────────────────────────────────────
# Rationals
# ──────────────────────────────────────────────────────────────────────────────

def parse_rational(text: Union[int, str]) -> Fraction:
    if isinstance(text, bool):
        raise TensorFormatError(f"value {text!r} is not a rational")
    if isinstance(text, int):
        return Fraction(text)
    match = RATIONAL_RE.match(text)
    if not match:
        raise TensorFormatError(f"value {text!r} is not an integer or 'p/q' rational")
    num, den = match.group(1), match.group(2)
    if den is not None and int(den) == 0:
        raise TensorFormatError(f"value {text!r} has a zero denominator")
    return Fraction(int(num), int(den) if den else 1)


def format_rational(value: Fraction) -> str:
    """Canonical text: "p" for integers, "p/q" in lowest terms otherwise."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_vector(text: str) -> tuple[Fraction, ...]:
    """"1,2/3,-4" → (1, 2/3, -4)."""
    parts = [p for p in text.split(",")]
    if not text.strip() or any(not p.strip() for p in parts):
        raise TensorFormatError(f"vector {text!r} must be a comma separated list of rationals")
    return tuple(parse_rational(p.strip()) for p in parts)


# ──────────────────────────────────────────────────────────────────────────────
# Tensors
# ──────────────────────────────────────────────────────────────────────────────

def loads_tensor(text: str, signs_only: bool = False) -> DenseTensor:
    try:
        model = TensorFileModel.model_validate_json(text)
    except ValidationError as exc:
        raise TensorFormatError(f"malformed tensor JSON: {_first_error(exc)}") from exc

    try:
        shape = Shape(tuple(model.shape))
    except UnsupportedShapeError as exc:
        raise TensorFormatError(str(exc)) from exc

    entries: dict[tuple[int, ...], Fraction] = {}
    for entry in model.entries:
        index = tuple(entry.idx)
        if not shape.contains(index):
            raise IndexOutOfRangeError(f"index {entry.idx} lies outside shape {shape}")
        if index in entries:
            raise TensorFormatError(f"duplicate idx {entry.idx}")
        value = parse_rational(entry.val)
        if signs_only and value not in (-1, 0, 1):
            raise TensorFormatError(f"sign tensor value at {entry.idx} must be -1, 0 or 1")
        entries[index] = value

    tensor = DenseTensor(shape, entries)
    logger.debug(f"[tensor_io] tensor.parsed | shape={shape} | nnz={tensor.nnz}")
    return tensor


def load_tensor(path: Union[str, Path], signs_only: bool = False) -> DenseTensor:
    path = Path(path)
    logger.info(f"[tensor_io] file.reading | path={path}")
    return loads_tensor(path.read_text(encoding="utf-8"), signs_only=signs_only)


def tensor_to_dict(tensor: SparseTensor) -> dict[str, Any]:
    return {
        "shape": list(tensor.dims),
        "entries": [
            {"idx": list(index), "val": format_rational(Fraction(value))}
            for index, value in tensor.sorted_items()
        ],
    }


def dumps_tensor(tensor: SparseTensor) -> str:
    return json.dumps(tensor_to_dict(tensor), separators=(",", ":"))


def dump_tensor(tensor: SparseTensor, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_tensor(tensor) + "\n", encoding="utf-8")
    logger.info(f"[tensor_io] file.written | path={path} | nnz={tensor.nnz}")
    return path


def matrix_to_list(matrix: RationalMatrix) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in matrix.rows]


def _first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    where = ".".join(str(p) for p in err.get("loc", ())) or "document"
    return f"{where}: {err.get('msg', 'invalid')}"
