"""
qualtensor/errors.py
─────────────────────
Input errors raised by the library. Every message names the violated
precondition so the CLI can print it unchanged.

All classes derive from ValueError: callers that only care about "bad
input" can keep catching ValueError.
"""

from __future__ import annotations


class TensorError(ValueError):
    """Base class for every precondition violation in qualtensor."""


class ShapeMismatchError(TensorError):
    """Two operands (or an operand and a shape) do not fit together."""


class IndexOutOfRangeError(TensorError):
    """A mode, multi-index or subset element lies outside the shape."""


class ZeroVectorError(TensorError):
    """A rank-one factor was given as the zero vector."""


class UnsupportedShapeError(TensorError):
    """The operation is only defined (or only tractable) for other shapes."""


class TensorFormatError(TensorError):
    """A tensor file or rational literal could not be parsed."""
