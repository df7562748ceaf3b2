"""Unordered composition of equal-length vectors: sum, average, elementwise product."""

from __future__ import annotations

import enum

import numpy as np


class Composition(enum.Enum):
    """A vector-combining function insensitive to input order."""

    SUM = "sum"
    AVERAGE = "avg"
    MULTIPLY = "mul"

    @classmethod
    def from_name(cls, name: str) -> "Composition":
        """Parse a composition name as spelled on the command line."""
        try:
            return _NAMES[name.strip().lower()]
        except KeyError:
            raise ValueError(
                f"unknown composition {name!r}; expected one of sum, avg, mul"
            ) from None


_NAMES = {
    "sum": Composition.SUM,
    "avg": Composition.AVERAGE,
    "average": Composition.AVERAGE,
    "mul": Composition.MULTIPLY,
    "multiply": Composition.MULTIPLY,
}


def compose(vectors, fn: Composition) -> np.ndarray:
    """Collapse a nonempty collection of equal-length vectors into one vector.

    Accepts a sequence of 1-D vectors or an equivalent 2-D array, one vector
    per row. Always computes in float64 no matter the storage precision of
    the inputs. Rows are reduced in a canonical per-column order, which makes
    the result bit-for-bit invariant under permutation of the inputs.
    """
    if isinstance(vectors, np.ndarray):
        matrix = vectors.astype(np.float64, copy=False)
    else:
        vectors = list(vectors)
        if not vectors:
            raise ValueError("compose() requires at least one vector")
        try:
            matrix = np.asarray(vectors, dtype=np.float64)
        except ValueError:
            raise ValueError("dimension mismatch among input vectors") from None
    if matrix.ndim != 2:
        raise ValueError("compose() expects a list of equal-length vectors")
    if matrix.shape[0] == 0:
        raise ValueError("compose() requires at least one vector")
    if matrix.shape[1] == 0:
        raise ValueError("vectors must have positive dimension")

    ordered = np.sort(matrix, axis=0)
    if fn is Composition.SUM:
        return ordered.sum(axis=0)
    if fn is Composition.AVERAGE:
        return ordered.sum(axis=0) / ordered.shape[0]
    if fn is Composition.MULTIPLY:
        return ordered.prod(axis=0)
    raise TypeError(f"not a Composition: {fn!r}")
