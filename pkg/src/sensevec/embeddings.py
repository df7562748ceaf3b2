"""Parsing, lookup, and serialization of word2vec text-format embeddings.

The format, bit-exact: first line ``<vocabSize><SP><dimension>``; each
following row ``<token><SP><v1><SP>...<SP><vM>``. Reals may use plain or
scientific decimal notation and must be finite; tokens are UTF-8 and carry no
quoting; the file has no comments. Trailing whitespace and a final newline
are tolerated. Tokens are stored verbatim and looked up case-sensitively, so
pipelines that lowercase their text expect pre-lowercased vocabularies.
"""

from __future__ import annotations

import hashlib
import math
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FormatError

WORD2VEC_TEXT = "word2vec-text"


class EmbeddingTable:
    """Immutable map from token to a dense float64 vector of fixed dimension."""

    def __init__(self, tokens: Sequence[str], vectors: np.ndarray):
        matrix = np.array(vectors, dtype=np.float64, copy=True, order="C")
        if matrix.ndim != 2:
            raise ValueError("vectors must form a 2-D (vocab, dimension) array")
        if len(tokens) != matrix.shape[0]:
            raise ValueError("token count does not match vector row count")
        if matrix.shape[0] == 0:
            raise ValueError("embedding table may not be empty")
        if matrix.shape[1] == 0:
            raise ValueError("embedding dimension must be positive")
        index: dict[str, int] = {}
        for i, token in enumerate(tokens):
            if token in index:
                raise ValueError(f"duplicate token {token!r}")
            index[token] = i
        matrix.flags.writeable = False
        self._index = index
        self._vectors = matrix

    @property
    def dimension(self) -> int:
        return self._vectors.shape[1]

    @property
    def vocab_size(self) -> int:
        return self._vectors.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        """The read-only (vocab, dimension) backing array, in storage order."""
        return self._vectors

    def tokens(self) -> list[str]:
        """Tokens in storage (file) order."""
        return list(self._index)

    def __contains__(self, token: str) -> bool:
        return token in self._index

    def __len__(self) -> int:
        return self.vocab_size

    def lookup(self, token: str) -> np.ndarray | None:
        """The vector stored for an exact token match, or None when absent.

        Absence is a value here: out-of-vocabulary tokens never map to a
        zero vector.
        """
        i = self._index.get(token)
        if i is None:
            return None
        return self._vectors[i]

    def rows(self, tokens: Iterable[str]) -> tuple[np.ndarray, int]:
        """Vectors of the in-vocabulary tokens plus the out-of-vocabulary count.

        Returns a (k, dimension) matrix with one row per in-vocabulary token
        in input order, repeats included, and the number of tokens skipped.
        """
        get = self._index.get
        idx = []
        skipped = 0
        for token in tokens:
            i = get(token)
            if i is None:
                skipped += 1
            else:
                idx.append(i)
        if not idx:
            return np.empty((0, self.dimension)), skipped
        return self._vectors[np.asarray(idx, dtype=np.intp)], skipped

    def fingerprint(self) -> str:
        """SHA-256 over the canonical content: sorted tokens plus float64 bytes.

        Two tables holding the same entries fingerprint identically no matter
        the order their source files listed them in.
        """
        digest = hashlib.sha256()
        digest.update(f"{self.dimension}\n".encode())
        for token in sorted(self._index):
            digest.update(token.encode("utf-8"))
            digest.update(b"\x00")
            digest.update(self._vectors[self._index[token]].tobytes())
        return digest.hexdigest()

    def save(self, destination) -> None:
        """Serialize back to word2vec text format at 9 significant digits."""
        if isinstance(destination, (str, Path)):
            with open(destination, "w", encoding="utf-8", newline="\n") as stream:
                self._write(stream)
        else:
            self._write(destination)

    def _write(self, stream) -> None:
        stream.write(f"{self.vocab_size} {self.dimension}\n")
        for token, i in self._index.items():
            values = " ".join(f"{v:.9g}" for v in self._vectors[i])
            stream.write(f"{token} {values}\n")


def load_embeddings(source, format: str = WORD2VEC_TEXT) -> EmbeddingTable:
    """Parse a pretrained embedding file into an EmbeddingTable.

    `source` may be a filesystem path or a readable text/byte stream. Only
    the word2vec text format is supported. Malformed input raises FormatError
    carrying the offending line number; the header's declared row count must
    match the rows present, so nothing is ever silently dropped.
    """
    if format != WORD2VEC_TEXT:
        raise ValueError(f"unsupported embedding format {format!r}")
    name, text = _read_text(source)
    return _parse_word2vec_text(name, text)


def _read_text(source) -> tuple[str, str]:
    if isinstance(source, (str, Path)):
        return str(source), Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return getattr(source, "name", "<stream>"), data


def _parse_word2vec_text(name: str, text: str) -> EmbeddingTable:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FormatError(
            "empty file: expected '<vocabSize> <dimension>' header", name, 1
        )

    header = lines[0].split()
    if len(header) != 2:
        raise FormatError(
            f"malformed header {lines[0]!r}: expected '<vocabSize> <dimension>'",
            name,
            1,
        )
    try:
        vocab_size, dimension = int(header[0]), int(header[1])
    except ValueError:
        raise FormatError(
            f"malformed header {lines[0]!r}: counts must be integers", name, 1
        ) from None
    if vocab_size <= 0:
        raise FormatError(f"empty vocabulary: header declares {vocab_size}", name, 1)
    if dimension <= 0:
        raise FormatError(
            f"dimension must be positive, header declares {dimension}", name, 1
        )

    rows = lines[1:]
    tokens: list[str] = []
    seen: dict[str, int] = {}
    matrix = np.empty((vocab_size, dimension))
    for lineno, line in enumerate(rows, start=2):
        parts = line.split()
        if not parts:
            raise FormatError("blank line inside the table", name, lineno)
        if len(tokens) >= vocab_size:
            raise FormatError(
                f"header declares {vocab_size} rows but more follow", name, lineno
            )
        if len(parts) != dimension + 1:
            raise FormatError(
                f"expected a token plus {dimension} values, found {len(parts) - 1}",
                name,
                lineno,
            )
        token = parts[0]
        if token in seen:
            raise FormatError(
                f"duplicate token {token!r} (first seen at line {seen[token]})",
                name,
                lineno,
            )
        seen[token] = lineno
        try:
            values = [float(p) for p in parts[1:]]
        except ValueError:
            raise FormatError(f"non-numeric value in row {token!r}", name, lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise FormatError(f"non-finite value in row {token!r}", name, lineno)
        matrix[len(tokens)] = values
        tokens.append(token)

    if len(tokens) < vocab_size:
        raise FormatError(
            f"header declares {vocab_size} rows but the file ends after {len(tokens)}",
            name,
            len(lines) + 1,
        )
    return EmbeddingTable(tokens, matrix)
