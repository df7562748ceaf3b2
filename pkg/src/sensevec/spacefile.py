"""Persistence of built concept spaces.

File layout (UTF-8, LF newlines, tab-delimited):

    #format<TAB>sensevec-space<TAB>1
    #dimension<TAB><M>
    #def-compose<TAB><sum|avg|mul>
    #concept-compose<TAB><sum|avg|mul>
    #expansion<TAB><none|related>
    #embeddings-sha256<TAB><hex fingerprint of the embedding table>
    <cui><TAB><definitionsUsed><TAB><tokensUsed><TAB><tokensSkipped><TAB><v1 SP v2 ...>

Vector values use the shortest round-tripping decimal form, so a reload is
bit-exact. Rows are sorted by cui; rebuilding from identical inputs rewrites
identical bytes. Writes go through a temporary file and an atomic rename, so
a failed write never leaves a partial space behind.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import FormatError
from .knowledge import ConceptVector

FORMAT_NAME = "sensevec-space"
FORMAT_VERSION = "1"

_HEADER_KEYS = (
    "dimension",
    "def-compose",
    "concept-compose",
    "expansion",
    "embeddings-sha256",
)


@dataclass(frozen=True)
class SpaceMeta:
    """Build parameters a persisted space carries so reuse can be validated."""

    dimension: int
    def_compose: str
    concept_compose: str
    expansion: str
    embedding_fingerprint: str


def save(path, space: Mapping[str, ConceptVector], meta: SpaceMeta) -> None:
    """Write the concept space atomically to path."""
    path = Path(path)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(f"#format\t{FORMAT_NAME}\t{FORMAT_VERSION}\n")
            stream.write(f"#dimension\t{meta.dimension}\n")
            stream.write(f"#def-compose\t{meta.def_compose}\n")
            stream.write(f"#concept-compose\t{meta.concept_compose}\n")
            stream.write(f"#expansion\t{meta.expansion}\n")
            stream.write(f"#embeddings-sha256\t{meta.embedding_fingerprint}\n")
            for cui in sorted(space):
                cv = space[cui]
                values = " ".join(repr(float(v)) for v in cv.vector)
                stream.write(
                    f"{cui}\t{cv.definitions_used}\t{cv.tokens_used}\t"
                    f"{cv.tokens_skipped}\t{values}\n"
                )
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def load(path) -> tuple[dict[str, ConceptVector], SpaceMeta]:
    """Read a persisted concept space back, validating the header and rows."""
    name = str(path)
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    while lines and not lines[-1].strip():
        lines.pop()

    if not lines or not lines[0].startswith("#format\t"):
        raise FormatError("missing '#format' header line", name, 1)
    format_fields = lines[0].split("\t")
    if format_fields[1:] != [FORMAT_NAME, FORMAT_VERSION]:
        raise FormatError(
            f"unsupported format {format_fields[1:]!r}; "
            f"expected {[FORMAT_NAME, FORMAT_VERSION]!r}",
            name,
            1,
        )

    header: dict[str, str] = {}
    row_start = 1
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.startswith("#"):
            break
        fields = line[1:].split("\t")
        if len(fields) != 2:
            raise FormatError(f"malformed header line {line!r}", name, lineno)
        header[fields[0]] = fields[1]
        row_start = lineno
    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise FormatError(f"missing header keys: {missing}", name, row_start)
    try:
        dimension = int(header["dimension"])
    except ValueError:
        raise FormatError(
            f"dimension must be an integer, got {header['dimension']!r}", name, 1
        ) from None
    if dimension < 1:
        raise FormatError(f"dimension must be positive, got {dimension}", name, 1)
    meta = SpaceMeta(
        dimension,
        header["def-compose"],
        header["concept-compose"],
        header["expansion"],
        header["embeddings-sha256"],
    )

    space: dict[str, ConceptVector] = {}
    rows = lines[row_start:]
    if not rows:
        raise FormatError("space file holds no concept rows", name, row_start + 1)
    for lineno, line in enumerate(rows, start=row_start + 1):
        fields = line.split("\t")
        if len(fields) != 5:
            raise FormatError(
                f"expected 5 tab-separated fields, found {len(fields)}", name, lineno
            )
        cui, used_s, tok_used_s, tok_skipped_s, vector_s = fields
        if cui in space:
            raise FormatError(f"duplicate cui {cui!r}", name, lineno)
        try:
            used = int(used_s)
            tok_used = int(tok_used_s)
            tok_skipped = int(tok_skipped_s)
        except ValueError:
            raise FormatError("provenance counts must be integers", name, lineno) from None
        if used < 1 or tok_used < 1 or tok_skipped < 0:
            raise FormatError(
                f"implausible provenance counts {used}/{tok_used}/{tok_skipped}",
                name,
                lineno,
            )
        parts = vector_s.split(" ")
        if len(parts) != dimension:
            raise FormatError(
                f"expected {dimension} vector values, found {len(parts)}", name, lineno
            )
        try:
            vector = np.array([float(p) for p in parts], dtype=np.float64)
        except ValueError:
            raise FormatError("non-numeric vector value", name, lineno) from None
        if not all(math.isfinite(v) for v in vector):
            raise FormatError("non-finite vector value", name, lineno)
        space[cui] = ConceptVector(cui, vector, used, tok_used, tok_skipped)
    return space, meta
