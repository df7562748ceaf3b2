"""Sense-inventory ingestion and concept-vector construction.

Knowledge-base file grammar (UTF-8, one record per line, LF or CRLF):

    record      = cui TAB terms TAB definitions [TAB relations]
    cui         = 1*cuichar            ; no whitespace and none of '|' ':' ',' '#'
    terms       = term *('|' term)     ; at least one, each nonempty
    definitions = '' | definition *('|' definition)
    relations   = '' | relation *(',' relation)
    relation    = kind ':' cui         ; kind is parent, child, or sibling

'|' may not occur inside a definition. Every related cui must resolve to a
record in the same file; dangling references are load-time errors.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .composition import Composition, compose
from .corpus import PreprocessConfig, normalize_term, tokenize
from .embeddings import EmbeddingTable
from .errors import FormatError

logger = logging.getLogger(__name__)

RELATION_KINDS = ("parent", "child", "sibling")

EXPANSION_NONE = "none"
EXPANSION_RELATED = "related"

_CUI_RE = re.compile(r"[^\s|:,#]+")


@dataclass(frozen=True)
class Concept:
    """One sense: its identifier, surface terms, definitions, and relations."""

    cui: str
    surface_terms: tuple[str, ...]
    definitions: tuple[str, ...] = ()
    related: Mapping[str, frozenset[str]] = field(default_factory=dict)


@dataclass(frozen=True)
class SenseInventory:
    """Map from normalized surface term to the set of cuis it may denote."""

    entries: Mapping[str, frozenset[str]]

    def senses(self, normalized_term: str) -> tuple[str, ...]:
        """Candidate cuis for a term key, sorted; empty when the term is unknown."""
        return tuple(sorted(self.entries.get(normalized_term, ())))

    def __contains__(self, normalized_term: str) -> bool:
        return normalized_term in self.entries

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True, eq=False)
class ConceptVector:
    """A concept's composed representation plus build provenance counts."""

    cui: str
    vector: np.ndarray
    definitions_used: int
    tokens_used: int
    tokens_skipped: int


def load_knowledge_base(
    source, preprocess: PreprocessConfig | None = None
) -> tuple[dict[str, Concept], SenseInventory]:
    """Parse a knowledge-base file into concepts plus the derived inventory.

    Inventory keys are normalized with the same pipeline the corpus module
    applies to document text, so lookups of located terms hit them. A surface
    term shared by k concepts maps to all k cuis.
    """
    if preprocess is None:
        preprocess = PreprocessConfig()
    name, text = _read_text(source)

    concepts: dict[str, Concept] = {}
    record_lines: dict[str, int] = {}
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            raise FormatError("blank record", name, lineno)
        fields = line.split("\t")
        if len(fields) not in (3, 4):
            raise FormatError(
                f"expected 3 or 4 tab-separated fields, found {len(fields)}",
                name,
                lineno,
            )
        cui = fields[0]
        if _CUI_RE.fullmatch(cui) is None:
            raise FormatError(f"invalid cui {cui!r}", name, lineno)
        if cui in concepts:
            raise FormatError(
                f"duplicate cui {cui!r} (first seen at line {record_lines[cui]})",
                name,
                lineno,
            )

        terms = fields[1].split("|") if fields[1] else []
        if not terms or any(not t for t in terms):
            raise FormatError(f"concept {cui!r} has an empty surface term", name, lineno)
        unique_terms = tuple(dict.fromkeys(terms))

        if fields[2]:
            definitions = tuple(fields[2].split("|"))
            if any(not d for d in definitions):
                raise FormatError(f"concept {cui!r} has an empty definition", name, lineno)
        else:
            definitions = ()

        related: dict[str, set[str]] = {}
        if len(fields) == 4 and fields[3]:
            for item in fields[3].split(","):
                kind, sep, rel_cui = item.partition(":")
                if not sep or kind not in RELATION_KINDS or _CUI_RE.fullmatch(rel_cui) is None:
                    raise FormatError(
                        f"malformed relation {item!r}; expected "
                        f"'{{parent|child|sibling}}:CUI'",
                        name,
                        lineno,
                    )
                related.setdefault(kind, set()).add(rel_cui)

        concepts[cui] = Concept(
            cui,
            unique_terms,
            definitions,
            MappingProxyType({k: frozenset(v) for k, v in related.items()}),
        )
        record_lines[cui] = lineno

    for cui, concept in concepts.items():
        for kind, rel_cuis in concept.related.items():
            for rel_cui in sorted(rel_cuis):
                if rel_cui not in concepts:
                    raise FormatError(
                        f"concept {cui!r} references unknown {kind} {rel_cui!r}",
                        name,
                        record_lines[cui],
                    )

    entries: dict[str, set[str]] = {}
    for cui, concept in concepts.items():
        for term in concept.surface_terms:
            key = normalize_term(term, preprocess)
            if not key:
                raise FormatError(
                    f"surface term {term!r} of {cui!r} has no tokens",
                    name,
                    record_lines[cui],
                )
            entries.setdefault(key, set()).add(cui)

    inventory = SenseInventory({k: frozenset(v) for k, v in entries.items()})
    return concepts, inventory


def definition_vector(
    definition: str,
    table: EmbeddingTable,
    f: Composition,
    preprocess: PreprocessConfig,
) -> np.ndarray | None:
    """Compose one definition's in-vocabulary token vectors with f.

    The definition goes through the same tokenizer and stoplist as document
    text. Out-of-vocabulary tokens are skipped, never zero-filled; None when
    no token survives.
    """
    doc = tokenize(definition, preprocess)
    matrix, _ = table.rows(doc.tokens)
    if matrix.shape[0] == 0:
        return None
    return compose(matrix, f)


def build_concept_space(
    kb: Mapping[str, Concept],
    table: EmbeddingTable,
    f: Composition,
    g: Composition,
    expansion: str = EXPANSION_NONE,
    preprocess: PreprocessConfig | None = None,
) -> dict[str, ConceptVector]:
    """Vectorize every concept that has at least one usable definition.

    Each definition becomes a definition vector via f; the survivors are
    composed with g into the concept vector. Under expansion="related" the
    definitions of parent/child/sibling concepts join as peer definitions.
    Concepts whose definitions all fail are omitted from the map and logged,
    never zero-filled. Iteration is by sorted cui, so identical inputs
    rebuild a bitwise-identical map.
    """
    if expansion not in (EXPANSION_NONE, EXPANSION_RELATED):
        raise ValueError(f"unknown expansion {expansion!r}")
    if preprocess is None:
        preprocess = PreprocessConfig()

    space: dict[str, ConceptVector] = {}
    excluded: list[str] = []
    for cui in sorted(kb):
        concept = kb[cui]
        definitions = list(concept.definitions)
        if expansion == EXPANSION_RELATED and concept.related:
            related = sorted(set().union(*concept.related.values()))
            missing = [rc for rc in related if rc not in kb]
            if missing:
                raise ValueError(
                    f"concept {cui!r} references cuis not in the knowledge base: "
                    f"{missing}"
                )
            for rel_cui in related:
                definitions.extend(kb[rel_cui].definitions)

        vectors = []
        tokens_used = 0
        tokens_skipped = 0
        for definition in definitions:
            doc = tokenize(definition, preprocess)
            matrix, skipped = table.rows(doc.tokens)
            tokens_skipped += skipped
            if matrix.shape[0] == 0:
                continue
            tokens_used += matrix.shape[0]
            vectors.append(compose(matrix, f))
        if not vectors:
            excluded.append(cui)
            continue
        space[cui] = ConceptVector(
            cui, compose(vectors, g), len(vectors), tokens_used, tokens_skipped
        )

    if excluded:
        logger.warning(
            "%d concept(s) had no usable definition and were excluded: %s",
            len(excluded),
            ", ".join(excluded),
        )
    if not space:
        raise ValueError(
            "no concept could be vectorized (all definitions empty or out of vocabulary)"
        )
    return space


def _read_text(source):
    if isinstance(source, (str, Path)):
        return str(source), Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return getattr(source, "name", "<stream>"), data
