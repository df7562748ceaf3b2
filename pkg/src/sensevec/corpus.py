"""Text preprocessing, term location, context windows, and corpus file IO.

Tokenization rule: a token is a maximal run of alphanumeric characters
(Unicode letters and digits). Underscores, punctuation, and whitespace all
separate tokens and are discarded. Tokens are lowercased when the
configuration says so, then stopwords are removed.

Corpus file format: one instance per line, tab-separated,
``instanceId<TAB>targetTerm<TAB>goldCui<TAB>documentText``. Backslash,
tab, carriage return, and newline inside the text are escaped as ``\\\\``,
``\\t``, ``\\r``, ``\\n``.

Stoplist file format: one token per line, UTF-8; blank lines and lines
starting with ``#`` are ignored; entries are lowercased on load.

Declared-senses sidecar (for constrained candidate sets): one line per term,
``targetTerm<TAB>cui1,cui2,...``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional

from .errors import FormatError

_TOKEN_RE = re.compile(r"[^\W_]+")


@dataclass(frozen=True)
class PreprocessConfig:
    """Stopword list and case policy shared by every text-consuming stage."""

    stoplist: frozenset[str] = frozenset()
    lowercase: bool = True

    def __post_init__(self):
        for entry in self.stoplist:
            if entry != entry.lower() or _TOKEN_RE.fullmatch(entry) is None:
                raise ValueError(
                    f"stoplist entry {entry!r} must be a single lowercase token"
                )


@dataclass(frozen=True)
class TokenizedDocument:
    """Stopword-filtered tokens plus the character span each one came from."""

    tokens: tuple[str, ...]
    offsets: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.tokens)


@dataclass(frozen=True)
class Occurrence:
    """Token index span [start, end) of one match of a target term."""

    start: int
    end: int

    def __post_init__(self):
        if self.start < 0 or self.end <= self.start:
            raise ValueError(f"invalid occurrence span [{self.start}, {self.end})")


@dataclass(frozen=True)
class Instance:
    """One evaluation unit: a document, the ambiguous term, the gold sense."""

    instance_id: str
    term: str
    gold_cui: Optional[str]
    text: str


def tokenize(text: str, cfg: PreprocessConfig) -> TokenizedDocument:
    """Split text into normalized tokens, dropping punctuation and stopwords.

    Offsets point at each surviving token's span in the raw text so callers
    can recover provenance. Empty text yields an empty document.
    """
    tokens: list[str] = []
    offsets: list[tuple[int, int]] = []
    stop = cfg.stoplist
    lower = cfg.lowercase
    for match in _TOKEN_RE.finditer(text):
        token = match.group()
        if lower:
            token = token.lower()
            if token in stop:
                continue
        elif token.lower() in stop:
            continue
        tokens.append(token)
        offsets.append(match.span())
    return TokenizedDocument(tuple(tokens), tuple(offsets))


def term_tokens(term: str, cfg: PreprocessConfig) -> tuple[str, ...]:
    """Tokenize a surface term with the shared pipeline, keeping stopwords."""
    tokens = _TOKEN_RE.findall(term)
    if cfg.lowercase:
        return tuple(t.lower() for t in tokens)
    return tuple(tokens)


def normalize_term(term: str, cfg: PreprocessConfig) -> str:
    """Canonical single-string form of a term, used as an inventory key."""
    return " ".join(term_tokens(term, cfg))


def locate_term(doc: TokenizedDocument, term: str, cfg: PreprocessConfig) -> list[Occurrence]:
    """All non-overlapping left-to-right matches of the term's token sequence.

    The term is tokenized with the shared pipeline but without stopword
    removal; multi-token terms must match contiguously in the filtered token
    stream. A term that yields no tokens matches nowhere.
    """
    if not term:
        raise ValueError("term must be nonempty")
    pattern = term_tokens(term, cfg)
    if not pattern:
        return []
    tokens = doc.tokens
    if len(pattern) == 1:
        want = pattern[0]
        return [Occurrence(i, i + 1) for i, t in enumerate(tokens) if t == want]
    out: list[Occurrence] = []
    i, k, n = 0, len(pattern), len(tokens)
    while i + k <= n:
        if tokens[i : i + k] == pattern:
            out.append(Occurrence(i, i + k))
            i += k
        else:
            i += 1
    return out


def extract_window(doc: TokenizedDocument, occ: Occurrence, w: int) -> list[str]:
    """Up to w tokens before and after the occurrence, never the term itself.

    Truncated at document boundaries; may be empty when the occurrence is the
    whole document.
    """
    if w < 1:
        raise ValueError("window size must be a positive integer")
    tokens = doc.tokens
    if occ.end > len(tokens):
        raise ValueError(
            f"occurrence [{occ.start}, {occ.end}) out of range for a "
            f"{len(tokens)}-token document"
        )
    before = tokens[max(0, occ.start - w) : occ.start]
    after = tokens[occ.end : occ.end + w]
    return list(before + after)


def load_stoplist(source) -> frozenset[str]:
    """Read a stoplist file: one token per line, ``#`` comments allowed."""
    name, text = _read_text(source)
    entries = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        token = line.lower()
        if _TOKEN_RE.fullmatch(token) is None:
            raise FormatError(f"not a single token: {line!r}", name, lineno)
        entries.add(token)
    return frozenset(entries)


def read_corpus(source) -> list[Instance]:
    """Parse a corpus file of tab-separated instance records."""
    name, text = _read_text(source)
    instances: list[Instance] = []
    seen: dict[str, int] = {}
    for lineno, line in _records(name, text):
        fields = line.split("\t")
        if len(fields) != 4:
            raise FormatError(
                f"expected 4 tab-separated fields, found {len(fields)}", name, lineno
            )
        instance_id, term, gold_cui, raw_text = fields
        if not instance_id or not term or not gold_cui:
            raise FormatError(
                "instanceId, targetTerm, and goldCui must be nonempty", name, lineno
            )
        if instance_id in seen:
            raise FormatError(
                f"duplicate instanceId {instance_id!r} "
                f"(first seen at line {seen[instance_id]})",
                name,
                lineno,
            )
        seen[instance_id] = lineno
        instances.append(
            Instance(instance_id, term, gold_cui, _unescape(raw_text, name, lineno))
        )
    return instances


def write_corpus(instances: Iterable[Instance], destination) -> None:
    """Write instances in the corpus file format; the inverse of read_corpus."""
    def emit(stream):
        for inst in instances:
            if inst.gold_cui is None:
                raise ValueError(f"instance {inst.instance_id!r} has no gold cui")
            stream.write(
                f"{inst.instance_id}\t{inst.term}\t{inst.gold_cui}\t"
                f"{_escape(inst.text)}\n"
            )

    if isinstance(destination, (str, Path)):
        with open(destination, "w", encoding="utf-8", newline="\n") as stream:
            emit(stream)
    else:
        emit(destination)


def load_declared_senses(source, cfg: PreprocessConfig) -> dict[str, tuple[str, ...]]:
    """Parse the constrained-mode sidecar mapping each term to its dataset senses.

    Keys are normalized exactly like sense-inventory keys; cui lists come out
    sorted so candidate order is deterministic.
    """
    name, text = _read_text(source)
    declared: dict[str, tuple[str, ...]] = {}
    for lineno, line in _records(name, text):
        fields = line.split("\t")
        if len(fields) != 2:
            raise FormatError(
                f"expected 'term<TAB>cui1,cui2,...', found {len(fields)} fields",
                name,
                lineno,
            )
        term, cui_field = fields
        key = normalize_term(term, cfg)
        if not key:
            raise FormatError(f"term {term!r} has no tokens", name, lineno)
        if key in declared:
            raise FormatError(f"duplicate term {term!r}", name, lineno)
        cuis = cui_field.split(",")
        if not cui_field or any(not c for c in cuis):
            raise FormatError("empty cui in sense list", name, lineno)
        if len(set(cuis)) != len(cuis):
            raise FormatError(f"duplicate cui for term {term!r}", name, lineno)
        declared[key] = tuple(sorted(cuis))
    return declared


def _records(name: str, text: str):
    """Yield (lineno, line) for nonblank lines; blanks allowed only at EOF."""
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            raise FormatError("blank line inside the file", name, lineno)
        yield lineno, line


def _read_text(source) -> tuple[str, str]:
    if isinstance(source, (str, Path)):
        return str(source), Path(source).read_text(encoding="utf-8")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    return getattr(source, "name", "<stream>"), data


def _escape(text: str) -> str:
    return (
        text.replace("\\", "\\\\")
        .replace("\t", "\\t")
        .replace("\r", "\\r")
        .replace("\n", "\\n")
    )


_UNESCAPES = {"\\": "\\", "t": "\t", "r": "\r", "n": "\n"}


def _unescape(text: str, name: str, lineno: int) -> str:
    if "\\" not in text:
        return text
    out: list[str] = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch != "\\":
            out.append(ch)
            i += 1
            continue
        if i + 1 >= len(text):
            raise FormatError("dangling backslash in document text", name, lineno)
        sub = _UNESCAPES.get(text[i + 1])
        if sub is None:
            raise FormatError(
                f"unknown escape '\\{text[i + 1]}' in document text", name, lineno
            )
        out.append(sub)
        i += 2
    return "".join(out)
