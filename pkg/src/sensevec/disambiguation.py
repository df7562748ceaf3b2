"""Candidate assembly and cosine nearest-concept selection.

The pipeline per instance: tokenize the document, locate the ambiguous term,
compose each occurrence's context window into an occurrence vector, combine
those into one term vector, then pick the candidate concept whose vector has
the smallest cosine distance. Degenerate inputs produce a typed abstention,
never a guess.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .composition import Composition, compose
from .corpus import (
    Instance,
    Occurrence,
    PreprocessConfig,
    TokenizedDocument,
    extract_window,
    locate_term,
    normalize_term,
    tokenize,
)
from .embeddings import EmbeddingTable
from .knowledge import EXPANSION_NONE, EXPANSION_RELATED, ConceptVector, SenseInventory

MODE_CONSTRAINED = "constrained"
MODE_UNCONSTRAINED = "unconstrained"

STATUS_OK = "ok"
STATUS_ABSTAINED = "abstained"

REASON_TERM_NOT_FOUND = "termNotFound"
REASON_EMPTY_WINDOWS = "emptyWindows"
REASON_NO_CANDIDATES = "noCandidates"
ABSTAIN_REASONS = (REASON_TERM_NOT_FOUND, REASON_EMPTY_WINDOWS, REASON_NO_CANDIDATES)


@dataclass(frozen=True)
class DisambiguationConfig:
    """Pipeline knobs. def_compose also combines context windows and
    concept_compose also combines occurrence vectors, mirroring how concept
    vectors are built so both ends live in a comparable space."""

    window_size: int = 6
    def_compose: Composition = Composition.SUM
    concept_compose: Composition = Composition.AVERAGE
    mode: str = MODE_CONSTRAINED
    expansion: str = EXPANSION_NONE

    def __post_init__(self):
        if self.window_size < 1:
            raise ValueError("window_size must be a positive integer")
        if self.mode not in (MODE_CONSTRAINED, MODE_UNCONSTRAINED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.expansion not in (EXPANSION_NONE, EXPANSION_RELATED):
            raise ValueError(f"unknown expansion {self.expansion!r}")


@dataclass(frozen=True, eq=False)
class TermVector:
    """One document's combined context representation of an ambiguous term."""

    term: str
    document_id: str
    vector: np.ndarray
    occurrence_count: int
    occurrences_skipped: int


@dataclass(frozen=True)
class Prediction:
    """The chosen sense with per-candidate distances, or a typed abstention.

    scores holds every candidate considered; unscorable candidates (concepts
    without a usable vector) map to None and lose to any scored candidate.
    """

    instance_id: str
    term: str
    status: str
    predicted_cui: Optional[str]
    scores: Mapping[str, Optional[float]]
    abstain_reason: Optional[str] = None


def cosine_distance(a, b) -> float:
    """1 minus the cosine of the angle between a and b, in double precision.

    The result is clipped into [0, 2] against last-ulp rounding. Zero-norm
    input is a logic error upstream: composed vectors are excluded before
    scoring, so raising here is deliberate.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        raise ValueError("cosine distance is undefined for zero-norm vectors")
    d = 1.0 - float(np.dot(a, b)) / (norm_a * norm_b)
    if d < 0.0:
        return 0.0
    if d > 2.0:
        return 2.0
    return d


def term_vector(
    doc: TokenizedDocument,
    occurrences: Sequence[Occurrence],
    table: EmbeddingTable,
    cfg: DisambiguationConfig,
    *,
    term: str = "",
    document_id: str = "",
) -> Optional[TermVector]:
    """Compose per-occurrence window vectors into one vector for the document.

    Each occurrence's window tokens are composed with cfg.def_compose; the
    surviving occurrence vectors are composed with cfg.concept_compose.
    Occurrences whose windows keep no in-vocabulary token are skipped and
    counted. None when no occurrence survives.
    """
    if not occurrences:
        raise ValueError("occurrences must be nonempty")
    occurrence_vectors = []
    skipped = 0
    for occ in occurrences:
        window = extract_window(doc, occ, cfg.window_size)
        matrix, _ = table.rows(window)
        if matrix.shape[0] == 0:
            skipped += 1
            continue
        occurrence_vectors.append(compose(matrix, cfg.def_compose))
    if not occurrence_vectors:
        return None
    combined = compose(occurrence_vectors, cfg.concept_compose)
    return TermVector(term, document_id, combined, len(occurrence_vectors), skipped)


def candidates(
    term_key: str,
    inventory: SenseInventory,
    mode: str,
    declared_senses: Mapping[str, Sequence[str]] | None = None,
) -> tuple[str, ...]:
    """Candidate cuis for a normalized term, sorted for deterministic ties.

    Constrained mode reads the senses the corpus sidecar declares for the
    term; unconstrained mode consults the full inventory. An empty result
    tells the caller to abstain with noCandidates.
    """
    if mode == MODE_CONSTRAINED:
        if declared_senses is None:
            raise ValueError("constrained mode requires a declared-senses table")
        return tuple(sorted(declared_senses.get(term_key, ())))
    if mode == MODE_UNCONSTRAINED:
        return inventory.senses(term_key)
    raise ValueError(f"unknown mode {mode!r}")


class Disambiguator:
    """A concept space, embedding table, and configuration bound together.

    All held state is immutable after construction, so instances may be
    disambiguated from any number of threads and the results are equal for
    serial and parallel runs.
    """

    def __init__(
        self,
        space: Mapping[str, ConceptVector],
        table: EmbeddingTable,
        inventory: SenseInventory,
        config: DisambiguationConfig | None = None,
        preprocess: PreprocessConfig | None = None,
        declared_senses: Mapping[str, Sequence[str]] | None = None,
    ):
        config = config if config is not None else DisambiguationConfig()
        preprocess = preprocess if preprocess is not None else PreprocessConfig()
        for cui, cv in space.items():
            if cv.vector.shape != (table.dimension,):
                raise ValueError(
                    f"concept {cui!r} has dimension {cv.vector.shape[0]} but the "
                    f"embedding table has {table.dimension}"
                )
        if config.mode == MODE_CONSTRAINED and declared_senses is None:
            raise ValueError("constrained mode requires a declared-senses table")
        self.space = space
        self.table = table
        self.inventory = inventory
        self.config = config
        self.preprocess = preprocess
        self.declared_senses = declared_senses

    def disambiguate(self, instance: Instance) -> Prediction:
        """Predict the sense of the instance's term, or abstain with a reason."""
        doc = tokenize(instance.text, self.preprocess)
        occurrences = locate_term(doc, instance.term, self.preprocess)
        if not occurrences:
            return self._abstain(instance, REASON_TERM_NOT_FOUND)

        tv = term_vector(
            doc,
            occurrences,
            self.table,
            self.config,
            term=instance.term,
            document_id=instance.instance_id,
        )
        if tv is None:
            return self._abstain(instance, REASON_EMPTY_WINDOWS)

        cands = candidates(
            normalize_term(instance.term, self.preprocess),
            self.inventory,
            self.config.mode,
            self.declared_senses,
        )
        if not cands:
            return self._abstain(instance, REASON_NO_CANDIDATES)

        scores: dict[str, Optional[float]] = {}
        if float(np.linalg.norm(tv.vector)) == 0.0:
            # genuine cancellation (e.g. elementwise product hitting zeros):
            # nothing is scorable against it
            return self._abstain(
                instance, REASON_NO_CANDIDATES, {c: None for c in cands}
            )
        best_cui = None
        best = None
        for cui in cands:
            cv = self.space.get(cui)
            if cv is None or float(np.linalg.norm(cv.vector)) == 0.0:
                scores[cui] = None
                continue
            d = cosine_distance(tv.vector, cv.vector)
            scores[cui] = d
            # candidates iterate in sorted cui order, so a strict < keeps the
            # lexicographically smallest cui on exact ties
            if best is None or d < best:
                best = d
                best_cui = cui
        if best_cui is None:
            return self._abstain(instance, REASON_NO_CANDIDATES, scores)
        return Prediction(
            instance.instance_id, instance.term, STATUS_OK, best_cui, scores
        )

    def disambiguate_text(
        self, text: str, term: str, instance_id: str = "adhoc"
    ) -> Prediction:
        """Disambiguate a single raw document outside any corpus."""
        return self.disambiguate(Instance(instance_id, term, None, text))

    def disambiguate_all(
        self, instances: Sequence[Instance], workers: int = 1
    ) -> list[Prediction]:
        """Disambiguate every instance, optionally across worker threads."""
        if workers < 1:
            raise ValueError("workers must be a positive integer")
        if workers == 1:
            return [self.disambiguate(inst) for inst in instances]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(self.disambiguate, instances))

    def _abstain(self, instance, reason, scores=None) -> Prediction:
        return Prediction(
            instance.instance_id,
            instance.term,
            STATUS_ABSTAINED,
            None,
            scores if scores is not None else {},
            reason,
        )
