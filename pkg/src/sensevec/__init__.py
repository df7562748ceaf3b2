"""Knowledge-based word sense disambiguation from composed word embeddings.

Concept vectors are built by composing pretrained word vectors over sense
definitions; an ambiguous term in a document is represented by composing the
vectors of its context windows; the predicted sense is the concept vector
nearest by cosine distance.
"""

from .composition import Composition, compose
from .corpus import (
    Instance,
    Occurrence,
    PreprocessConfig,
    TokenizedDocument,
    extract_window,
    load_declared_senses,
    load_stoplist,
    locate_term,
    normalize_term,
    read_corpus,
    tokenize,
    write_corpus,
)
from .disambiguation import (
    MODE_CONSTRAINED,
    MODE_UNCONSTRAINED,
    STATUS_ABSTAINED,
    STATUS_OK,
    Disambiguator,
    DisambiguationConfig,
    Prediction,
    TermVector,
    candidates,
    cosine_distance,
    term_vector,
)
from .embeddings import EmbeddingTable, load_embeddings
from .errors import ConfigError, FormatError
from .evaluation import (
    EvaluationReport,
    TermTally,
    count_high_accuracy_terms,
    evaluate,
    worst_terms,
)
from .knowledge import (
    EXPANSION_NONE,
    EXPANSION_RELATED,
    Concept,
    ConceptVector,
    SenseInventory,
    build_concept_space,
    definition_vector,
    load_knowledge_base,
)

__version__ = "0.1.0"

__all__ = [
    "Composition",
    "compose",
    "Instance",
    "Occurrence",
    "PreprocessConfig",
    "TokenizedDocument",
    "extract_window",
    "load_declared_senses",
    "load_stoplist",
    "locate_term",
    "normalize_term",
    "read_corpus",
    "tokenize",
    "write_corpus",
    "MODE_CONSTRAINED",
    "MODE_UNCONSTRAINED",
    "STATUS_ABSTAINED",
    "STATUS_OK",
    "Disambiguator",
    "DisambiguationConfig",
    "Prediction",
    "TermVector",
    "candidates",
    "cosine_distance",
    "term_vector",
    "EmbeddingTable",
    "load_embeddings",
    "ConfigError",
    "FormatError",
    "EvaluationReport",
    "TermTally",
    "count_high_accuracy_terms",
    "evaluate",
    "worst_terms",
    "EXPANSION_NONE",
    "EXPANSION_RELATED",
    "Concept",
    "ConceptVector",
    "SenseInventory",
    "build_concept_space",
    "definition_vector",
    "load_knowledge_base",
    "__version__",
]
