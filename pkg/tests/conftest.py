from pathlib import Path

import numpy as np
import pytest

from sensevec import EmbeddingTable, PreprocessConfig

DATA_DIR = Path(__file__).parent / "data"


def make_table(entries):
    """EmbeddingTable from a {token: values} mapping, in mapping order."""
    tokens = list(entries)
    matrix = np.array([entries[t] for t in tokens], dtype=np.float64)
    return EmbeddingTable(tokens, matrix)


def stop_cfg(*words):
    return PreprocessConfig(stoplist=frozenset(words))


@pytest.fixture
def golden_table():
    from sensevec import load_embeddings

    return load_embeddings(DATA_DIR / "golden_embeddings.txt")
