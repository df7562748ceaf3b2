import io
import random

import pytest

from sensevec import (
    FormatError,
    Instance,
    Occurrence,
    PreprocessConfig,
    extract_window,
    load_declared_senses,
    load_stoplist,
    locate_term,
    normalize_term,
    read_corpus,
    tokenize,
    write_corpus,
)

from conftest import DATA_DIR, stop_cfg


def toks(text, cfg):
    return list(tokenize(text, cfg).tokens)


def test_tokenize_drops_punctuation_and_stopwords():
    cfg = stop_cfg("the", "and")
    assert toks("The heart, and lungs.", cfg) == ["heart", "lungs"]


def test_tokenize_empty_text():
    doc = tokenize("", PreprocessConfig())
    assert doc.tokens == ()
    assert doc.offsets == ()


def test_tokenize_underscore_splits():
    assert toks("a_b c-d", PreprocessConfig()) == ["a", "b", "c", "d"]


def test_tokenize_unicode():
    assert toks("Café, naïve друг!", PreprocessConfig()) == ["café", "naïve", "друг"]


def test_tokenize_keeps_digits():
    assert toks("2015AB release", PreprocessConfig()) == ["2015ab", "release"]


def test_tokenize_no_lowercase():
    cfg = PreprocessConfig(stoplist=frozenset(["the"]), lowercase=False)
    # stopword removal stays case-insensitive against the lowercase stoplist
    assert toks("The Heart", cfg) == ["Heart"]


def test_offsets_point_into_raw_text():
    text = "The heart, and lungs."
    doc = tokenize(text, stop_cfg("the", "and"))
    spans = [text[a:b] for a, b in doc.offsets]
    assert spans == ["heart", "lungs"]
    assert list(doc.offsets) == sorted(doc.offsets)
    assert len(doc.offsets) == len(doc.tokens)


def test_golden_paragraph():
    text = (DATA_DIR / "paragraph.txt").read_text(encoding="utf-8")
    expected = (DATA_DIR / "paragraph_tokens.txt").read_text().split()
    cfg = PreprocessConfig(stoplist=load_stoplist(DATA_DIR / "stop_small.txt"))
    assert toks(text, cfg) == expected


def test_tokenize_idempotent_at_token_level():
    cfg = stop_cfg("the")
    for text in [
        "The heart, and lungs.",
        "waste-products; liver_filters 2015AB",
        "a b   c\n\nd",
    ]:
        once = toks(text, cfg)
        again = toks(" ".join(once), cfg)
        assert once == again


def test_stoplist_entry_validation():
    with pytest.raises(ValueError, match="single lowercase token"):
        PreprocessConfig(stoplist=frozenset(["New York"]))
    with pytest.raises(ValueError, match="single lowercase token"):
        PreprocessConfig(stoplist=frozenset(["The"]))


def test_locate_single_token_term():
    doc = tokenize("cold agglutinin cold", PreprocessConfig())
    occs = locate_term(doc, "cold", PreprocessConfig())
    assert [(o.start, o.end) for o in occs] == [(0, 1), (2, 3)]


def test_locate_multi_token_term():
    doc = tokenize("brucella abortus strain", PreprocessConfig())
    occs = locate_term(doc, "brucella abortus", PreprocessConfig())
    assert [(o.start, o.end) for o in occs] == [(0, 2)]


def test_locate_non_overlapping_left_to_right():
    doc = tokenize("a a a", PreprocessConfig())
    occs = locate_term(doc, "a a", PreprocessConfig())
    assert [(o.start, o.end) for o in occs] == [(0, 2)]


def test_locate_case_insensitive_via_lowercasing():
    doc = tokenize("Cold weather", PreprocessConfig())
    assert len(locate_term(doc, "COLD", PreprocessConfig())) == 1


def test_locate_term_with_punctuation_matches_token_form():
    doc = tokenize("non hodgkin lymphoma", PreprocessConfig())
    occs = locate_term(doc, "non-Hodgkin", PreprocessConfig())
    assert [(o.start, o.end) for o in occs] == [(0, 2)]


def test_locate_empty_results():
    doc = tokenize("a b c", PreprocessConfig())
    assert locate_term(doc, "zzz", PreprocessConfig()) == []
    assert locate_term(doc, "%%%", PreprocessConfig()) == []
    with pytest.raises(ValueError, match="nonempty"):
        locate_term(doc, "", PreprocessConfig())


def test_locate_brute_force_equivalence():
    rng = random.Random(7)
    alphabet = ["a", "b", "c"]
    cfg = PreprocessConfig()
    for _ in range(300):
        tokens = [rng.choice(alphabet) for _ in range(rng.randint(0, 12))]
        doc = tokenize(" ".join(tokens), cfg)
        pattern = [rng.choice(alphabet) for _ in range(rng.randint(1, 3))]
        term = " ".join(pattern)
        got = [(o.start, o.end) for o in locate_term(doc, term, cfg)]
        want = []
        i = 0
        while i + len(pattern) <= len(tokens):
            if tokens[i : i + len(pattern)] == pattern:
                want.append((i, i + len(pattern)))
                i += len(pattern)
            else:
                i += 1
        assert got == want


def test_window_simple():
    doc = tokenize("a b TERM c d", PreprocessConfig())
    assert extract_window(doc, Occurrence(2, 3), 1) == ["b", "c"]


def test_window_whole_document_term():
    doc = tokenize("TERM", PreprocessConfig())
    assert extract_window(doc, Occurrence(0, 1), 6) == []


def test_window_middle_of_long_document():
    doc = tokenize(" ".join(f"t{i}" for i in range(20)), PreprocessConfig())
    window = extract_window(doc, Occurrence(10, 11), 6)
    assert len(window) == 12
    assert "t10" not in window
    assert window == [f"t{i}" for i in range(4, 10)] + [f"t{i}" for i in range(11, 17)]


def test_window_validation():
    doc = tokenize("a b", PreprocessConfig())
    with pytest.raises(ValueError, match="positive"):
        extract_window(doc, Occurrence(0, 1), 0)
    with pytest.raises(ValueError, match="out of range"):
        extract_window(doc, Occurrence(1, 5), 2)
    with pytest.raises(ValueError, match="invalid occurrence"):
        Occurrence(2, 2)
    with pytest.raises(ValueError, match="invalid occurrence"):
        Occurrence(-1, 2)


def test_normalize_term():
    cfg = PreprocessConfig()
    assert normalize_term("Brucella  Abortus!", cfg) == "brucella abortus"
    assert normalize_term("%%%", cfg) == ""


def test_load_stoplist():
    stream = io.StringIO("# comment\nthe\n\nAnd\nof\n")
    assert load_stoplist(stream) == frozenset(["the", "and", "of"])


def test_load_stoplist_rejects_multiword():
    with pytest.raises(FormatError) as err:
        load_stoplist(io.StringIO("the\nnew york\n"))
    assert err.value.line == 2


def test_corpus_round_trip(tmp_path):
    instances = [
        Instance("i1", "cold", "C1", "line one\nline two\twith tab"),
        Instance("i2", "heart attack", "C2", "backslash \\n is literal"),
    ]
    path = tmp_path / "corpus.tsv"
    write_corpus(instances, path)
    assert read_corpus(path) == instances
    # the escaped file stays one record per line
    assert len(path.read_text().splitlines()) == 2


def test_corpus_field_count_error():
    with pytest.raises(FormatError) as err:
        read_corpus(io.StringIO("i1\tcold\tC1\n"))
    assert err.value.line == 1


def test_corpus_empty_fields_rejected():
    with pytest.raises(FormatError, match="nonempty"):
        read_corpus(io.StringIO("i1\t\tC1\ttext\n"))


def test_corpus_duplicate_id_rejected():
    data = "i1\tcold\tC1\ttext\ni1\tcold\tC1\ttext\n"
    with pytest.raises(FormatError) as err:
        read_corpus(io.StringIO(data))
    assert err.value.line == 2


def test_corpus_unknown_escape_rejected():
    with pytest.raises(FormatError, match="unknown escape"):
        read_corpus(io.StringIO("i1\tcold\tC1\tbad \\x escape\n"))
    with pytest.raises(FormatError, match="dangling backslash"):
        read_corpus(io.StringIO("i1\tcold\tC1\tbad \\\n"))


def test_declared_senses():
    stream = io.StringIO("Cold\tC2,C1\nheart attack\tC9\n")
    declared = load_declared_senses(stream, PreprocessConfig())
    assert declared == {"cold": ("C1", "C2"), "heart attack": ("C9",)}


def test_declared_senses_errors():
    cfg = PreprocessConfig()
    with pytest.raises(FormatError, match="duplicate term"):
        load_declared_senses(io.StringIO("cold\tC1\nCOLD\tC2\n"), cfg)
    with pytest.raises(FormatError, match="duplicate cui"):
        load_declared_senses(io.StringIO("cold\tC1,C1\n"), cfg)
    with pytest.raises(FormatError, match="empty cui"):
        load_declared_senses(io.StringIO("cold\tC1,\n"), cfg)
    with pytest.raises(FormatError, match="fields"):
        load_declared_senses(io.StringIO("cold\n"), cfg)
