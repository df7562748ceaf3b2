from sensevec import EvaluationReport, TermTally
from sensevec.report import (
    figure_paths,
    format_report,
    render_figures,
    report_lines,
    write_report,
)


def sample_report():
    per_term = {
        "cold": TermTally(8, 10),
        "de": TermTally(3, 10),
        "wt1": TermTally(10, 10),
    }
    abstentions = {"termNotFound": 2, "emptyWindows": 0, "noCandidates": 1}
    return EvaluationReport(per_term, abstentions, 30, 21)


ECHO = {"window": "6", "mode": "constrained"}


def test_report_lines_schema():
    lines = report_lines(sample_report(), ECHO)
    assert lines[0] == "#format\tsensevec-report\t1"
    assert "#config\twindow\t6" in lines
    assert "#config\tmode\tconstrained" in lines
    assert "#overall\tinstances\t30" in lines
    assert "#overall\tcorrect\t21" in lines
    assert "#overall\tabstained\t3" in lines
    assert "#overall\taccuracy\t0.7000" in lines
    macro = (0.8 + 0.3 + 1.0) / 3
    assert f"#overall\tmacro-accuracy\t{macro:.4f}" in lines
    assert "#overall\tterms\t3" in lines
    assert "#abstained\ttermNotFound\t2" in lines
    assert "#abstained\temptyWindows\t0" in lines
    assert "#abstained\tnoCandidates\t1" in lines
    header_index = lines.index("term\tcorrect\ttotal\taccuracy")
    rows = lines[header_index + 1 :]
    assert rows == ["cold\t8\t10\t0.8000", "de\t3\t10\t0.3000", "wt1\t10\t10\t1.0000"]


def test_write_report_byte_identical(tmp_path):
    one = tmp_path / "a.tsv"
    two = tmp_path / "b.tsv"
    write_report(one, sample_report(), ECHO)
    write_report(two, sample_report(), ECHO)
    assert one.read_bytes() == two.read_bytes()
    assert one.read_text().endswith("\n")
    assert not list(tmp_path.glob("*.tmp"))


def test_format_report_human_readable():
    text = format_report(sample_report())
    assert "overall accuracy  0.7000" in text
    assert "cold" in text and "wt1" in text
    assert "termNotFound=2" in text


def test_render_figures(tmp_path):
    report_path = tmp_path / "report.tsv"
    paths = render_figures(sample_report(), report_path)
    assert paths == list(figure_paths(report_path))
    for path in paths:
        assert path.exists()
        assert path.stat().st_size > 0
        assert path.suffix == ".png"
    assert paths[0].name == "report_per_term_accuracy.png"
    assert paths[1].name == "report_outcomes.png"


def test_render_figures_deterministic(tmp_path):
    first = render_figures(sample_report(), tmp_path / "one.tsv")
    second = render_figures(sample_report(), tmp_path / "two.tsv")
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
