"""Evaluation report rendering: delimited report file, stdout table, figures.

Report file layout (UTF-8, LF newlines, tab-delimited):

    #format<TAB>sensevec-report<TAB>1
    #config<TAB><key><TAB><value>      one line per effective-config entry
    #overall<TAB>instances<TAB><n>
    #overall<TAB>correct<TAB><n>
    #overall<TAB>abstained<TAB><n>
    #overall<TAB>accuracy<TAB><0.dddd>
    #overall<TAB>macro-accuracy<TAB><0.dddd>
    #overall<TAB>terms<TAB><n>
    #abstained<TAB><reason><TAB><n>    one line per abstention reason
    term<TAB>correct<TAB>total<TAB>accuracy
    <term><TAB><n><TAB><n><TAB><0.dddd>   rows sorted by term

Accuracies are printed to 4 decimal places. The file carries no timestamps,
so identical runs write identical bytes. When figures are enabled, two PNG
charts land next to the report: ``<stem>_per_term_accuracy.png`` and
``<stem>_outcomes.png``.
"""

from __future__ import annotations

import os
import tempfile
from pathlib import Path
from typing import Mapping

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .disambiguation import ABSTAIN_REASONS
from .evaluation import EvaluationReport

REPORT_FORMAT_NAME = "sensevec-report"
REPORT_FORMAT_VERSION = "1"

# cap for the per-term chart so a large sense inventory stays readable
MAX_TERMS_PLOTTED = 40


def report_lines(report: EvaluationReport, config_echo: Mapping[str, str]) -> list[str]:
    """The report file content as a list of lines, without newlines."""
    lines = [f"#format\t{REPORT_FORMAT_NAME}\t{REPORT_FORMAT_VERSION}"]
    for key, value in config_echo.items():
        lines.append(f"#config\t{key}\t{value}")
    lines.append(f"#overall\tinstances\t{report.instances_evaluated}")
    lines.append(f"#overall\tcorrect\t{report.correct}")
    lines.append(f"#overall\tabstained\t{report.abstained}")
    lines.append(f"#overall\taccuracy\t{report.overall_accuracy:.4f}")
    lines.append(f"#overall\tmacro-accuracy\t{report.macro_accuracy:.4f}")
    lines.append(f"#overall\tterms\t{len(report.per_term)}")
    for reason in ABSTAIN_REASONS:
        lines.append(f"#abstained\t{reason}\t{report.abstentions.get(reason, 0)}")
    lines.append("term\tcorrect\ttotal\taccuracy")
    for term in sorted(report.per_term):
        tally = report.per_term[term]
        lines.append(f"{term}\t{tally.correct}\t{tally.total}\t{tally.accuracy:.4f}")
    return lines


def write_report(path, report: EvaluationReport, config_echo: Mapping[str, str]) -> None:
    """Write the delimited report atomically; no partial file on failure."""
    path = Path(path)
    content = "\n".join(report_lines(report, config_echo)) + "\n"
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(content)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def format_report(report: EvaluationReport) -> str:
    """Human-readable summary table for standard output."""
    reasons = ", ".join(
        f"{r}={report.abstentions.get(r, 0)}" for r in ABSTAIN_REASONS
    )
    out = [
        f"instances         {report.instances_evaluated}",
        f"correct           {report.correct}",
        f"overall accuracy  {report.overall_accuracy:.4f}",
        f"macro accuracy    {report.macro_accuracy:.4f}",
        f"abstained         {report.abstained}  ({reasons})",
        "",
    ]
    if report.per_term:
        width = max(len("term"), max(len(t) for t in report.per_term))
        out.append(f"{'term':<{width}}  correct  total  accuracy")
        for term in sorted(report.per_term):
            tally = report.per_term[term]
            out.append(
                f"{term:<{width}}  {tally.correct:>7}  {tally.total:>5}  "
                f"{tally.accuracy:>8.4f}"
            )
    return "\n".join(out)


def figure_paths(report_path) -> tuple[Path, Path]:
    """Where render_figures puts its charts for a given report path."""
    path = Path(report_path)
    stem = path.parent / path.stem
    return (
        Path(f"{stem}_per_term_accuracy.png"),
        Path(f"{stem}_outcomes.png"),
    )


def render_figures(report: EvaluationReport, report_path) -> list[Path]:
    """Render accuracy charts next to the report file; returns the paths."""
    per_term_path, outcomes_path = figure_paths(report_path)
    _render_per_term(report, per_term_path)
    _render_outcomes(report, outcomes_path)
    return [per_term_path, outcomes_path]


def _render_per_term(report: EvaluationReport, path: Path) -> None:
    ranked = sorted(report.per_term.items(), key=lambda kv: (kv[1].accuracy, kv[0]))
    shown = ranked[:MAX_TERMS_PLOTTED]
    terms = [term for term, _ in shown]
    accuracies = [tally.accuracy for _, tally in shown]

    height = max(2.5, 0.3 * len(terms) + 1.4)
    fig, ax = plt.subplots(figsize=(7.5, height))
    ax.barh(range(len(terms)), accuracies, color="#4878a8")
    ax.set_yticks(range(len(terms)))
    ax.set_yticklabels(terms, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlim(0.0, 1.0)
    ax.set_xlabel("accuracy")
    ax.axvline(
        report.overall_accuracy,
        color="#a83232",
        linestyle="--",
        linewidth=1,
        label=f"overall {report.overall_accuracy:.4f}",
    )
    title = "Per-term accuracy (worst first)"
    if len(ranked) > len(shown):
        title += f", lowest {len(shown)} of {len(ranked)} terms"
    ax.set_title(title, fontsize=10)
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _render_outcomes(report: EvaluationReport, path: Path) -> None:
    wrong = report.instances_evaluated - report.correct - report.abstained
    labels = ["correct", "wrong"] + [f"abstained:\n{r}" for r in ABSTAIN_REASONS]
    counts = [report.correct, wrong] + [
        report.abstentions.get(r, 0) for r in ABSTAIN_REASONS
    ]
    colors = ["#4a8c5c", "#a83232", "#c8a048", "#c8a048", "#c8a048"]

    fig, ax = plt.subplots(figsize=(6.5, 3.5))
    bars = ax.bar(range(len(labels)), counts, color=colors)
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels, fontsize=8)
    ax.set_ylabel("instances")
    ax.set_title("Prediction outcomes", fontsize=10)
    for bar, count in zip(bars, counts):
        ax.annotate(
            str(count),
            (bar.get_x() + bar.get_width() / 2, bar.get_height()),
            ha="center",
            va="bottom",
            fontsize=8,
        )
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
