"""Accuracy scoring of predictions against gold labels."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .disambiguation import ABSTAIN_REASONS, STATUS_ABSTAINED, STATUS_OK, Prediction


@dataclass(frozen=True)
class TermTally:
    correct: int
    total: int

    @property
    def accuracy(self) -> float:
        return self.correct / self.total


@dataclass(frozen=True)
class EvaluationReport:
    """Aggregated accuracy with a per-term breakdown.

    Abstentions count as incorrect (comparable to systems that always answer)
    but are reported separately by reason. overall_accuracy is micro-averaged
    over instances; macro_accuracy weights each term equally.
    """

    per_term: Mapping[str, TermTally]
    abstentions: Mapping[str, int]
    instances_evaluated: int
    correct: int

    @property
    def overall_accuracy(self) -> float:
        if self.instances_evaluated == 0:
            return 0.0
        return self.correct / self.instances_evaluated

    @property
    def macro_accuracy(self) -> float:
        if not self.per_term:
            return 0.0
        return sum(t.accuracy for t in self.per_term.values()) / len(self.per_term)

    @property
    def abstained(self) -> int:
        return sum(self.abstentions.values())


def evaluate(
    predictions: Sequence[Prediction], gold: Mapping[str, str]
) -> EvaluationReport:
    """Score predictions; a prediction is correct iff it answered with the gold cui.

    Every prediction's instanceId must appear in gold, and no instanceId may
    repeat. Accuracies are exact count ratios.
    """
    seen: set[str] = set()
    tallies: dict[str, list[int]] = {}
    abstentions = {reason: 0 for reason in ABSTAIN_REASONS}
    correct = 0
    for pred in predictions:
        if pred.instance_id in seen:
            raise ValueError(f"duplicate instanceId {pred.instance_id!r}")
        seen.add(pred.instance_id)
        if pred.instance_id not in gold:
            raise ValueError(f"unknown instanceId {pred.instance_id!r}: not in gold")
        if pred.status == STATUS_OK:
            hit = pred.predicted_cui == gold[pred.instance_id]
        elif pred.status == STATUS_ABSTAINED:
            if pred.abstain_reason not in abstentions:
                raise ValueError(f"unknown abstain reason {pred.abstain_reason!r}")
            abstentions[pred.abstain_reason] += 1
            hit = False
        else:
            raise ValueError(f"unknown prediction status {pred.status!r}")
        tally = tallies.setdefault(pred.term, [0, 0])
        tally[0] += int(hit)
        tally[1] += 1
        correct += int(hit)

    per_term = {term: TermTally(c, t) for term, (c, t) in sorted(tallies.items())}
    return EvaluationReport(per_term, abstentions, len(seen), correct)


def worst_terms(report: EvaluationReport, k: int) -> list[tuple[str, float]]:
    """The k lowest-accuracy terms, ascending; ties broken by term string.

    k larger than the term count returns every term.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if not report.per_term:
        raise ValueError("report has no terms")
    ranked = sorted(report.per_term.items(), key=lambda kv: (kv[1].accuracy, kv[0]))
    return [(term, tally.accuracy) for term, tally in ranked[:k]]


def count_high_accuracy_terms(report: EvaluationReport, threshold: float) -> int:
    """Number of terms whose accuracy is strictly greater than threshold."""
    if not 0.0 <= threshold <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    return sum(1 for tally in report.per_term.values() if tally.accuracy > threshold)
