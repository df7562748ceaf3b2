import random

import pytest

from sensevec import (
    EvaluationReport,
    Prediction,
    TermTally,
    count_high_accuracy_terms,
    evaluate,
    worst_terms,
)


def ok(instance_id, term, cui, scores=None):
    return Prediction(instance_id, term, "ok", cui, scores or {cui: 0.1})


def abstained(instance_id, term, reason):
    return Prediction(instance_id, term, "abstained", None, {}, reason)


def test_two_of_three_correct():
    gold = {"i1": "C1", "i2": "C1", "i3": "C2"}
    preds = [ok("i1", "t", "C1"), ok("i2", "t", "C1"), ok("i3", "t", "C9")]
    report = evaluate(preds, gold)
    assert report.instances_evaluated == 3
    assert report.correct == 2
    assert f"{report.overall_accuracy:.4f}" == "0.6667"


def test_all_abstained_scores_zero():
    gold = {"i1": "C1", "i2": "C1"}
    preds = [
        abstained("i1", "t", "termNotFound"),
        abstained("i2", "t", "noCandidates"),
    ]
    report = evaluate(preds, gold)
    assert report.overall_accuracy == 0.0
    assert report.abstentions == {
        "termNotFound": 1,
        "emptyWindows": 0,
        "noCandidates": 1,
    }
    assert report.abstained == 2


def test_hand_tallied_mixed_fixture():
    # 10 instances over 3 terms, tallied by hand:
    #   cold: 3 correct of 4; de: 1 of 3 (one abstention); wt1: 0 of 3
    gold = {f"i{k}": "G" for k in range(10)}
    preds = [
        ok("i0", "cold", "G"),
        ok("i1", "cold", "G"),
        ok("i2", "cold", "G"),
        ok("i3", "cold", "X"),
        ok("i4", "de", "G"),
        ok("i5", "de", "X"),
        abstained("i6", "de", "emptyWindows"),
        ok("i7", "wt1", "X"),
        ok("i8", "wt1", "X"),
        abstained("i9", "wt1", "termNotFound"),
    ]
    report = evaluate(preds, gold)
    assert report.per_term == {
        "cold": TermTally(3, 4),
        "de": TermTally(1, 3),
        "wt1": TermTally(0, 3),
    }
    assert report.correct == 4
    assert report.instances_evaluated == 10
    assert f"{report.overall_accuracy:.4f}" == "0.4000"
    expected_macro = (3 / 4 + 1 / 3 + 0 / 3) / 3
    assert report.macro_accuracy == pytest.approx(expected_macro)
    assert report.abstentions["emptyWindows"] == 1
    assert report.abstentions["termNotFound"] == 1
    assert sum(t.total for t in report.per_term.values()) == 10


def test_order_invariance():
    gold = {f"i{k}": "C1" for k in range(6)}
    preds = [ok(f"i{k}", f"t{k % 2}", "C1" if k % 3 else "C9") for k in range(6)]
    forward = evaluate(preds, gold)
    rng = random.Random(3)
    shuffled = preds[:]
    rng.shuffle(shuffled)
    assert evaluate(shuffled, gold) == forward


def test_unknown_and_duplicate_ids_rejected():
    gold = {"i1": "C1"}
    with pytest.raises(ValueError, match="unknown instanceId"):
        evaluate([ok("i9", "t", "C1")], gold)
    with pytest.raises(ValueError, match="duplicate instanceId"):
        evaluate([ok("i1", "t", "C1"), ok("i1", "t", "C1")], gold)


def test_bad_status_and_reason_rejected():
    gold = {"i1": "C1"}
    with pytest.raises(ValueError, match="unknown abstain reason"):
        evaluate([abstained("i1", "t", "tired")], gold)
    with pytest.raises(ValueError, match="unknown prediction status"):
        evaluate([Prediction("i1", "t", "maybe", None, {})], gold)


def table3_like_report():
    # per-term accuracies mirror a worst-terms table: 0.31, 0.40, 0.46, 0.46,
    # 0.47, then a crowd of strong terms
    per_term = {
        "de": TermTally(31, 100),
        "hemlock": TermTally(40, 100),
        "brucella abortus": TermTally(46, 100),
        "wt1": TermTally(46, 100),
        "murine sarcoma virus": TermTally(47, 100),
        "strong1": TermTally(91, 100),
        "strong2": TermTally(95, 100),
        "perfect": TermTally(10, 10),
        "borderline": TermTally(90, 100),
    }
    total = sum(t.total for t in per_term.values())
    correct = sum(t.correct for t in per_term.values())
    abstentions = {"termNotFound": 0, "emptyWindows": 0, "noCandidates": 0}
    return EvaluationReport(per_term, abstentions, total, correct)


def test_worst_terms_ordering():
    report = table3_like_report()
    assert worst_terms(report, 2) == [("de", 0.31), ("hemlock", 0.40)]
    top5 = worst_terms(report, 5)
    assert [t for t, _ in top5] == [
        "de",
        "hemlock",
        "brucella abortus",  # 0.46 tie broken by term string
        "wt1",
        "murine sarcoma virus",
    ]
    assert worst_terms(report, 1) == [("de", 0.31)]


def test_worst_terms_k_beyond_term_count_returns_all():
    report = table3_like_report()
    everything = worst_terms(report, 999)
    assert len(everything) == len(report.per_term)
    assert sorted(t for t, _ in everything) == sorted(report.per_term)
    accuracies = [a for _, a in everything]
    assert accuracies == sorted(accuracies)


def test_worst_terms_validation():
    report = table3_like_report()
    with pytest.raises(ValueError, match="positive"):
        worst_terms(report, 0)
    empty = EvaluationReport({}, {}, 0, 0)
    with pytest.raises(ValueError, match="no terms"):
        worst_terms(empty, 1)


def test_count_high_accuracy_terms():
    report = table3_like_report()
    # hand count: strictly above 0.9 are strong1 (0.91), strong2 (0.95),
    # perfect (1.0); borderline sits exactly at 0.9 and is excluded
    assert count_high_accuracy_terms(report, 0.9) == 3
    assert count_high_accuracy_terms(report, 1.0) == 0
    assert count_high_accuracy_terms(report, 0.0) == len(report.per_term)
    with pytest.raises(ValueError, match="threshold"):
        count_high_accuracy_terms(report, 1.5)
