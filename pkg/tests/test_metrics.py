"""Evaluation reports: counts, averages, exclusions, rendering."""

import json

import pytest

from udkernels.metrics import ClassScores, evaluate, render_json, render_text

GOLD = ["a", "a", "b", "b", "b", "c"]
PRED = ["a", "b", "b", "b", "c", "c"]


def test_class_scores_definitions():
    s = ClassScores(label="x", tp=3, fp=1, fn=2)
    assert s.precision == pytest.approx(3 / 4)
    assert s.recall == pytest.approx(3 / 5)
    assert s.f1 == pytest.approx(2 * (3 / 4) * (3 / 5) / (3 / 4 + 3 / 5))
    empty = ClassScores(label="y")
    assert empty.precision == 0.0
    assert empty.recall == 0.0
    assert empty.f1 == 0.0


def test_evaluate_counts():
    report = evaluate(GOLD, PRED)
    assert report.n_instances == 6
    assert report.n_correct == 4
    assert report.accuracy == pytest.approx(4 / 6)
    a, b, c = (report.per_class[k] for k in "abc")
    assert (a.tp, a.fp, a.fn) == (1, 0, 1)
    assert (b.tp, b.fp, b.fn) == (2, 1, 1)
    assert (c.tp, c.fp, c.fn) == (1, 1, 0)


def test_micro_f1_equals_accuracy_when_all_labels_scored():
    # single-label classification with nothing excluded: summed fp and
    # fn are both (n - correct), so micro P = R = F1 = accuracy
    report = evaluate(GOLD, PRED)
    assert report.scored_labels == ("a", "b", "c")
    assert report.micro_f1 == pytest.approx(report.accuracy)


def test_macro_averages():
    report = evaluate(GOLD, PRED)
    scores = [report.per_class[k] for k in "abc"]
    assert report.macro_f1 == pytest.approx(sum(s.f1 for s in scores) / 3)
    assert report.macro_precision == pytest.approx(sum(s.precision for s in scores) / 3)
    assert report.macro_recall == pytest.approx(sum(s.recall for s in scores) / 3)


def test_exclude_drops_from_averages_not_accuracy():
    gold = ["Other", "Other", "rel", "rel"]
    pred = ["Other", "rel", "rel", "Other"]
    report = evaluate(gold, pred, exclude=("Other",))
    assert report.accuracy == pytest.approx(0.5)
    assert report.scored_labels == ("rel",)
    # rel: tp=1 fp=1 fn=1 -> P = R = F1 = 0.5
    assert report.micro_f1 == pytest.approx(0.5)
    assert report.macro_f1 == pytest.approx(0.5)
    # the excluded class still gets counted cells
    assert report.per_class["Other"].fp == 1


def test_merge_directions_collapses_parenthesized_suffixes():
    gold = ["Cause-Effect(e1,e2)", "Cause-Effect(e2,e1)", "Other"]
    pred = ["Cause-Effect(e2,e1)", "Cause-Effect(e1,e2)", "Other"]
    plain = evaluate(gold, pred)
    merged = evaluate(gold, pred, merge_directions=True)
    assert plain.accuracy == pytest.approx(1 / 3)
    assert merged.accuracy == pytest.approx(1.0)
    assert set(merged.per_class) == {"Cause-Effect", "Other"}


def test_merge_directions_applies_to_exclude():
    gold = ["rel(e1,e2)", "skip(e1,e2)"]
    pred = ["rel(e1,e2)", "skip(e1,e2)"]
    report = evaluate(gold, pred, exclude=("skip(e2,e1)",), merge_directions=True)
    assert report.scored_labels == ("rel",)


def test_length_mismatch():
    with pytest.raises(ValueError, match="2 gold"):
        evaluate(["a", "b"], ["a"])


def test_render_text_layout():
    text = render_text(evaluate(GOLD, PRED, exclude=("c",)))
    lines = text.splitlines()
    assert lines[0] == "instances: 6"
    assert lines[1] == "accuracy:  66.7"
    assert any(line.startswith("a") and "100.0" in line for line in lines)
    assert any("(not scored)" in line for line in lines if line.startswith("c"))
    assert text.endswith("\n")
    assert "micro-F1:" in lines[-1] and "macro-F1:" in lines[-1]


def test_render_json_roundtrip():
    report = evaluate(GOLD, PRED, exclude=("c",))
    data = json.loads(render_json(report))
    assert data["n_instances"] == 6
    assert data["accuracy"] == pytest.approx(4 / 6)
    assert data["scored_labels"] == ["a", "b"]
    assert data["per_class"]["b"]["tp"] == 2
    assert data["per_class"]["b"]["f1"] == pytest.approx(report.per_class["b"].f1)


def test_empty_input():
    report = evaluate([], [])
    assert report.accuracy == 0.0
    assert report.micro_f1 == 0.0
    assert report.macro_f1 == 0.0
