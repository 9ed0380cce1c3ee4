"""Evaluation reports: accuracy, per-class P/R/F1, micro and macro averages."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class ClassScores:
    label: str
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass
class EvalReport:
    n_instances: int
    n_correct: int
    per_class: dict = field(default_factory=dict)
    scored_labels: tuple = ()

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_instances if self.n_instances else 0.0

    def _scored(self):
        return [self.per_class[lab] for lab in self.scored_labels]

    @property
    def micro_f1(self) -> float:
        scored = self._scored()
        tp = sum(s.tp for s in scored)
        fp = sum(s.fp for s in scored)
        fn = sum(s.fn for s in scored)
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        return 2 * p * r / (p + r) if p + r else 0.0

    @property
    def macro_f1(self) -> float:
        scored = self._scored()
        return sum(s.f1 for s in scored) / len(scored) if scored else 0.0

    @property
    def macro_precision(self) -> float:
        scored = self._scored()
        return sum(s.precision for s in scored) / len(scored) if scored else 0.0

    @property
    def macro_recall(self) -> float:
        scored = self._scored()
        return sum(s.recall for s in scored) / len(scored) if scored else 0.0

    def to_dict(self) -> dict:
        return {
            "n_instances": self.n_instances,
            "n_correct": self.n_correct,
            "accuracy": self.accuracy,
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "per_class": {
                lab: {
                    "tp": s.tp,
                    "fp": s.fp,
                    "fn": s.fn,
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                }
                for lab, s in sorted(self.per_class.items())
            },
            "scored_labels": list(self.scored_labels),
        }


def _merge_label(label: str) -> str:
    # collapse directed variants like Cause-Effect(e1,e2) onto the bare type
    cut = label.find("(")
    return label[:cut] if cut >= 0 else label


def evaluate(gold, predicted, exclude=(), merge_directions: bool = False) -> EvalReport:
    """Score predictions against gold labels.

    exclude lists labels (such as a catch-all negative class) left out
    of micro and macro averages while still counting toward accuracy.
    merge_directions collapses directional suffixes in parentheses
    before any comparison.
    """
    gold = list(gold)
    predicted = list(predicted)
    if len(gold) != len(predicted):
        raise ValueError(f"{len(gold)} gold labels vs {len(predicted)} predictions")
    if merge_directions:
        gold = [_merge_label(g) for g in gold]
        predicted = [_merge_label(p) for p in predicted]
        exclude = tuple(_merge_label(e) for e in exclude)
    per_class: dict = {}
    for lab in set(gold) | set(predicted):
        per_class[lab] = ClassScores(label=lab)
    n_correct = 0
    for g, p in zip(gold, predicted):
        if g == p:
            n_correct += 1
            per_class[g].tp += 1
        else:
            per_class[p].fp += 1
            per_class[g].fn += 1
    scored = tuple(lab for lab in sorted(per_class) if lab not in set(exclude))
    return EvalReport(
        n_instances=len(gold),
        n_correct=n_correct,
        per_class=per_class,
        scored_labels=scored,
    )


def render_text(report: EvalReport) -> str:
    """Fixed-width summary with percentages at one decimal place."""
    lines = []
    lines.append(f"instances: {report.n_instances}")
    lines.append(f"accuracy:  {100.0 * report.accuracy:.1f}")
    width = max([len("class")] + [len(lab) for lab in report.per_class])
    lines.append(f"{'class'.ljust(width)}  {'P':>6} {'R':>6} {'F1':>6} {'tp':>5} {'fp':>5} {'fn':>5}")
    for lab in sorted(report.per_class):
        s = report.per_class[lab]
        mark = "" if lab in report.scored_labels else "  (not scored)"
        lines.append(
            f"{lab.ljust(width)}  {100.0 * s.precision:6.1f} {100.0 * s.recall:6.1f} "
            f"{100.0 * s.f1:6.1f} {s.tp:5d} {s.fp:5d} {s.fn:5d}{mark}"
        )
    lines.append(
        f"micro-F1: {100.0 * report.micro_f1:.1f}  macro-F1: {100.0 * report.macro_f1:.1f}"
    )
    return "\n".join(lines) + "\n"


def render_json(report: EvalReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, indent=1) + "\n"
