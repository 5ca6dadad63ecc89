"""Classification metrics for recognition experiments."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    specificity: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvaluationReport:
    labels: tuple[str, ...]
    confusion: Mapping[str, Mapping[str, int]]  # confusion[truth][predicted]
    per_class: Mapping[str, ClassMetrics]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_specificity: float
    macro_f1: float
    micro_f1: float
    extra: Mapping[str, float] = field(default_factory=dict)


def _safe_div(num: float, den: float) -> float:
    return num / den if den else 0.0


def evaluate_predictions(truths: Sequence[str],
                         predictions: Sequence[str]) -> EvaluationReport:
    """Single-label multi-class report. Labels are the union of truth and
    predicted names; with every episode classified, micro precision, recall,
    F1 and accuracy all coincide."""
    if len(truths) != len(predictions):
        raise ValueError("truths and predictions differ in length")
    if not truths:
        raise ValueError("no predictions to evaluate")
    labels = tuple(sorted(set(truths) | set(predictions)))
    confusion: dict[str, dict[str, int]] = {
        t: {p: 0 for p in labels} for t in labels}
    for t, p in zip(truths, predictions):
        confusion[t][p] += 1

    total = len(truths)
    per_class: dict[str, ClassMetrics] = {}
    for label in labels:
        tp = confusion[label][label]
        actual = sum(confusion[label].values())
        predicted = sum(confusion[t][label] for t in labels)
        tn = total - actual - (predicted - tp)
        precision = _safe_div(tp, predicted)
        recall = _safe_div(tp, actual)
        specificity = _safe_div(tn, total - actual)
        f1 = _safe_div(2 * precision * recall, precision + recall)
        per_class[label] = ClassMetrics(precision, recall, specificity,
                                        f1, actual)

    correct = sum(confusion[l][l] for l in labels)
    macro_p = sum(m.precision for m in per_class.values()) / len(labels)
    macro_r = sum(m.recall for m in per_class.values()) / len(labels)
    macro_s = sum(m.specificity for m in per_class.values()) / len(labels)
    macro_f = sum(m.f1 for m in per_class.values()) / len(labels)
    return EvaluationReport(
        labels=labels,
        confusion=confusion,
        per_class=per_class,
        accuracy=correct / total,
        macro_precision=macro_p,
        macro_recall=macro_r,
        macro_specificity=macro_s,
        macro_f1=macro_f,
        micro_f1=correct / total,
    )
