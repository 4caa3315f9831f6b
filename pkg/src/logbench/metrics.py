"""Evaluation metrics: group accuracy, message-level accuracy, edit distance.

All three compare canonical template text. A message scores under group
accuracy when the set of messages sharing its predicted template equals the
set sharing its ground-truth template; under message-level accuracy when the
two templates match token for token; edit distance is the mean character-
level Levenshtein distance (lower is better). The ``<REFUSED>`` sentinel
never matches a real template, so refusals count against every metric.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .datasets import Dataset
from .errors import CoverageMismatch


@dataclass(frozen=True)
class Prediction:
    """One predicted template (canonical text, or the refusal sentinel)."""

    line_id: int
    template: str


@dataclass(frozen=True)
class MetricsReport:
    dataset: str
    n: int
    ga: float
    mla: float
    ed: float
    per_message: Optional[tuple] = None


def levenshtein(a: str, b: str) -> int:
    """Character-level minimum edit distance with unit costs."""
    if a == b:
        return 0
    # Shared affixes never contribute to the distance; stripping them keeps
    # the quadratic part small for near-matching templates.
    lo = 0
    hi_a, hi_b = len(a), len(b)
    while lo < hi_a and lo < hi_b and a[lo] == b[lo]:
        lo += 1
    while hi_a > lo and hi_b > lo and a[hi_a - 1] == b[hi_b - 1]:
        hi_a -= 1
        hi_b -= 1
    a, b = a[lo:hi_a], b[lo:hi_b]
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(b) < len(a):
        a, b = b, a
    previous = list(range(len(a) + 1))
    for j, cb in enumerate(b, start=1):
        current = [j]
        for i, ca in enumerate(a, start=1):
            cost = 0 if ca == cb else 1
            current.append(min(previous[i] + 1, current[i - 1] + 1, previous[i - 1] + cost))
        previous = current
    return previous[-1]


def _check_aligned(y_true: Sequence[str], y_pred: Sequence[str]) -> None:
    if len(y_true) != len(y_pred):
        raise CoverageMismatch(
            f"got {len(y_pred)} predictions for {len(y_true)} ground-truth templates"
        )
    if not y_true:
        raise CoverageMismatch("nothing to evaluate")


def _groups(values: Sequence[str]) -> dict[str, frozenset[int]]:
    by_value: dict[str, set[int]] = {}
    for index, value in enumerate(values):
        by_value.setdefault(value, set()).add(index)
    return {value: frozenset(indexes) for value, indexes in by_value.items()}


def group_accuracy(y_true: Sequence[str], y_pred: Sequence[str]) -> float:
    """Fraction of messages grouped exactly as the ground truth groups them."""
    _check_aligned(y_true, y_pred)
    true_groups = _groups(y_true)
    pred_groups = _groups(y_pred)
    correct = sum(
        1
        for i in range(len(y_true))
        if pred_groups[y_pred[i]] == true_groups[y_true[i]]
    )
    return correct / len(y_true)


def message_level_accuracy(y_true: Sequence[str], y_pred: Sequence[str]) -> float:
    """Fraction of messages whose template matches the truth token for token.

    Canonical text equality is exactly token-sequence equality, since
    canonical templates are single-space joins of their tokens.
    """
    _check_aligned(y_true, y_pred)
    correct = sum(1 for t, p in zip(y_true, y_pred) if t == p)
    return correct / len(y_true)


def mean_edit_distance(y_true: Sequence[str], y_pred: Sequence[str]) -> float:
    """Mean per-message Levenshtein distance between templates."""
    _check_aligned(y_true, y_pred)
    return sum(levenshtein(t, p) for t, p in zip(y_true, y_pred)) / len(y_true)


def evaluate(
    dataset: Dataset,
    predictions: Sequence[Prediction],
    keep_per_message: bool = False,
) -> MetricsReport:
    """Score predictions against a dataset on all three metrics.

    Predictions must cover the dataset's line ids exactly once each
    (CoverageMismatch otherwise); input order does not matter.
    """
    by_line = {}
    for pred in predictions:
        if pred.line_id in by_line:
            raise CoverageMismatch(f"duplicate prediction for line_id {pred.line_id}")
        by_line[pred.line_id] = pred.template
    expected = {record.line_id for record in dataset.records}
    if set(by_line) != expected:
        missing = sorted(expected - set(by_line))[:5]
        extra = sorted(set(by_line) - expected)[:5]
        raise CoverageMismatch(
            f"predictions do not cover {dataset.name}: missing {missing}, unexpected {extra}"
        )

    y_true = [record.truth_template.raw for record in dataset.records]
    y_pred = [by_line[record.line_id] for record in dataset.records]
    detail = None
    if keep_per_message:
        detail = tuple(
            (record.line_id, truth, pred, levenshtein(truth, pred))
            for record, truth, pred in zip(dataset.records, y_true, y_pred)
        )
    return MetricsReport(
        dataset=dataset.name,
        n=len(y_true),
        ga=group_accuracy(y_true, y_pred),
        mla=message_level_accuracy(y_true, y_pred),
        ed=mean_edit_distance(y_true, y_pred),
        per_message=detail,
    )
