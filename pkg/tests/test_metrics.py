"""Metric correctness against independent brute-force oracles."""

from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logbench import (
    REFUSED,
    Prediction,
    evaluate,
    group_accuracy,
    levenshtein,
    mean_edit_distance,
    message_level_accuracy,
)
from logbench.datasets import Dataset
from logbench.errors import CoverageMismatch
from logbench.templates import LogRecord, Template


# -- independent oracles ------------------------------------------------------

def dp_levenshtein(a: str, b: str) -> int:
    """Textbook full-matrix dynamic program."""
    m, n = len(a), len(b)
    d = [[0] * (n + 1) for _ in range(m + 1)]
    for i in range(m + 1):
        d[i][0] = i
    for j in range(n + 1):
        d[0][j] = j
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            cost = 0 if a[i - 1] == b[j - 1] else 1
            d[i][j] = min(d[i - 1][j] + 1, d[i][j - 1] + 1, d[i - 1][j - 1] + cost)
    return d[m][n]


def brute_group_accuracy(y_true, y_pred) -> float:
    """Per-message partition check by explicit enumeration (no hashing)."""
    n = len(y_true)
    correct = 0
    for i in range(n):
        pred_set = frozenset(j for j in range(n) if y_pred[j] == y_pred[i])
        true_set = frozenset(j for j in range(n) if y_true[j] == y_true[i])
        if pred_set == true_set:
            correct += 1
    return correct / n


def brute_mla(y_true, y_pred) -> float:
    correct = 0
    for t, p in zip(y_true, y_pred):
        t_tokens, p_tokens = t.split(), p.split()
        correct += int(len(t_tokens) == len(p_tokens) and all(
            a == b for a, b in zip(t_tokens, p_tokens)
        ))
    return correct / len(y_true)


def brute_mean_ed(y_true, y_pred) -> float:
    return sum(dp_levenshtein(t, p) for t, p in zip(y_true, y_pred)) / len(y_true)


# -- hand-constructed fixtures with frozen expected values --------------------
# (id, y_true, y_pred, ga, mla, ed)

FIXTURES = [
    ("perfect_pair",
     ["Hello <*>", "Hello <*>"],
     ["Hello <*>", "Hello <*>"],
     1.0, 1.0, 0.0),
    ("split_one_truth_group",
     ["Hello <*>", "Hello <*>", "send <*> bytes", "send <*> bytes"],
     ["Hello world", "Hello mars", "send <*> bytes", "send <*> bytes"],
     0.5, 0.5, 2.25),  # distances 5, 4, 0, 0
    ("everything_merged",
     ["Hello <*>", "Hello <*>", "send <*> bytes", "send <*> bytes"],
     ["one group", "one group", "one group", "one group"],
     0.0, 0.0, 10.5),  # distances 9, 9, 12, 12
    ("single_message_wrong_text",
     ["kitten"],
     ["sitting"],
     1.0, 0.0, 3.0),  # a lone message always groups correctly
    ("token_truncation",
     ["send <*> bytes", "send <*> bytes"],
     ["send <*> bytes", "send <*> byte"],
     0.0, 0.5, 0.5),  # truth group {0,1}; predicted {0} and {1}
    ("distances_zero_and_three",
     ["abc", "abc"],
     ["abc", "abcxyz"],
     0.0, 0.5, 1.5),
    ("refusal_sentinel",
     ["session opened for user <*> by (uid=<*>)", "Worker <*> heartbeat ok"],
     [REFUSED, "Worker <*> heartbeat ok"],
     1.0, 0.5, 19.0),  # distances 38, 0; singletons still group correctly
    ("partition_preserving_rename",
     ["A x", "A x", "B y"],
     ["Q q q", "Q q q", "R r"],
     1.0, 0.0, 10 / 3),  # distances 4, 4, 2
    ("swapped_group_names",
     ["A x", "A x", "B y", "B y"],
     ["B y", "B y", "A x", "A x"],
     1.0, 0.0, 2.0),
    ("all_singletons",
     ["a 1", "b 2", "c 3"],
     ["x", "y", "z"],
     1.0, 0.0, 3.0),
    ("mixed_six_messages",
     ["A x", "A x", "B y y", "B y y", "C z", "D w"],
     ["A x", "A q", "B y y", "B y y", "C z", "C z"],
     1 / 3, 2 / 3, 0.5),
]


@pytest.mark.parametrize("name,y_true,y_pred,ga,mla,ed", FIXTURES,
                         ids=[f[0] for f in FIXTURES])
def test_fixture_matches_frozen_and_oracle(name, y_true, y_pred, ga, mla, ed):
    assert group_accuracy(y_true, y_pred) == pytest.approx(ga)
    assert message_level_accuracy(y_true, y_pred) == pytest.approx(mla)
    assert mean_edit_distance(y_true, y_pred) == pytest.approx(ed)
    assert group_accuracy(y_true, y_pred) == pytest.approx(brute_group_accuracy(y_true, y_pred))
    assert message_level_accuracy(y_true, y_pred) == pytest.approx(brute_mla(y_true, y_pred))
    assert mean_edit_distance(y_true, y_pred) == pytest.approx(brute_mean_ed(y_true, y_pred))


@pytest.mark.parametrize("a,b,expected", [
    ("", "", 0),
    ("kitten", "sitting", 3),
    ("abc", "", 3),
    ("", "abc", 3),
    ("abc", "abc", 0),
    ("a", "b", 1),
    ("flaw", "lawn", 2),
    ("Hello <*>", "Hello world", 5),
    ("Putting block <*> with replication took <*>", "Putting block <*> with replication took", 4),
])
def test_levenshtein_known_values(a, b, expected):
    assert levenshtein(a, b) == expected
    assert dp_levenshtein(a, b) == expected


@given(st.text(max_size=32), st.text(max_size=32))
@settings(max_examples=200)
def test_levenshtein_matches_textbook_dp(a, b):
    assert levenshtein(a, b) == dp_levenshtein(a, b)


@given(st.text(max_size=24), st.text(max_size=24), st.text(max_size=24))
@settings(max_examples=150)
def test_levenshtein_is_a_metric(a, b, c):
    assert levenshtein(a, b) == levenshtein(b, a)
    assert (levenshtein(a, b) == 0) == (a == b)
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


_template_texts = st.lists(
    st.sampled_from(["A x", "B y", "C z z", "D", "E <*>", "F <*> q"]),
    min_size=1, max_size=12,
)


@given(_template_texts, st.randoms())
@settings(max_examples=100)
def test_metrics_order_insensitive(y_true, rnd):
    y_pred = [rnd.choice(["A x", "B y", "C z z", "E <*>"]) for _ in y_true]
    order = list(range(len(y_true)))
    rnd.shuffle(order)
    shuffled_true = [y_true[i] for i in order]
    shuffled_pred = [y_pred[i] for i in order]
    assert group_accuracy(shuffled_true, shuffled_pred) == pytest.approx(
        group_accuracy(y_true, y_pred))
    assert message_level_accuracy(shuffled_true, shuffled_pred) == pytest.approx(
        message_level_accuracy(y_true, y_pred))
    assert mean_edit_distance(shuffled_true, shuffled_pred) == pytest.approx(
        mean_edit_distance(y_true, y_pred))


@given(_template_texts)
@settings(max_examples=100)
def test_group_accuracy_invariant_under_renaming(y_true):
    rng = random.Random(42)
    y_pred = [rng.choice(["A x", "B y", "C z z"]) for _ in y_true]
    renamed = {value: f"tpl#{i}" for i, value in enumerate(dict.fromkeys(y_pred))}
    assert group_accuracy(y_true, [renamed[v] for v in y_pred]) == pytest.approx(
        group_accuracy(y_true, y_pred))


@given(_template_texts)
@settings(max_examples=100)
def test_perfect_mla_implies_perfect_ga_and_zero_ed(y_true):
    y_pred = list(y_true)
    assert message_level_accuracy(y_true, y_pred) == 1.0
    assert mean_edit_distance(y_true, y_pred) == 0.0
    assert group_accuracy(y_true, y_pred) == 1.0


# -- evaluate() over datasets --------------------------------------------------

def _dataset(truths: list[str]) -> Dataset:
    records = tuple(
        LogRecord(line_id=i, content=f"msg {i}", truth_template=Template.from_text(t))
        for i, t in enumerate(truths, start=1)
    )
    index: dict[str, set[int]] = {}
    for rec in records:
        index.setdefault(rec.truth_template.raw, set()).add(rec.line_id)
    return Dataset("fixture", records, {k: frozenset(v) for k, v in index.items()})


def test_evaluate_happy_path():
    ds = _dataset(["A x", "A x", "B y"])
    preds = [Prediction(1, "A x"), Prediction(2, "A x"), Prediction(3, "B y")]
    report = evaluate(ds, preds)
    assert (report.ga, report.mla, report.ed) == (1.0, 1.0, 0.0)
    assert report.n == 3
    assert report.dataset == "fixture"


def test_evaluate_is_input_order_insensitive():
    ds = _dataset(["A x", "B y"])
    forward = evaluate(ds, [Prediction(1, "A x"), Prediction(2, "B z")])
    backward = evaluate(ds, [Prediction(2, "B z"), Prediction(1, "A x")])
    assert forward == backward


def test_evaluate_rejects_missing_and_duplicate_coverage():
    ds = _dataset(["A x", "B y"])
    with pytest.raises(CoverageMismatch):
        evaluate(ds, [Prediction(1, "A x")])
    with pytest.raises(CoverageMismatch):
        evaluate(ds, [Prediction(1, "A x"), Prediction(1, "B y")])
    with pytest.raises(CoverageMismatch):
        evaluate(ds, [Prediction(1, "A x"), Prediction(2, "B y"), Prediction(3, "C")])


def test_refused_sentinel_scores_zero_on_its_message():
    ds = _dataset(["A x", "A x"])
    report = evaluate(ds, [Prediction(1, "A x"), Prediction(2, REFUSED)])
    assert report.mla == 0.5
    assert report.ga == 0.0  # the surviving singleton no longer matches {1, 2}
    assert report.ed > 0


def test_empty_inputs_rejected():
    with pytest.raises(CoverageMismatch):
        group_accuracy([], [])
    with pytest.raises(CoverageMismatch):
        mean_edit_distance(["a"], [])


def test_evaluate_per_message_detail():
    ds = _dataset(["A x", "B y"])
    report = evaluate(ds, [Prediction(1, "A x"), Prediction(2, "B z")],
                      keep_per_message=True)
    assert report.per_message == (
        (1, "A x", "A x", 0),
        (2, "B y", "B z", 1),
    )
