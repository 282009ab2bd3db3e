"""Faithfulness and interpretability measurement on held-out data."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .oracle import Oracle
from .rules import DecisionSet, predict_rows
from .schema import InputSpace


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    def to_json(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
        }


def confusion_metrics(tp: int, fp: int, tn: int, fn: int) -> Metrics:
    total = tp + fp + tn + fn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall > 0
        else 0.0
    )
    return Metrics(
        accuracy=(tp + tn) / total,
        precision=precision,
        recall=recall,
        f1=f1,
        tp=tp, fp=fp, tn=tn, fn=fn,
    )


def evaluate_rows(s: DecisionSet, oracle: Oracle, X: np.ndarray, space: InputSpace) -> Metrics:
    if X.shape[0] == 0:
        raise ValidationError("the test set must be non-empty")
    truth = oracle.query_encoded_batch(X).astype(bool)
    pred = predict_rows(s, X, space)
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    tn = int(np.count_nonzero(~pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    return confusion_metrics(tp, fp, tn, fn)


def evaluate(s: DecisionSet, oracle: Oracle, test, space: InputSpace) -> Metrics:
    """Score a decision set against oracle labels on test instances.

    Positive class is label 1; the zero-denominator convention for
    precision, recall, and F1 is 0.
    """
    return evaluate_rows(s, oracle, space.encode_many(list(test)), space)


def interpretability_metrics(s: DecisionSet) -> tuple[int, float, int]:
    """(rule count, mean conditions per rule, max conditions per rule)."""
    if len(s) == 0:
        return (0, 0.0, 0)
    counts = [len(r) for r in s.rules]
    return (len(s), sum(counts) / len(counts), max(counts))
