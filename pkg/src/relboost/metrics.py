"""Ranking metrics with fixed tie conventions.

AUC-ROC is the Mann-Whitney statistic with ties counted 1/2. AUC-PR is the
area under the descending-score step curve where equal scores form a single
group and no interpolation is applied; with all scores equal it therefore
equals the positive prevalence exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError
from .logic import Atom, FactBase, Label, LabeledExample
from .model import BoostedModel
from .validation import as_label


@dataclass(frozen=True)
class ScoredExample:
    atom: Atom | None
    label: Label
    score: float


def _to_arrays(scored: Iterable) -> tuple[np.ndarray, np.ndarray]:
    labels: list[bool] = []
    scores: list[float] = []
    for item in scored:
        if isinstance(item, ScoredExample):
            label, score = item.label, item.score
        else:
            label, score = item
        label = as_label(label)
        if label == Label.UNOBSERVED:
            raise DataError("unobserved labels cannot enter metric computation")
        labels.append(label == Label.POSITIVE)
        scores.append(float(score))
    return np.array(labels, dtype=bool), np.array(scores, dtype=np.float64)


def auc_roc(scored: Iterable) -> float:
    """Probability a random positive outranks a random negative (ties = 1/2)."""
    labels, scores = _to_arrays(scored)
    n_pos = int(labels.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("auc_roc needs at least one positive and one negative")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0  # average rank, 1-based
        i = j + 1
    rank_sum = float(ranks[labels].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def auc_pr(scored: Iterable) -> float:
    """Step-curve area: sum over descending tie groups of dRecall * precision."""
    labels, scores = _to_arrays(scored)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise DataError("auc_pr needs at least one positive")
    order = np.argsort(-scores, kind="mergesort")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    area = 0.0
    tp = fp = 0
    prev_recall = 0.0
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        group = sorted_labels[i : j + 1]
        tp += int(group.sum())
        fp += int(len(group) - group.sum())
        recall = tp / n_pos
        precision = tp / (tp + fp)
        area += (recall - prev_recall) * precision
        prev_recall = recall
        i = j + 1
    return area


def score_model(
    model: BoostedModel, examples: Sequence[LabeledExample], fb: FactBase
) -> list[ScoredExample]:
    """Score labeled examples with the model; unobserved ones are skipped."""
    return [
        ScoredExample(ex.atom, ex.label, model.probability(ex.atom, fb))
        for ex in examples
        if ex.label != Label.UNOBSERVED
    ]
