"""Model evaluation: leave-one-out and train/test scoring.

EvalContext caches per-feature term tensors for a dataset pair so that the
optimization channels can score thousands of candidate models without
recomputing |x-y| terms.  Distances are accumulated per feature in index
order, which keeps the cached path bitwise identical to classifying each
vector independently with knn.classify.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset
from .distance import CHEBYSHEV, DistanceSpec, feature_terms, term_key
from .knn import ModelSpec, Prediction, shell_vote


@dataclass
class EvalReport:
    accuracy: float  # correct_count / total, exact rational in floating point
    correct_count: int
    total: int
    predictions: list[Prediction]
    truths: np.ndarray
    confusion: np.ndarray  # rows = true class, columns = predicted class

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "correct": self.correct_count,
            "total": self.total,
            "confusion": [[int(v) for v in row] for row in self.confusion],
            "predicted": [p.winner for p in self.predictions],
        }


def confusion_of(truths: np.ndarray, predictions: list[Prediction], n_classes: int) -> np.ndarray:
    out = np.zeros((n_classes, n_classes), dtype=int)
    for t, p in zip(truths, predictions):
        out[int(t), p.winner] += 1
    return out


def _report(truths: np.ndarray, predictions: list[Prediction], n_classes: int) -> EvalReport:
    truths = np.asarray(truths)
    correct = int(sum(p.winner == int(t) for t, p in zip(truths, predictions)))
    return EvalReport(correct / len(truths), correct, len(truths), predictions,
                      truths, confusion_of(truths, predictions, n_classes))


class EvalContext:
    """Caches per-feature term tensors for one training set (and optional test set)."""

    def __init__(self, train: Dataset, test: Dataset | None = None):
        self.train = train
        self.test = test
        self.n_features = train.n_features
        self.n_classes = train.n_classes
        self._terms: dict[tuple[str, str], np.ndarray] = {}
        self.evaluations = 0

    def _term(self, side: str, key: str, j: int) -> np.ndarray:
        cached = self._terms.get((side, key))
        if cached is None:
            a = self.train.vectors if side == "train" else self.test.vectors
            cached = np.stack([feature_terms(a[:, jj], self.train.vectors[:, jj], key)
                               for jj in range(self.n_features)])
            self._terms[(side, key)] = cached
        return cached[j]

    def _distances(self, model: ModelSpec, side: str) -> np.ndarray:
        mask = model.mask_for(self.n_features)
        weights = model.active_weights(self.n_features)
        key = term_key(model.distance.kind, model.distance.alpha)
        rows = self.train.n if side == "train" else self.test.n
        out = np.zeros((rows, self.train.n))
        for idx, j in enumerate(np.flatnonzero(mask)):
            t = self._term(side, key, int(j))
            if model.distance.kind == CHEBYSHEV:
                np.maximum(out, weights[idx] * t, out=out)
            else:
                out += weights[idx] * t
        return out

    def _predict(self, model: ModelSpec, dist: np.ndarray, truths: np.ndarray):
        correct = 0
        predictions = []
        for p in range(dist.shape[0]):
            winner, votes, size = shell_vote(dist[p], self.train.labels, model.k, self.n_classes)
            predictions.append(Prediction(winner, votes / size))
            correct += winner == int(truths[p])
        return correct, predictions

    def loo_count(self, model: ModelSpec) -> int:
        """Leave-one-out correct count; the fast path used by the search channels."""
        self.evaluations += 1
        dist = self._distances(model, "train")
        np.fill_diagonal(dist, np.inf)
        correct = 0
        for p in range(self.train.n):
            winner, _, _ = shell_vote(dist[p], self.train.labels, model.k, self.n_classes)
            correct += winner == int(self.train.labels[p])
        return correct

    def loo_report(self, model: ModelSpec) -> EvalReport:
        self.evaluations += 1
        dist = self._distances(model, "train")
        np.fill_diagonal(dist, np.inf)
        _, predictions = self._predict(model, dist, self.train.labels)
        return _report(self.train.labels, predictions, self.n_classes)

    def test_count(self, model: ModelSpec) -> int:
        if self.test is None:
            raise ValueError("context has no test set")
        dist = self._distances(model, "test")
        correct, _ = self._predict(model, dist, self.test.labels)
        return correct

    def test_report(self, model: ModelSpec) -> EvalReport:
        if self.test is None:
            raise ValueError("context has no test set")
        dist = self._distances(model, "test")
        _, predictions = self._predict(model, dist, self.test.labels)
        return _report(self.test.labels, predictions, self.n_classes)


def leave_one_out(model: ModelSpec, train: Dataset) -> EvalReport:
    """Score a model by leave-one-out over the training data.

    Each vector is classified against the remaining n-1; the held-out row
    never votes and never appears in the neighborhood.
    """
    return EvalContext(train).loo_report(model)


def evaluate(model: ModelSpec, train: Dataset, test: Dataset) -> EvalReport:
    """Classify every test vector against the full training data."""
    if train.n_features != test.n_features:
        raise ValueError("train and test widths differ")
    return EvalContext(train, test).test_report(model)
