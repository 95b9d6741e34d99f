"""Nearest-neighbor classification with distance-shell neighborhoods.

The neighborhood of a query is defined by distance shells: training points
are grouped by exact distance value, and shells are taken in increasing
order until at least k points are covered.  Every point tied with the k-th
rank is therefore included; the neighborhood can be larger than k but never
depends on the order training rows happen to be stored in.

Class votes are counted over the whole neighborhood.  A tied vote widens
the neighborhood by one more shell and re-votes; if the shells are
exhausted while still tied, the class with the smallest summed distance to
the query wins, then the lowest class index.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import Dataset
from .distance import MINKOWSKI, DistanceSpec, dissimilarity


@dataclass
class ModelSpec:
    k: int = 1
    distance: DistanceSpec = field(default_factory=DistanceSpec)
    feature_mask: np.ndarray | None = None  # None = all features active

    def __post_init__(self):
        if not isinstance(self.k, (int, np.integer)) or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k!r}")
        self.k = int(self.k)
        if self.feature_mask is not None:
            self.feature_mask = np.asarray(self.feature_mask, dtype=bool)
            if self.feature_mask.ndim != 1 or not self.feature_mask.any():
                raise ValueError("feature mask must keep at least one feature")

    def mask_for(self, n_features: int) -> np.ndarray:
        if self.feature_mask is None:
            return np.ones(n_features, dtype=bool)
        if len(self.feature_mask) != n_features:
            raise ValueError(f"mask length {len(self.feature_mask)} for {n_features} features")
        return self.feature_mask

    def active_weights(self, n_features: int) -> np.ndarray:
        """Weights aligned with the active columns, in ascending column order."""
        return self.distance.resolved_weights(int(self.mask_for(n_features).sum()))

    def full_weights(self, n_features: int) -> np.ndarray:
        """Weight vector over all features, zeros in masked-out positions."""
        mask = self.mask_for(n_features)
        full = np.zeros(n_features)
        full[mask] = self.active_weights(n_features)
        return full

    def complexity_rank(self, n_features: int) -> int:
        """Deviation count from the plain model: k=1, Euclidean, all features, unit weights."""
        mask = self.mask_for(n_features)
        w = self.active_weights(n_features)
        return (int(self.k != 1)
                + int(np.sum(w != 1.0))
                + int(np.sum(~mask))
                + int(not (self.distance.kind == MINKOWSKI and self.distance.alpha == 2)))

    def describe(self, n_features: int | None = None) -> dict:
        out = {"k": self.k, "distance": self.distance.describe()}
        if n_features is not None:
            out["features"] = [int(j) + 1 for j in np.flatnonzero(self.mask_for(n_features))]
            out["weights"] = [float(v) for v in self.active_weights(n_features)]
        return out


@dataclass
class Prediction:
    winner: int
    class_probs: np.ndarray  # vote fractions over the deciding neighborhood

    def __post_init__(self):
        self.class_probs = np.asarray(self.class_probs, dtype=float)


def shell_vote(dist: np.ndarray, labels: np.ndarray, k: int, n_classes: int):
    """Shell-neighborhood vote on a precomputed distance row.

    Entries set to +inf are excluded.  Returns (winner, votes, size) where
    votes counts each class inside the deciding neighborhood of that size.
    """
    order = np.argsort(dist, kind="stable")
    ds = dist[order]
    available = int(np.sum(np.isfinite(ds)))
    if k > available:
        raise ValueError(f"k={k} but only {available} training points available")
    size = int(np.searchsorted(ds[:available], ds[k - 1], side="right"))
    while True:
        votes = np.bincount(labels[order[:size]], minlength=n_classes)
        top = votes.max()
        tied = np.flatnonzero(votes == top)
        if len(tied) == 1:
            return int(tied[0]), votes, size
        if size >= available:
            break
        size = int(np.searchsorted(ds[:available], ds[size], side="right"))
    # shells exhausted: smallest summed distance among tied classes, then lowest index
    in_hood = labels[order[:size]]
    sums = np.array([ds[:size][in_hood == c].sum() for c in tied])
    return int(tied[int(np.argmin(sums))]), votes, size


def _distance_row(model: ModelSpec, train: Dataset, query) -> np.ndarray:
    query = np.asarray(query, dtype=float)
    if query.shape != (train.n_features,):
        raise ValueError(f"query must have {train.n_features} components")
    mask = model.mask_for(train.n_features)
    spec = replace(model.distance, weights=model.active_weights(train.n_features))
    q = query[mask]
    rows = train.vectors[:, mask]
    return np.array([dissimilarity(spec, rows[p], q) for p in range(train.n)])


def neighbors(model: ModelSpec, train: Dataset, query, exclude: int | None = None):
    """Neighborhood of a query: all rows in the shells covering at least k points.

    Returns (row_index, distance) pairs sorted by distance, then row index.
    """
    d = _distance_row(model, train, query)
    if exclude is not None:
        d[exclude] = np.inf
    available = train.n - (exclude is not None)
    if model.k > available:
        raise ValueError(f"k={model.k} but only {available} training points available")
    order = np.argsort(d, kind="stable")
    ds = d[order]
    size = int(np.searchsorted(ds[:available], ds[model.k - 1], side="right"))
    return [(int(order[i]), float(ds[i])) for i in range(size)]


def classify(model: ModelSpec, train: Dataset, query, exclude: int | None = None) -> Prediction:
    """Classify a query vector against the training data."""
    d = _distance_row(model, train, query)
    if exclude is not None:
        d[exclude] = np.inf
    winner, votes, size = shell_vote(d, train.labels, model.k, train.n_classes)
    return Prediction(winner, votes / size)
