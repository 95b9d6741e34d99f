"""Meta-level search over the model space, and model sequence selection.

meta_search runs the optimization channels level by level.  At each level
every channel starts from the same reference model; the best candidate
replaces the reference when its gain exceeds epsilon, otherwise the search
stops.  Decisions use leave-one-out training scores only.  Test scores, when
a test set is supplied, are recorded in the trace for reporting but are
never consulted by any decision.

select_model_sequence builds a committee greedily from a pool of scored
models: starting from the best one, it keeps adding whichever member
improves the majority vote the most, until no addition helps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .distance import DistanceSpec
from .evaluation import EvalContext
from .knn import ModelSpec, Prediction, classify
from .optimize import CHANNELS

DEFAULT_CHANNELS = ("k", "distance", "features", "weights")


@dataclass
class CandidateRecord:
    level: int
    channel: str
    model: ModelSpec
    train_correct: int
    train_total: int
    evaluations: int
    test_correct: int | None = None
    test_total: int | None = None

    def to_record(self, n_features: int) -> dict:
        out = {
            "type": "candidate",
            "level": self.level,
            "channel": self.channel,
            "train_correct": self.train_correct,
            "train_total": self.train_total,
            "evaluations": self.evaluations,
            "model": self.model.describe(n_features),
        }
        if self.test_correct is not None:
            out["test_correct"] = self.test_correct
            out["test_total"] = self.test_total
        return out


@dataclass
class LevelRecord:
    level: int
    candidates: list[CandidateRecord]
    accepted: str | None  # channel name, or None when the level was rejected


@dataclass
class SearchTrace:
    n_features: int
    initial: CandidateRecord  # the starting reference, channel name "reference"
    levels: list[LevelRecord] = field(default_factory=list)
    stop_reason: str = ""  # "no-improvement" or "channel-exhaustion"

    def accepted_records(self) -> list[CandidateRecord]:
        out = []
        for level in self.levels:
            if level.accepted is not None:
                out.append(next(c for c in level.candidates if c.channel == level.accepted))
        return out

    def levels_accepted(self) -> int:
        return sum(1 for level in self.levels if level.accepted is not None)

    def to_records(self) -> list[dict]:
        records = [dict(self.initial.to_record(self.n_features), type="reference")]
        for level in self.levels:
            records.extend(c.to_record(self.n_features) for c in level.candidates)
            records.append({"type": "decision", "level": level.level,
                            "accepted": level.accepted})
        records.append({"type": "stop", "reason": self.stop_reason,
                        "levels_accepted": self.levels_accepted()})
        return records


def meta_search(train: Dataset, test: Dataset | None = None,
                channels=DEFAULT_CHANNELS, epsilon: float = 0.0,
                initial: ModelSpec | None = None, k_range=(1, 10),
                weight_method: str = "quantized", step: float = 0.1,
                budget: int = 2000, max_levels: int | None = None):
    """Level-wise search through the model space.

    Returns (final model, SearchTrace).  The final model is the reference
    left standing when the search stops; its leave-one-out score equals the
    last accepted candidate's (or the initial reference's, when nothing was
    accepted).
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    unknown = [c for c in channels if c not in CHANNELS]
    if unknown:
        raise ValueError(f"unknown channels {unknown}")
    opts = {"k_range": k_range, "weight_method": weight_method,
            "step": step, "budget": budget}
    ctx = EvalContext(train, test)
    ref = initial if initial is not None else ModelSpec(k=1, distance=DistanceSpec())
    ref_count = ctx.loo_count(ref)

    def observed(record: CandidateRecord) -> CandidateRecord:
        if test is not None:
            record.test_correct = ctx.test_count(record.model)
            record.test_total = test.n
        return record

    trace = SearchTrace(train.n_features,
                        observed(CandidateRecord(0, "reference", ref, ref_count, train.n, 1)))
    # accepted gains are strictly positive vector counts, so the loop is
    # bounded by train.n even without an explicit level cap
    level = 0
    while max_levels is None or level < max_levels:
        level += 1
        candidates = []
        for name in channels:
            model, count, evals = CHANNELS[name](ctx, ref, opts)
            candidates.append(observed(CandidateRecord(level, name, model, count, train.n, evals)))
        if not candidates:
            trace.stop_reason = "channel-exhaustion"
            break
        best = candidates[0]
        for cand in candidates[1:]:
            if cand.train_correct > best.train_correct or (
                    cand.train_correct == best.train_correct
                    and cand.model.complexity_rank(train.n_features)
                    < best.model.complexity_rank(train.n_features)):
                best = cand
        if best.train_correct - ref_count > epsilon * train.n:
            trace.levels.append(LevelRecord(level, candidates, best.channel))
            ref, ref_count = best.model, best.train_correct
        else:
            trace.levels.append(LevelRecord(level, candidates, None))
            trace.stop_reason = "no-improvement"
            break
    else:
        trace.stop_reason = "channel-exhaustion"
    return ref, trace


# ------------------------------------------------------- sequence selection

@dataclass
class PoolMember:
    model: ModelSpec
    predictions: np.ndarray  # predicted class per validation vector

    def __post_init__(self):
        self.predictions = np.asarray(self.predictions, dtype=int)


@dataclass
class ModelSequence:
    members: list[PoolMember]
    combined_correct: int
    total: int

    @property
    def combined_score(self) -> float:
        return self.combined_correct / self.total


def _majority(votes, n_classes: int) -> int:
    """Majority vote; ties go to the earliest member voting for a tied class."""
    counts = np.bincount(votes, minlength=n_classes)
    top = counts.max()
    tied = np.flatnonzero(counts == top)
    if len(tied) == 1:
        return int(tied[0])
    tied = set(int(c) for c in tied)
    for v in votes:
        if int(v) in tied:
            return int(v)
    raise AssertionError("unreachable")


def _joint_predictions(members: list[PoolMember], n_classes: int) -> np.ndarray:
    stacked = np.stack([m.predictions for m in members])
    return np.array([_majority(stacked[:, p], n_classes) for p in range(stacked.shape[1])])


def _infer_n_features(pool) -> int:
    for member in pool:
        if member.model.feature_mask is not None:
            return len(member.model.feature_mask)
    for member in pool:
        if member.model.distance.weights is not None:
            return len(member.model.distance.weights)
    return 1


def select_model_sequence(pool, truths, epsilon: float = 0.0) -> ModelSequence:
    """Greedy forward selection of a majority-vote committee.

    The pool is ordered by decreasing validation accuracy (ties prefer the
    simpler model); the best member seeds the sequence.  Each step adds the
    remaining member whose inclusion improves the joint vote the most, and
    stops when the gain falls to epsilon or below.
    """
    pool = [m if isinstance(m, PoolMember) else PoolMember(*m) for m in pool]
    if not pool:
        raise ValueError("empty model pool")
    truths = np.asarray(truths, dtype=int)
    total = len(truths)
    if any(len(m.predictions) != total for m in pool):
        raise ValueError("pool predictions and truths must have equal length")
    n_classes = int(max(truths.max(), max(m.predictions.max() for m in pool))) + 1
    n_features = _infer_n_features(pool)

    def correct_of(preds) -> int:
        return int(np.sum(preds == truths))

    order = sorted(range(len(pool)),
                   key=lambda i: (-correct_of(pool[i].predictions),
                                  pool[i].model.complexity_rank(n_features), i))
    remaining = [pool[i] for i in order]
    sequence = [remaining.pop(0)]
    current = correct_of(sequence[0].predictions)
    while remaining:
        best_i, best_correct, best_rank = -1, -1, None
        for i, cand in enumerate(remaining):
            joint = correct_of(_joint_predictions(sequence + [cand], n_classes))
            rank = cand.model.complexity_rank(n_features)
            if joint > best_correct or (joint == best_correct and rank < best_rank):
                best_i, best_correct, best_rank = i, joint, rank
        if best_correct - current <= epsilon * total:
            break
        sequence.append(remaining.pop(best_i))
        current = best_correct
    return ModelSequence(sequence, current, total)


def build_pool(train: Dataset, trace: SearchTrace) -> tuple[list[PoolMember], np.ndarray]:
    """Pool every model the search trace visited, with leave-one-out predictions."""
    ctx = EvalContext(train)
    models = [trace.initial.model]
    for level in trace.levels:
        models.extend(c.model for c in level.candidates)
    pool = []
    for model in models:
        report = ctx.loo_report(model)
        pool.append(PoolMember(model, np.array([p.winner for p in report.predictions])))
    return pool, train.labels.copy()


def evaluate_sequence(sequence: ModelSequence, train: Dataset, test: Dataset) -> tuple[int, int]:
    """Majority-vote correct count of the sequence on a test set."""
    ctx = EvalContext(train, test)
    member_preds = []
    for member in sequence.members:
        report = ctx.test_report(member.model)
        member_preds.append(np.array([p.winner for p in report.predictions]))
    stacked = np.stack(member_preds)
    joint = np.array([_majority(stacked[:, p], train.n_classes) for p in range(test.n)])
    return int(np.sum(joint == test.labels)), test.n


def ensemble_predict(sequence: ModelSequence, train: Dataset, query) -> Prediction:
    """Classify a query by the sequence's majority vote.

    Vote ties go to the earliest member of the sequence whose vote is among
    the tied classes; class probabilities are the vote fractions.
    """
    if not sequence.members:
        raise ValueError("empty sequence")
    votes = [classify(m.model, train, query).winner for m in sequence.members]
    winner = _majority(votes, train.n_classes)
    probs = np.bincount(votes, minlength=train.n_classes) / len(votes)
    return Prediction(winner, probs)
