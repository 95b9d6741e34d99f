"""Single-parameter optimization channels.

Each channel improves one aspect of a reference model while leaving the
rest alone: the neighborhood size k, the distance kind, the active feature
subset, or the feature weights.  Every channel scores candidates by
leave-one-out accuracy on the training data only and never returns a model
scoring below the reference.

All search loops are fully deterministic: candidate orders are fixed, and
every tie rule is explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .dataset import Dataset
from .distance import CAMBERRA, CHEBYSHEV, MINKOWSKI
from .evaluation import EvalContext
from .knn import ModelSpec

# candidate distance kinds, in evaluation order
DISTANCE_CANDIDATES = ((MINKOWSKI, 1), (MINKOWSKI, 2), (CHEBYSHEV, None), (CAMBERRA, None))


@dataclass
class ChannelResult:
    model: ModelSpec
    train_score: float  # leave-one-out accuracy of model, exact count ratio
    correct_count: int
    total: int
    evaluations: int  # number of leave-one-out evaluations spent
    budget_exhausted: bool = False


def _result(ctx: EvalContext, model: ModelSpec, count: int, evals: int,
            budget_exhausted: bool = False) -> ChannelResult:
    return ChannelResult(model, count / ctx.train.n, count, ctx.train.n,
                         evals, budget_exhausted)


def _with_weights(model: ModelSpec, weights) -> ModelSpec:
    return replace(model, distance=replace(model.distance, weights=np.asarray(weights, float)))


def _with_kind(model: ModelSpec, kind: str, alpha) -> ModelSpec:
    return replace(model, distance=replace(model.distance, kind=kind, alpha=alpha))


# ---------------------------------------------------------------- k channel

def _k_channel(ctx: EvalContext, ref: ModelSpec, k_range=(1, 10)):
    lo, hi = k_range
    hi = min(hi, ctx.train.n - 1)
    if lo < 1 or lo > hi:
        raise ValueError(f"bad k range ({lo}, {hi})")
    best_model, best_count, evals = None, -1, 0
    for k in range(lo, hi + 1):
        cand = ref if k == ref.k else replace(ref, k=k)
        count = ctx.loo_count(cand)
        evals += 1
        if count > best_count:  # ties keep the smaller k
            best_model, best_count = cand, count
    if not lo <= ref.k <= hi:  # never return a model scoring below the reference
        ref_count = ctx.loo_count(ref)
        evals += 1
        if ref_count >= best_count:
            best_model, best_count = ref, ref_count
    return best_model, best_count, evals


def optimize_k(ref: ModelSpec, train: Dataset, k_range=(1, 10)) -> ChannelResult:
    """Exhaustive scan of the neighborhood size; ties keep the smallest k."""
    ctx = EvalContext(train)
    model, count, evals = _k_channel(ctx, ref, k_range)
    return _result(ctx, model, count, evals)


# --------------------------------------------------------- distance channel

def _distance_channel(ctx: EvalContext, ref: ModelSpec, step=0.1,
                      kinds=DISTANCE_CANDIDATES):
    ref_count = ctx.loo_count(ref)
    evals = 1
    best_model, best_count = ref, ref_count
    weighted = np.any(ref.active_weights(ctx.n_features) != 1.0)
    for kind, alpha in kinds:
        if kind == ref.distance.kind and alpha == ref.distance.alpha:
            continue
        cand = _with_kind(ref, kind, alpha)
        if weighted and kind == MINKOWSKI:
            # weights tuned under one exponent rarely transfer to another;
            # re-run the quantized weight search under the candidate exponent
            cand, count, spent = _quantized_channel(ctx, cand, step)
            evals += spent
        else:
            count = ctx.loo_count(cand)
            evals += 1
        if count > best_count:  # strict: ties keep the reference / earlier kind
            best_model, best_count = cand, count
    return best_model, best_count, evals


def optimize_distance(ref: ModelSpec, train: Dataset,
                      kinds=DISTANCE_CANDIDATES, step=0.1) -> ChannelResult:
    """Try each candidate distance kind in order; keep the reference on ties.

    When the reference carries non-unit weights, Minkowski candidates get a
    quantized weight re-fit before comparison; Chebyshev and Camberra are
    scored with the weights as they are.
    """
    ctx = EvalContext(train)
    model, count, evals = _distance_channel(ctx, ref, step, tuple(kinds))
    return _result(ctx, model, count, evals)


# --------------------------------------------------------- feature channel

def _drop_feature(model: ModelSpec, mask: np.ndarray, j: int) -> ModelSpec:
    new_mask = mask.copy()
    new_mask[j] = False
    out = replace(model, feature_mask=new_mask)
    if model.distance.weights is not None:
        pos = int(np.searchsorted(np.flatnonzero(mask), j))
        out = _with_weights(out, np.delete(model.distance.weights, pos))
    return out


def _feature_channel(ctx: EvalContext, ref: ModelSpec):
    best_model = ref
    best_count = ctx.loo_count(ref)
    best_size = int(ref.mask_for(ctx.n_features).sum())
    evals = 1
    current, current_mask = ref, ref.mask_for(ctx.n_features)
    # march all the way down to one feature, keeping the best subset seen
    while current_mask.sum() > 1:
        candidates = []
        for j in np.flatnonzero(current_mask):
            cand = _drop_feature(current, current_mask, int(j))
            candidates.append((ctx.loo_count(cand), int(j), cand))
            evals += 1
        count, _, cand = max(candidates, key=lambda t: (t[0], t[1]))
        current = cand
        current_mask = current.mask_for(ctx.n_features)
        size = int(current_mask.sum())
        if count > best_count or (count == best_count and size < best_size):
            best_model, best_count, best_size = current, count, size
    return best_model, best_count, evals


def select_features(ref: ModelSpec, train: Dataset) -> ChannelResult:
    """Backward elimination over the active features.

    Each round drops the feature whose removal scores best (ties drop the
    higher index), even when that round loses ground; the best subset seen
    anywhere along the march is returned, preferring fewer features on equal
    score.
    """
    ctx = EvalContext(train)
    model, count, evals = _feature_channel(ctx, ref)
    return _result(ctx, model, count, evals)


# -------------------------------------------------- quantized weight search

def _grid(step: float) -> np.ndarray:
    levels = int(round(1.0 / step))
    if abs(levels * step - 1.0) > 1e-9 or levels < 1:
        raise ValueError(f"step {step} must divide 1 evenly")
    return np.round(np.arange(levels + 1) * step, 10)


def _cd_pass(ctx: EvalContext, ref: ModelSpec, grid: np.ndarray, tie: str):
    """One coordinate-descent run over the weight grid.

    tie='near' moves only on strict gain, to the value nearest the current
    one; tie='low' also moves sideways to the lowest equal-scoring value,
    walking plateaus toward zero.
    """
    w = ref.active_weights(ctx.n_features).copy()
    model = _with_weights(ref, w)
    count = ctx.loo_count(model)
    evals = 1
    changed = True
    while changed:
        changed = False
        for pos in range(len(w)):
            cur = w[pos]
            scores = []
            for g in grid:
                if g == cur:
                    scores.append(count)
                    continue
                w[pos] = g
                scores.append(ctx.loo_count(_with_weights(model, w)))
                evals += 1
            w[pos] = cur
            top = max(scores)
            if top < count:
                continue
            tied = [i for i, s in enumerate(scores) if s == top]
            if tie == "near":
                pick = min(tied, key=lambda i: (abs(grid[i] - cur), grid[i]))
            else:
                pick = tied[0]
            if grid[pick] != cur and (top > count or tie == "low" or cur not in grid):
                w[pos] = grid[pick]
                count = top
                changed = True
    return _with_weights(model, w), count, evals


def _quantized_channel(ctx: EvalContext, ref: ModelSpec, step=0.1):
    grid = _grid(step)
    m1, c1, e1 = _cd_pass(ctx, ref, grid, "near")
    m2, c2, e2 = _cd_pass(ctx, ref, grid, "low")
    nnz1 = int(np.count_nonzero(m1.active_weights(ctx.n_features)))
    nnz2 = int(np.count_nonzero(m2.active_weights(ctx.n_features)))
    if c2 > c1 or (c2 == c1 and nnz2 < nnz1):
        return m2, c2, e1 + e2
    return m1, c1, e1 + e2


def weight_search_quantized(ref: ModelSpec, train: Dataset, step=0.1) -> ChannelResult:
    """Coordinate descent over quantized weights in [0, 1].

    Two passes with different plateau policies are run (conservative
    nearest-value moves, and sideways moves toward zero); the better final
    score wins, and equal scores prefer the sparser weight vector.
    """
    ctx = EvalContext(train)
    model, count, evals = _quantized_channel(ctx, ref, step)
    return _result(ctx, model, count, evals)


# ---------------------------------------------------- simplex weight search

def _simplex_channel(ctx: EvalContext, ref: ModelSpec, budget=2000):
    if budget < 1:
        raise ValueError("budget must be a positive integer")
    dim = int(ref.mask_for(ctx.n_features).sum())

    def objective(w):
        # maximize correct count, then prefer small total weight
        count = ctx.loo_count(_with_weights(ref, w))
        return count, -float(np.sum(w))

    start = ref.active_weights(ctx.n_features).copy()
    vertices = [start] + [start + 0.5 * np.eye(dim)[i] for i in range(dim)]
    vertices = vertices[: max(1, min(len(vertices), budget))]
    scores = []
    best_w, best_score = None, (-1, 0.0)
    evals = 0
    for v in vertices:
        s = objective(v)
        evals += 1
        scores.append(s)
        if s > best_score:
            best_w, best_score = v.copy(), s
    exhausted = evals >= budget

    def track(w, s):
        nonlocal best_w, best_score
        if s > best_score:
            best_w, best_score = w.copy(), s

    while not exhausted and len(vertices) == dim + 1:
        order = sorted(range(dim + 1), key=lambda i: scores[i], reverse=True)
        vertices = [vertices[i] for i in order]
        scores = [scores[i] for i in order]
        spread = max(float(np.max(np.abs(a - vertices[0]))) for a in vertices[1:])
        if spread < 1e-3:
            break
        centroid = np.mean(vertices[:-1], axis=0)
        reflected = np.maximum(centroid + (centroid - vertices[-1]), 0.0)
        s_r = objective(reflected)
        evals += 1
        track(reflected, s_r)
        if evals >= budget:
            exhausted = True
            break
        if s_r > scores[0]:
            expanded = np.maximum(centroid + 2.0 * (centroid - vertices[-1]), 0.0)
            s_e = objective(expanded)
            evals += 1
            track(expanded, s_e)
            if s_e > s_r:
                vertices[-1], scores[-1] = expanded, s_e
            else:
                vertices[-1], scores[-1] = reflected, s_r
        elif s_r > scores[-2]:
            vertices[-1], scores[-1] = reflected, s_r
        else:
            contracted = np.maximum(centroid + 0.5 * (vertices[-1] - centroid), 0.0)
            s_c = objective(contracted)
            evals += 1
            track(contracted, s_c)
            if s_c > scores[-1]:
                vertices[-1], scores[-1] = contracted, s_c
            else:
                for i in range(1, dim + 1):
                    if evals >= budget:
                        exhausted = True
                        break
                    vertices[i] = vertices[0] + 0.5 * (vertices[i] - vertices[0])
                    scores[i] = objective(vertices[i])
                    evals += 1
                    track(vertices[i], scores[i])
        if evals >= budget:
            exhausted = True

    return _with_weights(ref, best_w), best_score[0], evals, exhausted


def weight_search_simplex(ref: ModelSpec, train: Dataset, budget=2000) -> ChannelResult:
    """Nelder-Mead search over continuous non-negative weights.

    The objective maximizes leave-one-out correct count, breaking ties
    toward smaller total weight.  Vertices are clamped at zero after every
    move.  Stops when the simplex diameter falls below 1e-3 or the
    evaluation budget runs out; the best vertex ever evaluated is returned
    either way, with a flag recording budget exhaustion.
    """
    ctx = EvalContext(train)
    model, count, evals, exhausted = _simplex_channel(ctx, ref, budget)
    return _result(ctx, model, count, evals, exhausted)


CHANNELS = {
    "k": lambda ctx, ref, opts: _k_channel(ctx, ref, opts.get("k_range", (1, 10))),
    "distance": lambda ctx, ref, opts: _distance_channel(ctx, ref, opts.get("step", 0.1)),
    "features": lambda ctx, ref, opts: _feature_channel(ctx, ref),
    "weights": lambda ctx, ref, opts: (
        _quantized_channel(ctx, ref, opts.get("step", 0.1))
        if opts.get("weight_method", "quantized") == "quantized"
        else _simplex_channel(ctx, ref, opts.get("budget", 2000))[:3]),
}
