"""Tree ranking and sequential Brier-score selection.

The pipeline shared by all three methods: grow a forest of T trees on
resamples, rank trees ascending by their error on the rows each tree never
saw, keep the top M as candidates, then walk the candidates in rank order
admitting a tree only when it strictly lowers the ensemble Brier score on
the step's assessment set. The methods differ only in where assessment
rows come from:

    ote      - a validation set carved off before any tree is grown;
               every step is scored on that common set
    ote_oob  - trees grow on bootstrap samples of all training rows;
               step j is scored on candidate j's own out-of-bag rows
    ote_sub  - trees grow on without-replacement sub-samples;
               step j is scored on candidate j's sample remainder

Admission order follows rank order strictly; rejected trees are never
revisited; ties (no strict improvement) reject the candidate.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .dataset import Dataset, random_split
from .sampling import (
    BOOTSTRAP,
    STREAM_DRAW,
    STREAM_GROW,
    STREAM_SPLIT,
    SUBSAMPLE,
    SampleDraw,
    bootstrap,
    derive_seed,
    subsample,
)
from .tree import DecisionTree, GrowParams, grow, predict_proba_batch

METHOD_OTE = "ote"
METHOD_OTE_OOB = "ote_oob"
METHOD_OTE_SUB = "ote_sub"
SELECT_METHODS = (METHOD_OTE, METHOD_OTE_OOB, METHOD_OTE_SUB)

_SERIAL_FORMAT = "ote-selected-ensemble"
_SERIAL_VERSION = 1


@dataclass(eq=False)
class Forest:
    """T trees with their parallel draws."""

    trees: list[DecisionTree]
    draws: list[SampleDraw]

    def __post_init__(self):
        if len(self.trees) != len(self.draws) or not self.trees:
            raise ValueError(
                f"forest needs equally many trees and draws (>= 1), "
                f"got {len(self.trees)} trees / {len(self.draws)} draws"
            )

    @property
    def T(self) -> int:
        return len(self.trees)


@dataclass(eq=False)
class RankedForest:
    """Top-M tree ids sorted ascending by held-out error.

    ``errors`` covers every tree of the forest (flagged trees, i.e. those
    with an empty held-out set, carry the worst value 1.0 and are excluded
    from ``order``). ``proba_cache[t, i]`` caches tree t's probability on
    row i of the data the forest was ranked against.
    """

    forest: Forest
    order: np.ndarray
    errors: np.ndarray
    flagged: frozenset[int]
    proba_cache: np.ndarray = field(repr=False)


@dataclass(frozen=True)
class SelectionStep:
    """One candidate decision: Brier score without vs with the tree."""

    tree_id: int
    bs_before: float
    bs_after: float
    admitted: bool
    assessment_size: int


@dataclass(eq=False)
class SelectedEnsemble:
    """Admitted trees in admission order plus the full decision trace.

    The top-ranked tree is always present and is not a trace entry; the
    trace records every subsequent candidate, admitted or not.
    """

    method: str
    trees: list[DecisionTree]
    tree_ids: list[int]
    trace: list[SelectionStep]
    config: dict | None = None


class Prediction(NamedTuple):
    label: int
    proba: float


def grow_forest(
    data: Dataset,
    n_trees: int,
    params: GrowParams,
    kind: str = BOOTSTRAP,
    m: int | None = None,
    seed: int = 0,
) -> Forest:
    """Grow n_trees trees on fresh draws from ``data``.

    Per-tree draw and growth seeds are derived from ``seed`` and the tree
    index, so the forest is identical however the trees are scheduled.
    """
    if n_trees < 1:
        raise ValueError(f"n_trees must be >= 1, got {n_trees}")
    if kind == SUBSAMPLE and m is None:
        raise ValueError("subsample forests need an explicit sample size m")
    trees: list[DecisionTree] = []
    draws: list[SampleDraw] = []
    for t in range(n_trees):
        draw_seed = derive_seed(seed, STREAM_DRAW, t)
        if kind == BOOTSTRAP:
            draw = bootstrap(data.n, draw_seed)
        elif kind == SUBSAMPLE:
            draw = subsample(data.n, m, draw_seed)
        else:
            raise ValueError(f"unknown draw kind {kind!r}")
        draws.append(draw)
        trees.append(grow(data, draw, params, derive_seed(seed, STREAM_GROW, t)))
    return Forest(trees, draws)


def heldout_error(tree: DecisionTree, draw: SampleDraw, data: Dataset) -> float:
    """Misclassification rate of the tree on its draw's held-out rows.

    An empty held-out set returns the worst value 1.0 by convention; such
    trees are flagged and excluded from ranking.
    """
    held = draw.held_out_indices
    if held.size == 0:
        return 1.0
    probs = predict_proba_batch(tree, data.features[held])
    pred = probs >= 0.5
    return float(np.mean(pred != (data.labels[held] == 1)))


def rank(forest: Forest, data: Dataset, M: int) -> RankedForest:
    """Rank trees ascending by held-out error, retaining the top M.

    The sort is stable: ties break by original tree index. Trees with an
    empty held-out set get error 1.0 and never enter the top-M pool. If
    fewer than M assessable trees exist, all of them are retained.
    """
    T = forest.T
    if not 1 <= M <= T:
        raise ValueError(f"M must be in [1, {T}], got {M}")
    cache = np.empty((T, data.n))
    errors = np.empty(T)
    flagged = set()
    y = data.labels == 1
    for t, (tree, draw) in enumerate(zip(forest.trees, forest.draws)):
        cache[t] = predict_proba_batch(tree, data.features)
        held = draw.held_out_indices
        if held.size == 0:
            flagged.add(t)
            errors[t] = 1.0
        else:
            errors[t] = float(np.mean((cache[t, held] >= 0.5) != y[held]))
    by_error = np.lexsort((np.arange(T), errors))
    pool = [int(t) for t in by_error if t not in flagged]
    if not pool:
        raise ValueError("every tree has an empty held-out set; nothing to rank")
    return RankedForest(
        forest=forest,
        order=np.array(pool[:M], dtype=np.int64),
        errors=errors,
        flagged=frozenset(flagged),
        proba_cache=cache,
    )


def ensemble_proba_batch(trees: list[DecisionTree], X: np.ndarray) -> np.ndarray:
    """Unweighted mean of per-tree class-1 probabilities, one per row."""
    if not trees:
        raise ValueError("ensemble_proba needs at least one tree")
    acc = predict_proba_batch(trees[0], X).copy()
    for tree in trees[1:]:
        acc += predict_proba_batch(tree, X)
    return acc / len(trees)


def ensemble_proba(trees: list[DecisionTree], row: np.ndarray) -> float:
    row = np.asarray(row, dtype=np.float64)
    return float(ensemble_proba_batch(trees, row[None, :])[0])


def ensemble_brier(trees: list[DecisionTree], rows: np.ndarray, data: Dataset) -> float:
    """Mean squared error of the ensemble probability on the given rows."""
    rows = np.asarray(rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("ensemble_brier needs a non-empty evaluation set")
    probs = ensemble_proba_batch(trees, data.features[rows])
    return float(np.mean((data.labels[rows] - probs) ** 2))


def _walk_candidates(method, ranked, y, proba_rows, rows_for_step, config=None):
    """Shared sequential admission loop.

    ``proba_rows(tree_id)`` returns the candidate's probability vector on
    the full row universe the assessment indices point into;
    ``rows_for_step(tree_id)`` returns that step's assessment indices.
    """
    order = ranked.order
    seed_id = int(order[0])
    running = proba_rows(seed_id).copy()
    admitted = [seed_id]
    trace: list[SelectionStep] = []
    for tree_id in (int(t) for t in order[1:]):
        rows = rows_for_step(tree_id)
        yv = y[rows]
        base = running[rows]
        cand = proba_rows(tree_id)[rows]
        k = len(admitted)
        bs_before = float(np.mean((yv - base / k) ** 2))
        bs_after = float(np.mean((yv - (base + cand) / (k + 1)) ** 2))
        admit = bs_after < bs_before
        trace.append(SelectionStep(tree_id, bs_before, bs_after, admit, int(rows.size)))
        if admit:
            running += proba_rows(tree_id)
            admitted.append(tree_id)
    forest = ranked.forest
    return SelectedEnsemble(
        method=method,
        trees=[forest.trees[t] for t in admitted],
        tree_ids=admitted,
        trace=trace,
        config=config,
    )


def select_ote(
    ranked: RankedForest, validation_rows: np.ndarray, data: Dataset
) -> SelectedEnsemble:
    """Sequential selection scored on a fixed validation set.

    ``validation_rows`` index into ``data`` and must be disjoint from
    everything the trees were grown on (the caller's split guarantees it).
    """
    rows = np.asarray(validation_rows, dtype=np.int64)
    if rows.size == 0:
        raise ValueError("select_ote needs a non-empty validation set")
    V = data.features[rows]
    probas = {}

    def proba_rows(tree_id: int) -> np.ndarray:
        if tree_id not in probas:
            probas[tree_id] = predict_proba_batch(ranked.forest.trees[tree_id], V)
        return probas[tree_id]

    local = np.arange(rows.size, dtype=np.int64)
    y = (data.labels[rows] == 1).astype(np.float64)
    return _walk_candidates(METHOD_OTE, ranked, y, proba_rows, lambda _t: local)


def _select_on_own_heldout(method, kind, ranked, forest, data):
    if forest is not ranked.forest:
        raise ValueError("forest does not match the ranked forest")
    for t in (int(i) for i in ranked.order):
        draw = forest.draws[t]
        if draw.kind != kind:
            raise ValueError(f"{method} expects {kind} draws, tree {t} has {draw.kind!r}")
        if draw.held_out_indices.size == 0:
            raise ValueError(f"tree {t} has an empty held-out set and cannot be assessed")
    y = (data.labels == 1).astype(np.float64)

    def proba_rows(tree_id: int) -> np.ndarray:
        return ranked.proba_cache[tree_id]

    def rows_for_step(tree_id: int) -> np.ndarray:
        return forest.draws[tree_id].held_out_indices

    return _walk_candidates(method, ranked, y, proba_rows, rows_for_step)


def select_oob(ranked: RankedForest, forest: Forest, data: Dataset) -> SelectedEnsemble:
    """Sequential selection scored on each candidate's own OOB rows.

    Both Brier terms of step j use candidate j's out-of-bag set, so the
    with/without comparison is made on common data.
    """
    return _select_on_own_heldout(METHOD_OTE_OOB, BOOTSTRAP, ranked, forest, data)


def select_sub(ranked: RankedForest, forest: Forest, data: Dataset) -> SelectedEnsemble:
    """As select_oob, with assessment rows = each candidate's sample remainder."""
    return _select_on_own_heldout(METHOD_OTE_SUB, SUBSAMPLE, ranked, forest, data)


@dataclass(eq=False)
class TrainConfig:
    """Full-pipeline settings: forest size, candidate pool and data carving.

    top_m_fraction sizes the candidate pool (M = round(fraction * T)).
    v_fraction is the share of rows carved off for validation (ote only);
    sub_fraction the without-replacement sample size as a share of n
    (ote_sub only).
    """

    n_trees: int = 1500
    top_m_fraction: float = 0.20
    params: GrowParams = field(default_factory=GrowParams)
    v_fraction: float = 0.10
    sub_fraction: float = 0.90
    seed: int = 0

    def validate(self) -> None:
        if self.n_trees < 1:
            raise ValueError(f"n_trees must be >= 1, got {self.n_trees}")
        if not 0.0 < self.top_m_fraction <= 1.0:
            raise ValueError(f"top_m_fraction must be in (0, 1], got {self.top_m_fraction}")
        if not 0.0 < self.v_fraction < 1.0:
            raise ValueError(f"v_fraction must be in (0, 1), got {self.v_fraction}")
        if not 0.0 < self.sub_fraction < 1.0:
            raise ValueError(f"sub_fraction must be in (0, 1), got {self.sub_fraction}")

    def top_m(self) -> int:
        return min(self.n_trees, max(1, int(math.floor(self.top_m_fraction * self.n_trees + 0.5))))


def _config_snapshot(method: str, config: TrainConfig, data: Dataset) -> dict:
    p = config.params
    snap = {
        "method": method,
        "n_trees": config.n_trees,
        "top_m_fraction": config.top_m_fraction,
        "seed": config.seed,
        "mtry": p.resolved_mtry(data.d),
        "min_node_size": p.min_node_size,
        "max_depth": p.max_depth,
        "min_impurity_decrease": p.min_impurity_decrease,
    }
    if method == METHOD_OTE:
        snap["v_fraction"] = config.v_fraction
    if method == METHOD_OTE_SUB:
        snap["sub_fraction"] = config.sub_fraction
    return snap


def train(method: str, data: Dataset, config: TrainConfig) -> SelectedEnsemble:
    """Run the whole pipeline: sample, grow, rank, select.

    Deterministic in (data, config): all draw/growth/split seeds derive
    from config.seed through fixed streams.
    """
    if method not in SELECT_METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {SELECT_METHODS}")
    config.validate()
    M = config.top_m()
    snapshot = _config_snapshot(method, config, data)

    if method == METHOD_OTE:
        pair = random_split(data, 1.0 - config.v_fraction, derive_seed(config.seed, STREAM_SPLIT))
        if np.intersect1d(pair.train_indices, pair.test_indices).size:
            raise RuntimeError("internal split produced overlapping grow/validation rows")
        grow_data = data.subset(pair.train_indices)
        forest = grow_forest(grow_data, config.n_trees, config.params, BOOTSTRAP, seed=config.seed)
        ranked = rank(forest, grow_data, M)
        selected = select_ote(ranked, pair.test_indices, data)
    elif method == METHOD_OTE_OOB:
        forest = grow_forest(data, config.n_trees, config.params, BOOTSTRAP, seed=config.seed)
        ranked = rank(forest, data, M)
        selected = select_oob(ranked, forest, data)
    else:
        m = int(math.floor(config.sub_fraction * data.n))
        if not 1 <= m < data.n:
            raise ValueError(
                f"sub_fraction={config.sub_fraction} gives sample size {m} for n={data.n}"
            )
        forest = grow_forest(data, config.n_trees, config.params, SUBSAMPLE, m=m, seed=config.seed)
        ranked = rank(forest, data, M)
        selected = select_sub(ranked, forest, data)
    selected.config = snapshot
    return selected


def predict(ensemble: SelectedEnsemble, row: np.ndarray) -> Prediction:
    """Soft-vote prediction: mean tree probability, label 1 iff proba >= 0.5."""
    proba = ensemble_proba(ensemble.trees, row)
    return Prediction(label=int(proba >= 0.5), proba=proba)


def _tree_to_obj(tree: DecisionTree) -> dict:
    return {
        "feature": [int(v) for v in tree.feature],
        "threshold": [float(v) for v in tree.threshold],
        "left": [int(v) for v in tree.left],
        "right": [int(v) for v in tree.right],
        "prob": [float(v) for v in tree.prob],
        "count": [int(v) for v in tree.count],
        "d": tree.d,
        "seed": tree.seed,
    }


def _tree_from_obj(obj: dict) -> DecisionTree:
    return DecisionTree(
        feature=np.array(obj["feature"], dtype=np.int32),
        threshold=np.array(obj["threshold"], dtype=np.float64),
        left=np.array(obj["left"], dtype=np.int32),
        right=np.array(obj["right"], dtype=np.int32),
        prob=np.array(obj["prob"], dtype=np.float64),
        count=np.array(obj["count"], dtype=np.int32),
        d=int(obj["d"]),
        seed=int(obj["seed"]),
    )


def dumps_ensemble(ensemble: SelectedEnsemble) -> bytes:
    """Serialize to a versioned flat file body.

    The encoding is canonical JSON (sorted keys, fixed separators, exact
    float round-trip), so serialize -> deserialize -> serialize is
    byte-identical.
    """
    obj = {
        "format": _SERIAL_FORMAT,
        "version": _SERIAL_VERSION,
        "method": ensemble.method,
        "config": ensemble.config,
        "tree_ids": [int(t) for t in ensemble.tree_ids],
        "trace": [
            {
                "tree_id": s.tree_id,
                "bs_before": s.bs_before,
                "bs_after": s.bs_after,
                "admitted": s.admitted,
                "assessment_size": s.assessment_size,
            }
            for s in ensemble.trace
        ],
        "trees": [_tree_to_obj(t) for t in ensemble.trees],
    }
    return json.dumps(obj, sort_keys=True, separators=(",", ":")).encode("utf-8")


def loads_ensemble(blob: bytes) -> SelectedEnsemble:
    obj = json.loads(blob.decode("utf-8"))
    if obj.get("format") != _SERIAL_FORMAT:
        raise ValueError(f"not a serialized ensemble (format={obj.get('format')!r})")
    if obj.get("version") != _SERIAL_VERSION:
        raise ValueError(f"unsupported ensemble version {obj.get('version')!r}")
    return SelectedEnsemble(
        method=obj["method"],
        trees=[_tree_from_obj(t) for t in obj["trees"]],
        tree_ids=[int(t) for t in obj["tree_ids"]],
        trace=[
            SelectionStep(
                tree_id=int(s["tree_id"]),
                bs_before=float(s["bs_before"]),
                bs_after=float(s["bs_after"]),
                admitted=bool(s["admitted"]),
                assessment_size=int(s["assessment_size"]),
            )
            for s in obj["trace"]
        ],
        config=obj["config"],
    )


def save_ensemble(ensemble: SelectedEnsemble, path: str | Path) -> None:
    Path(path).write_bytes(dumps_ensemble(ensemble))


def load_ensemble(path: str | Path) -> SelectedEnsemble:
    return loads_ensemble(Path(path).read_bytes())
