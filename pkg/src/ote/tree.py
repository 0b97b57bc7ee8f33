"""Single probability-estimation tree: the random-forest base learner.

Growth is recursive binary splitting on the in-sample rows of a draw. At
each node a uniform random subset of ``mtry`` features is considered and
the split maximizing the Gini impurity decrease wins; ties go to the
lowest feature index, then the lowest threshold, so growth is fully
deterministic in (data, draw, params, seed). Leaves store the raw class-1
proportion of their rows (bootstrap repeats counted with multiplicity).

The hot loops are compiled with numba; the in-kernel RNG is a
self-contained splitmix64 stream so trees are bit-reproducible across
platforms and process counts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .dataset import Dataset
from .sampling import SampleDraw

_U64 = np.uint64
_NO_DEPTH_LIMIT = -1


@dataclass(eq=False)
class GrowParams:
    """Knobs for tree growth.

    mtry defaults to ceil(sqrt(d)) when left unset. min_node_size is the
    smallest node that may still be split (nodes below it become leaves).
    min_impurity_decrease: a split must decrease the node's weighted Gini
    impurity by strictly more than this to be taken.
    """

    mtry: int | None = None
    min_node_size: int = 1
    max_depth: int | None = None
    min_impurity_decrease: float = 0.0

    def resolved_mtry(self, d: int) -> int:
        mtry = self.mtry if self.mtry is not None else math.ceil(math.sqrt(d))
        if not 1 <= mtry <= d:
            raise ValueError(f"mtry={mtry} out of range [1, {d}]")
        return mtry

    def validate(self, d: int) -> None:
        self.resolved_mtry(d)
        if self.min_node_size < 1:
            raise ValueError(f"min_node_size must be >= 1, got {self.min_node_size}")
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_impurity_decrease < 0:
            raise ValueError(
                f"min_impurity_decrease must be >= 0, got {self.min_impurity_decrease}"
            )


@dataclass(eq=False)
class DecisionTree:
    """Grown tree as flat node arrays (root is node 0).

    ``feature[i] == -1`` marks a leaf; internal nodes route a row left iff
    ``row[feature] <= threshold``. ``prob`` holds the class-1 proportion of
    the node's in-sample rows and ``count`` their number (with bootstrap
    multiplicity). ``candidates`` records the feature subset sampled at
    each node that attempted a split (-1 padding elsewhere); it is an audit
    aid and is not serialized.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    prob: np.ndarray
    count: np.ndarray
    d: int
    seed: int
    candidates: np.ndarray | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return self.feature.shape[0]

    @property
    def n_leaves(self) -> int:
        return int((self.feature < 0).sum())


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z + _U64(0x9E3779B97F4A7C15)) & _U64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> _U64(30))) * _U64(0xBF58476D1CE4E5B9)) & _U64(0xFFFFFFFFFFFFFFFF)
    z = ((z ^ (z >> _U64(27))) * _U64(0x94D049BB133111EB)) & _U64(0xFFFFFFFFFFFFFFFF)
    return z ^ (z >> _U64(31))


@njit(cache=True)
def _grow_kernel(X, y, mtry, min_node_size, max_depth, min_gain, seed):
    n, d = X.shape
    max_nodes = 2 * n + 1
    feature = np.full(max_nodes, -1, np.int32)
    threshold = np.zeros(max_nodes)
    left = np.full(max_nodes, -1, np.int32)
    right = np.full(max_nodes, -1, np.int32)
    prob = np.zeros(max_nodes)
    count = np.zeros(max_nodes, np.int32)
    cands = np.full((max_nodes, mtry), -1, np.int32)

    samples = np.arange(n).astype(np.int64)
    stack = np.empty((max_nodes, 4), np.int64)  # node, start, end, depth
    stack[0] = (0, 0, n, 0)
    top = 1
    n_nodes = 1
    state = _mix64(_U64(seed))

    featbuf = np.empty(d, np.int32)
    vals = np.empty(n)
    ysort = np.empty(n)
    tmp = np.empty(n, np.int64)

    while top > 0:
        top -= 1
        nid, start, end, depth = stack[top]
        k = end - start
        ones = 0
        for i in range(start, end):
            ones += int(y[samples[i]])
        count[nid] = k
        prob[nid] = ones / k
        if ones == 0 or ones == k or k < min_node_size or k < 2:
            continue
        if max_depth >= 0 and depth >= max_depth:
            continue

        # Partial Fisher-Yates for mtry distinct features, then ascending
        # order so equal-gain ties resolve to the lowest feature index.
        for j in range(d):
            featbuf[j] = j
        for j in range(mtry):
            state = _mix64(state)
            r = j + int(state % _U64(d - j))
            t = featbuf[j]
            featbuf[j] = featbuf[r]
            featbuf[r] = t
        sub = np.sort(featbuf[:mtry])
        cands[nid, :] = sub

        # Weighted child impurity, scaled by k: minimizing this maximizes
        # the Gini decrease. Candidate thresholds are midpoints between
        # consecutive distinct sorted values.
        best_cost = np.inf
        best_feat = -1
        best_thr = 0.0
        for jj in range(mtry):
            f = sub[jj]
            for i in range(k):
                vals[i] = X[samples[start + i], f]
            order = np.argsort(vals[:k])
            for i in range(k):
                ysort[i] = y[samples[start + order[i]]]
            onesL = 0.0
            for p in range(k - 1):
                onesL += ysort[p]
                v1 = vals[order[p]]
                v2 = vals[order[p + 1]]
                if v1 >= v2:
                    continue
                nL = p + 1.0
                nR = k - nL
                onesR = ones - onesL
                cost = (nL - (onesL * onesL + (nL - onesL) * (nL - onesL)) / nL) + (
                    nR - (onesR * onesR + (nR - onesR) * (nR - onesR)) / nR
                )
                if cost < best_cost:
                    best_cost = cost
                    best_feat = f
                    t = 0.5 * (v1 + v2)
                    if t >= v2:  # midpoint rounded up to v2: fall back to v1
                        t = v1
                    best_thr = t
        if best_feat < 0:
            continue
        parent_cost = k - (float(ones) * ones + float(k - ones) * (k - ones)) / k
        gain = (parent_cost - best_cost) / k
        if gain <= min_gain:
            continue

        # Stable in-place partition of samples[start:end] on the split.
        nl = 0
        nr = 0
        for i in range(start, end):
            s = samples[i]
            if X[s, best_feat] <= best_thr:
                samples[start + nl] = s
                nl += 1
            else:
                tmp[nr] = s
                nr += 1
        for i in range(nr):
            samples[start + nl + i] = tmp[i]

        feature[nid] = best_feat
        threshold[nid] = best_thr
        lid = n_nodes
        rid = n_nodes + 1
        n_nodes += 2
        left[nid] = lid
        right[nid] = rid
        stack[top, 0] = rid
        stack[top, 1] = start + nl
        stack[top, 2] = end
        stack[top, 3] = depth + 1
        top += 1
        stack[top, 0] = lid
        stack[top, 1] = start
        stack[top, 2] = start + nl
        stack[top, 3] = depth + 1
        top += 1

    return (
        feature[:n_nodes],
        threshold[:n_nodes],
        left[:n_nodes],
        right[:n_nodes],
        prob[:n_nodes],
        count[:n_nodes],
        cands[:n_nodes],
    )


@njit(cache=True)
def _route_kernel(feature, threshold, left, right, X, out):
    for i in range(X.shape[0]):
        nid = 0
        while feature[nid] >= 0:
            if X[i, feature[nid]] <= threshold[nid]:
                nid = left[nid]
            else:
                nid = right[nid]
        out[i] = nid


def grow(data: Dataset, draw: SampleDraw, params: GrowParams, seed: int) -> DecisionTree:
    """Grow a tree on the draw's in-sample rows of ``data``.

    Deterministic in all inputs. The per-tree RNG (feature subsetting) is
    seeded by ``seed`` alone, independent of the draw's seed.
    """
    if draw.in_indices.size == 0:
        raise ValueError("cannot grow a tree on an empty in-sample")
    params.validate(data.d)
    Xb = data.features[draw.in_indices]
    yb = data.labels[draw.in_indices].astype(np.float64)
    max_depth = _NO_DEPTH_LIMIT if params.max_depth is None else params.max_depth
    feature, threshold, left, right, prob, count, cands = _grow_kernel(
        Xb,
        yb,
        params.resolved_mtry(data.d),
        params.min_node_size,
        max_depth,
        params.min_impurity_decrease,
        _U64(seed & ((1 << 64) - 1)),
    )
    return DecisionTree(
        feature=feature,
        threshold=threshold,
        left=left,
        right=right,
        prob=prob,
        count=count,
        d=data.d,
        seed=seed,
        candidates=cands,
    )


def _check_row(tree: DecisionTree, row: np.ndarray) -> np.ndarray:
    row = np.asarray(row, dtype=np.float64)
    if row.ndim != 1 or row.shape[0] != tree.d:
        raise ValueError(f"expected a feature vector of length {tree.d}, got shape {row.shape}")
    return row


def predict_proba_batch(tree: DecisionTree, X: np.ndarray) -> np.ndarray:
    """Class-1 probability for every row of X (m x d)."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != tree.d:
        raise ValueError(f"expected an (m, {tree.d}) matrix, got shape {X.shape}")
    out = np.empty(X.shape[0], dtype=np.int64)
    _route_kernel(tree.feature, tree.threshold, tree.left, tree.right, X, out)
    return tree.prob[out]


def predict_proba(tree: DecisionTree, row: np.ndarray) -> float:
    """Leaf probability reached by threshold routing (left iff value <= threshold)."""
    row = _check_row(tree, row)
    return float(predict_proba_batch(tree, row[None, :])[0])


def predict_label(tree: DecisionTree, row: np.ndarray) -> int:
    """1 iff predict_proba >= 0.5 (ties go to class 1)."""
    return int(predict_proba(tree, row) >= 0.5)


def dump(tree: DecisionTree) -> str:
    """Indented one-node-per-line text rendering, for debugging only."""
    lines: list[str] = []

    def walk(nid: int, depth: int) -> None:
        pad = "  " * depth
        if tree.feature[nid] < 0:
            lines.append(f"{pad}leaf p={tree.prob[nid]:.6g} n={int(tree.count[nid])}")
        else:
            lines.append(
                f"{pad}x{int(tree.feature[nid])} <= {tree.threshold[nid]:.6g} "
                f"(n={int(tree.count[nid])})"
            )
            walk(int(tree.left[nid]), depth + 1)
            walk(int(tree.right[nid]), depth + 1)

    walk(0, 0)
    return "\n".join(lines)
