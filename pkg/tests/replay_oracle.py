"""Independent step-replay oracle for the sequential selection procedures.

Recomputes every per-step Brier comparison with plain Python loops over
per-row tree predictions, sharing no accumulation logic with the library's
running-sum implementation.
"""

import numpy as np

from ote.tree import predict_proba


def _brier(trees, rows, data) -> float:
    total = 0.0
    for i in rows:
        row = data.features[int(i)]
        acc = 0.0
        for tree in trees:
            acc += predict_proba(tree, row)
        p = acc / len(trees)
        total += (float(data.labels[int(i)]) - p) ** 2
    return total / len(rows)


def replay_admitted_ids(ranked, forest, data, method, validation_rows=None):
    """Admitted tree ids under a from-scratch replay of the selection walk."""
    order = [int(t) for t in ranked.order]
    admitted = [order[0]]
    steps = []
    for cand in order[1:]:
        if method == "ote":
            rows = validation_rows
        else:
            rows = forest.draws[cand].held_out_indices
        trees_without = [forest.trees[t] for t in admitted]
        bs_without = _brier(trees_without, rows, data)
        bs_with = _brier(trees_without + [forest.trees[cand]], rows, data)
        take = bs_with < bs_without
        steps.append((cand, bs_without, bs_with, take))
        if take:
            admitted.append(cand)
    return admitted, steps
