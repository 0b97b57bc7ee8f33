"""Benchmark harness: repeated random splits, training, metric aggregation.

One repetition = one train/test split (seeded base_seed + r), one training
per method on the train part, all four metrics on the test part. CSV
sources are loaded once and re-split per repetition; scenario sources draw
a fresh realization of the data for every repetition, matching the
simulation protocol the scenarios come from.

Repetitions are independent and may run in worker processes; every seed is
derived from (base_seed, repetition, method), so results are byte-identical
whatever the worker count. Result rows are ordered by (method, repetition)
regardless of completion order.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .dataset import Dataset, load_csv, random_split, write_index_file
from .metrics import brier_score, kappa, misclassification, sensitivity
from .sampling import BOOTSTRAP, STREAM_SIM, STREAM_TRAIN, derive_seed
from .selection import (
    SELECT_METHODS,
    TrainConfig,
    ensemble_proba_batch,
    grow_forest,
    train,
)
from .simgen import ScenarioSpec, SimConfig, generate
from .tree import GrowParams

METHOD_FULL_FOREST = "full_forest"
ALL_METHODS = SELECT_METHODS + (METHOD_FULL_FOREST,)

# Fixed method ids for seed derivation; never renumber.
_METHOD_IDS = {"ote": 1, "ote_oob": 2, "ote_sub": 3, "full_forest": 4}

RESULT_COLUMNS = (
    "method",
    "repetition",
    "misclassification",
    "brier",
    "sensitivity",
    "kappa",
    "selected_tree_count",
)


@dataclass(frozen=True)
class CsvSource:
    path: str
    label_column: str
    positive_label: str


@dataclass(frozen=True)
class ScenarioSource:
    """Synthetic source: a fresh realization is generated per repetition."""

    scenario: int
    k: int
    n: int
    seed: int = 0
    theta1: float = 0.5
    theta2: float = 15.0


@dataclass(eq=False)
class ExperimentConfig:
    source: CsvSource | ScenarioSource
    methods: tuple[str, ...] = ALL_METHODS
    split_fraction: float = 0.7
    repetitions: int = 100
    n_trees: int = 1500
    top_m_fraction: float = 0.20
    v_fraction: float | None = None
    sub_fraction: float | None = None
    params: GrowParams = field(default_factory=GrowParams)
    base_seed: int = 0
    workers: int = 1

    def validate(self) -> None:
        if not self.methods:
            raise ValueError("at least one method is required")
        for m in self.methods:
            if m not in ALL_METHODS:
                raise ValueError(f"unknown method {m!r}, expected a subset of {ALL_METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError(f"duplicate methods in {self.methods}")
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if not 0.0 < self.split_fraction < 1.0:
            raise ValueError(f"split_fraction must be in (0, 1), got {self.split_fraction}")
        if self.v_fraction is not None and "ote" not in self.methods:
            raise ValueError("v_fraction is only meaningful for the ote method")
        if self.sub_fraction is not None and "ote_sub" not in self.methods:
            raise ValueError("sub_fraction is only meaningful for the ote_sub method")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers}")

    def train_config(self, seed: int) -> TrainConfig:
        return TrainConfig(
            n_trees=self.n_trees,
            top_m_fraction=self.top_m_fraction,
            params=self.params,
            v_fraction=self.v_fraction if self.v_fraction is not None else 0.10,
            sub_fraction=self.sub_fraction if self.sub_fraction is not None else 0.90,
            seed=seed,
        )


@dataclass(frozen=True)
class ResultRow:
    method: str
    repetition: int
    misclassification: float
    brier: float
    sensitivity: float
    kappa: float
    selected_tree_count: int
    wall_time: float


@dataclass(frozen=True)
class MethodSummary:
    method: str
    n_reps: int
    misclassification_mean: float
    misclassification_sd: float
    brier_mean: float
    brier_sd: float
    sensitivity_mean: float
    sensitivity_sd: float
    kappa_mean: float
    kappa_sd: float
    selected_trees_mean: float
    wall_time_mean: float


def _materialize(source, rep: int, shared: Dataset | None) -> Dataset:
    if shared is not None:
        return shared
    spec = ScenarioSpec(source.scenario, source.k)
    cfg = SimConfig(
        n=source.n,
        theta1=source.theta1,
        theta2=source.theta2,
        seed=derive_seed(source.seed, STREAM_SIM, rep),
    )
    return generate(spec, cfg)


def _assert_no_leakage(split, n: int) -> None:
    both = np.concatenate([split.train_indices, split.test_indices])
    both.sort()
    if both.size != n or not np.array_equal(both, np.arange(n)):
        raise RuntimeError("train/test split is not an exact partition of the rows")
    if np.intersect1d(split.train_indices, split.test_indices).size:
        raise RuntimeError("train and test rows overlap")


def _run_rep(job) -> list[ResultRow]:
    config, rep, shared, dump_dir = job
    data = _materialize(config.source, rep, shared)
    split = random_split(data, config.split_fraction, config.base_seed + rep)
    _assert_no_leakage(split, data.n)
    if dump_dir is not None:
        write_index_file(split.train_indices, Path(dump_dir) / f"rep{rep:04d}_train.txt")
        write_index_file(split.test_indices, Path(dump_dir) / f"rep{rep:04d}_test.txt")
    train_data = data.subset(split.train_indices)
    test_X = data.features[split.test_indices]
    test_y = data.labels[split.test_indices]

    rows = []
    for method in config.methods:
        started = time.perf_counter()
        seed = derive_seed(config.base_seed, STREAM_TRAIN, rep, _METHOD_IDS[method])
        if method == METHOD_FULL_FOREST:
            forest = grow_forest(
                train_data, config.n_trees, config.params, BOOTSTRAP, seed=seed
            )
            trees = forest.trees
        else:
            ensemble = train(method, train_data, config.train_config(seed))
            trees = ensemble.trees
        probs = ensemble_proba_batch(trees, test_X)
        labels = (probs >= 0.5).astype(np.int64)
        rows.append(
            ResultRow(
                method=method,
                repetition=rep,
                misclassification=misclassification(labels, test_y),
                brier=brier_score(probs, test_y),
                sensitivity=sensitivity(labels, test_y),
                kappa=kappa(labels, test_y),
                selected_tree_count=len(trees),
                wall_time=time.perf_counter() - started,
            )
        )
    return rows


def run(config: ExperimentConfig, dump_splits_dir: str | Path | None = None) -> list[ResultRow]:
    """Execute the experiment; fully deterministic in config.

    Returns one row per (method, repetition), ordered by method as listed
    in the config, then repetition.
    """
    config.validate()
    shared = None
    if isinstance(config.source, CsvSource):
        shared = load_csv(config.source.path, config.source.label_column,
                          config.source.positive_label)
    if dump_splits_dir is not None:
        Path(dump_splits_dir).mkdir(parents=True, exist_ok=True)
    jobs = [(config, r, shared, dump_splits_dir) for r in range(config.repetitions)]
    if config.workers == 1:
        per_rep = [_run_rep(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            per_rep = list(pool.map(_run_rep, jobs))
    rows = [row for rep_rows in per_rep for row in rep_rows]
    method_pos = {m: i for i, m in enumerate(config.methods)}
    rows.sort(key=lambda r: (method_pos[r.method], r.repetition))
    return rows


def aggregate(rows: list[ResultRow]) -> list[MethodSummary]:
    """Per-method mean and (population) standard deviation of each metric."""
    if not rows:
        raise ValueError("aggregate needs at least one result row")
    order: list[str] = []
    groups: dict[str, list[ResultRow]] = {}
    for row in rows:
        if row.method not in groups:
            order.append(row.method)
            groups[row.method] = []
        groups[row.method].append(row)

    def stats(values) -> tuple[float, float]:
        arr = np.asarray(values, dtype=np.float64)
        return float(arr.mean()), float(arr.std(ddof=0))

    summaries = []
    for method in order:
        g = groups[method]
        mis = stats([r.misclassification for r in g])
        bri = stats([r.brier for r in g])
        sen = stats([r.sensitivity for r in g])
        kap = stats([r.kappa for r in g])
        summaries.append(
            MethodSummary(
                method=method,
                n_reps=len(g),
                misclassification_mean=mis[0],
                misclassification_sd=mis[1],
                brier_mean=bri[0],
                brier_sd=bri[1],
                sensitivity_mean=sen[0],
                sensitivity_sd=sen[1],
                kappa_mean=kap[0],
                kappa_sd=kap[1],
                selected_trees_mean=float(np.mean([r.selected_tree_count for r in g])),
                wall_time_mean=float(np.mean([r.wall_time for r in g])),
            )
        )
    return summaries


def sweep_m(
    config: ExperimentConfig, m_fractions: list[float]
) -> list[tuple[float, list[MethodSummary]]]:
    """Re-run the experiment once per candidate-pool fraction.

    Returns (fraction, per-method summary) blocks in the given order.
    """
    if not m_fractions:
        raise ValueError("sweep_m needs at least one fraction")
    for f in m_fractions:
        if not 0.0 < f <= 1.0:
            raise ValueError(f"M fractions must be in (0, 1], got {f}")
    blocks = []
    for f in m_fractions:
        rows = run(replace(config, top_m_fraction=f))
        blocks.append((f, aggregate(rows)))
    return blocks


def write_results_csv(rows: list[ResultRow], path: str | Path) -> None:
    """Schema-stable per-repetition CSV (fixed column order, repr floats).

    Wall time is deliberately not written: the file must be byte-identical
    across reruns of the same config.
    """
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RESULT_COLUMNS)
        for r in rows:
            writer.writerow(
                [
                    r.method,
                    r.repetition,
                    repr(r.misclassification),
                    repr(r.brier),
                    repr(r.sensitivity),
                    repr(r.kappa),
                    r.selected_tree_count,
                ]
            )


def write_sweep_csv(blocks, path: str | Path) -> None:
    header = ["m_fraction", "method", "n_reps"]
    for metric in ("misclassification", "brier", "sensitivity", "kappa"):
        header += [f"{metric}_mean", f"{metric}_sd"]
    header.append("selected_trees_mean")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for fraction, summaries in blocks:
            for s in summaries:
                writer.writerow(
                    [
                        repr(fraction),
                        s.method,
                        s.n_reps,
                        repr(s.misclassification_mean),
                        repr(s.misclassification_sd),
                        repr(s.brier_mean),
                        repr(s.brier_sd),
                        repr(s.sensitivity_mean),
                        repr(s.sensitivity_sd),
                        repr(s.kappa_mean),
                        repr(s.kappa_sd),
                        repr(s.selected_trees_mean),
                    ]
                )


def format_summary(summaries: list[MethodSummary]) -> str:
    """Aligned human-readable table for standard output."""
    header = (
        f"{'method':<12} {'reps':>5} {'misclass':>17} {'brier':>17} "
        f"{'sensitivity':>17} {'kappa':>17} {'trees':>8} {'sec/rep':>8}"
    )
    lines = [header, "-" * len(header)]
    for s in summaries:
        cell = lambda m, sd: f"{m:.4f} +/- {sd:.4f}"
        lines.append(
            f"{s.method:<12} {s.n_reps:>5} {cell(s.misclassification_mean, s.misclassification_sd):>17} "
            f"{cell(s.brier_mean, s.brier_sd):>17} {cell(s.sensitivity_mean, s.sensitivity_sd):>17} "
            f"{cell(s.kappa_mean, s.kappa_sd):>17} {s.selected_trees_mean:>8.1f} "
            f"{s.wall_time_mean:>8.2f}"
        )
    return "\n".join(lines)


def format_sweep(blocks) -> str:
    parts = []
    for fraction, summaries in blocks:
        parts.append(f"M fraction = {fraction}")
        parts.append(format_summary(summaries))
    return "\n".join(parts)
