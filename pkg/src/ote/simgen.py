"""Synthetic benchmark scenarios: tree-structured class probabilities.

Four scenarios of increasing size (3..6 generating trees over 9..18
uniform features). Each generating tree is a fixed depth-2 structure whose
four leaves carry node weights from the embedded weight table; the
per-tree values average into a logistic class-1 probability

    p = sigmoid(theta2 * (P/T - theta1)),   P = sum of the T tree values.

Labels are Bernoulli(p). Variant k in 1..4 degrades the node weights to
sweep the difficulty (Bayes error) of the recognition problem.

The weight table is embedded as a compile-time constant and guarded by a
golden-file test against an independent transcription, since transcription
slips are the main failure mode here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import Dataset

# Node-weight rows (one tuple per variant k=1..4, indexed per node j=1..4).
# Three distinct degradation patterns cover every generating tree.
_PAT_A = ((0.9, 0.8, 0.7, 0.6), (0.1, 0.2, 0.3, 0.4), (0.1, 0.2, 0.3, 0.4), (0.9, 0.8, 0.7, 0.6))
_PAT_B = ((0.9, 0.9, 0.9, 0.8), (0.1, 0.1, 0.1, 0.2), (0.1, 0.1, 0.1, 0.2), (0.9, 0.9, 0.9, 0.8))
_PAT_C = ((0.9, 0.8, 0.7, 0.7), (0.1, 0.2, 0.3, 0.3), (0.1, 0.2, 0.3, 0.3), (0.9, 0.8, 0.7, 0.7))

# weights[scenario][tree i-1][node j-1][variant k-1]; stored per scenario,
# duplication accepted for auditability.
_WEIGHTS: dict[int, tuple] = {
    1: (_PAT_A, _PAT_A, _PAT_A),
    2: (_PAT_A, _PAT_A, _PAT_A, _PAT_A),
    3: (_PAT_B, _PAT_B, _PAT_C, _PAT_C, _PAT_C),
    4: (_PAT_B, _PAT_B, _PAT_B, _PAT_C, _PAT_A, _PAT_A),
}

# Feature triple (root, left child, right child) of each generating tree,
# 1-based feature numbers.
_COMPONENT_VARS = (
    (1, 3, 2),
    (4, 6, 5),
    (7, 8, 9),
    (10, 11, 12),
    (13, 14, 15),
    (16, 17, 18),
)


@dataclass(frozen=True)
class LambdaTable:
    """Node weights indexed by (scenario, tree i, node j, variant k), 1-based."""

    weights: dict

    def weight(self, scenario: int, tree: int, node: int, k: int) -> float:
        try:
            return self.weights[scenario][tree - 1][node - 1][k - 1]
        except (KeyError, IndexError):
            raise ValueError(
                f"no weight for scenario={scenario}, tree={tree}, node={node}, k={k}"
            ) from None

    def tree_count(self, scenario: int) -> int:
        return len(self.weights[scenario])


def lambda_table() -> LambdaTable:
    """The full embedded node-weight table."""
    return LambdaTable(_WEIGHTS)


@dataclass(frozen=True)
class ScenarioSpec:
    """One of the four scenarios at complexity variant k.

    Component count and feature dimension are derived: scenario m has
    T = m + 2 generating trees over d = 3 * T features.
    """

    scenario: int
    variant_k: int

    def __post_init__(self):
        if self.scenario not in (1, 2, 3, 4):
            raise ValueError(f"scenario must be 1..4, got {self.scenario}")
        if self.variant_k not in (1, 2, 3, 4):
            raise ValueError(f"variant_k must be 1..4, got {self.variant_k}")

    @property
    def T_components(self) -> int:
        return self.scenario + 2

    @property
    def d(self) -> int:
        return 3 * self.T_components


@dataclass(frozen=True)
class SimConfig:
    n: int
    theta1: float = 0.5
    theta2: float = 15.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.theta2 <= 0:
            raise ValueError(f"theta2 must be > 0, got {self.theta2}")


def component_prob(t: int, row, spec: ScenarioSpec, table: LambdaTable) -> float:
    """Value of the t-th generating tree (1-based) on one feature row.

    The tree splits its root variable at 0.5, then one child variable at
    0.5, and returns the node weight of the single active leaf. Boundary
    convention: <= 0.5 goes to the low branch.
    """
    if not 1 <= t <= spec.T_components:
        raise ValueError(f"component {t} out of range 1..{spec.T_components}")
    row = np.asarray(row, dtype=np.float64)
    a, b, c = (v - 1 for v in _COMPONENT_VARS[t - 1])
    k = spec.variant_k
    if row[a] <= 0.5:
        node = 1 if row[b] <= 0.5 else 2
    else:
        node = 3 if row[c] <= 0.5 else 4
    return table.weight(spec.scenario, t, node, k)


def _component_sum(X: np.ndarray, spec: ScenarioSpec, table: LambdaTable) -> np.ndarray:
    P = np.zeros(X.shape[0])
    k = spec.variant_k
    for t in range(1, spec.T_components + 1):
        a, b, c = (v - 1 for v in _COMPONENT_VARS[t - 1])
        w = [table.weight(spec.scenario, t, j, k) for j in (1, 2, 3, 4)]
        P += np.where(
            X[:, a] <= 0.5,
            np.where(X[:, b] <= 0.5, w[0], w[1]),
            np.where(X[:, c] <= 0.5, w[2], w[3]),
        )
    return P


def _logistic(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def class_prob(row, spec: ScenarioSpec, table: LambdaTable, config: SimConfig) -> float:
    """Class-1 probability p = sigmoid(theta2 * (P/T - theta1)) for one row."""
    row = np.asarray(row, dtype=np.float64)
    if row.shape != (spec.d,):
        raise ValueError(f"expected a row of length {spec.d}, got shape {row.shape}")
    P = sum(component_prob(t, row, spec, table) for t in range(1, spec.T_components + 1))
    z = config.theta2 * (P / spec.T_components - config.theta1)
    return float(_logistic(np.array([z]))[0])


def _class_prob_matrix(
    X: np.ndarray, spec: ScenarioSpec, table: LambdaTable, config: SimConfig
) -> np.ndarray:
    P = _component_sum(X, spec, table)
    return _logistic(config.theta2 * (P / spec.T_components - config.theta1))


def generate(spec: ScenarioSpec, config: SimConfig, table: LambdaTable | None = None) -> Dataset:
    """Sample a Dataset: X ~ Uniform(0,1)^(n x d), y ~ Bernoulli(p(x)).

    Deterministic in config.seed. Feature names are x1..xd.
    """
    table = table or lambda_table()
    rng = np.random.default_rng(config.seed)
    X = rng.random((config.n, spec.d))
    p = _class_prob_matrix(X, spec, table, config)
    y = (rng.random(config.n) < p).astype(np.int64)
    names = tuple(f"x{j + 1}" for j in range(spec.d))
    return Dataset(X, y, names)


def bayes_error(
    spec: ScenarioSpec,
    config: SimConfig,
    mc_rows: int,
    table: LambdaTable | None = None,
    chunk: int = 250_000,
) -> float:
    """Monte-Carlo estimate of E[min(p, 1-p)] under the scenario's law.

    This is the error of the optimal classifier given the known class
    probabilities. Requires mc_rows >= 10_000 for a stable estimate;
    deterministic in config.seed.
    """
    if mc_rows < 10_000:
        raise ValueError(f"mc_rows must be >= 10000, got {mc_rows}")
    table = table or lambda_table()
    rng = np.random.default_rng(config.seed)
    total = 0.0
    done = 0
    while done < mc_rows:
        m = min(chunk, mc_rows - done)
        X = rng.random((m, spec.d))
        p = _class_prob_matrix(X, spec, table, config)
        total += float(np.minimum(p, 1.0 - p).sum())
        done += m
    return total / mc_rows
