"""Optimal-tree ensembles for binary classification.

Grow a large forest of randomized probability-estimation trees on
bootstrap or sub-bagged samples, rank the trees by held-out error, then
sequentially keep only the trees that strictly improve the ensemble Brier
score. Ships a benchmark harness, synthetic scenario generators and a CLI.
"""

from .dataset import Dataset, SplitPair, load_csv, random_split, write_csv
from .metrics import ConfusionMatrix, brier_score, confusion_matrix, kappa, misclassification, sensitivity
from .sampling import SampleDraw, bootstrap, derive_seed, subsample
from .selection import (
    Forest,
    Prediction,
    RankedForest,
    SelectedEnsemble,
    SelectionStep,
    TrainConfig,
    ensemble_brier,
    ensemble_proba,
    grow_forest,
    heldout_error,
    load_ensemble,
    predict,
    rank,
    save_ensemble,
    select_oob,
    select_ote,
    select_sub,
    train,
)
from .simgen import LambdaTable, ScenarioSpec, SimConfig, bayes_error, class_prob, component_prob, generate, lambda_table
from .tree import DecisionTree, GrowParams, grow, predict_label, predict_proba

__version__ = "0.1.0"

__all__ = [
    "Dataset",
    "SplitPair",
    "load_csv",
    "random_split",
    "write_csv",
    "ConfusionMatrix",
    "confusion_matrix",
    "misclassification",
    "brier_score",
    "sensitivity",
    "kappa",
    "SampleDraw",
    "bootstrap",
    "subsample",
    "derive_seed",
    "DecisionTree",
    "GrowParams",
    "grow",
    "predict_proba",
    "predict_label",
    "Forest",
    "RankedForest",
    "SelectedEnsemble",
    "SelectionStep",
    "TrainConfig",
    "Prediction",
    "grow_forest",
    "heldout_error",
    "rank",
    "ensemble_proba",
    "ensemble_brier",
    "select_ote",
    "select_oob",
    "select_sub",
    "train",
    "predict",
    "save_ensemble",
    "load_ensemble",
    "ScenarioSpec",
    "SimConfig",
    "LambdaTable",
    "lambda_table",
    "component_prob",
    "class_prob",
    "generate",
    "bayes_error",
]
