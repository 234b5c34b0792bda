"""Cross-validated grid search over boosting hyperparameters."""

from __future__ import annotations

import csv
import itertools
import logging
from pathlib import Path

import numpy as np

from ..errors import EmptyGrid
from .ensemble import TrainConfig, _as_csr, predict_proba, train
from .objective import PROB_FLOOR

log = logging.getLogger(__name__)


def expand_grid(grid: dict[str, list]) -> list[dict]:
    """All parameter combinations, in insertion-order lexicographic order."""
    if not grid or any(len(values) == 0 for values in grid.values()):
        raise EmptyGrid()
    names = list(grid)
    return [dict(zip(names, combo)) for combo in itertools.product(*(grid[n] for n in names))]


def stratified_folds(labels: list[str], folds: int, seed: int) -> list[np.ndarray]:
    """Deal each class's shuffled indices round-robin across folds."""
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        by_class.setdefault(lab, []).append(i)
    assignment = np.empty(len(labels), dtype=np.int64)
    for lab in sorted(by_class):
        idx = np.asarray(by_class[lab])
        perm = rng.permutation(len(idx))
        for pos, j in enumerate(perm):
            assignment[idx[j]] = pos % folds
    return [np.flatnonzero(assignment == f) for f in range(folds)]


def grid_search(
    matrix,
    labels: list[str],
    grid: dict[str, list],
    folds: int = 5,
    seed: int = 0,
    defaults: dict | None = None,
    scorer=None,
) -> tuple[TrainConfig, list[dict]]:
    """Evaluate every grid point by stratified k-fold mean multiclass log-loss.

    ``scorer(config, train_idx, test_idx) -> float`` may replace the
    default train-and-score path (used to test search mechanics without
    paying for real training). Returns the argmin config (ties broken by
    enumeration order) and the full table, one row per grid point.

    Args:
        matrix: feature matrix (TfidfMatrix, scipy sparse, or dense).
        labels: one class label per row.
        grid: parameter name to list of candidate values.
        folds: number of folds, >= 2.
        seed: drives fold assignment and training subsampling.
        defaults: fixed parameter values merged under every grid point.
    """
    if folds < 2:
        raise ValueError("folds must be >= 2")
    points = expand_grid(grid)
    fold_idx = stratified_folds(labels, folds, seed)
    labels_arr = np.asarray(labels, dtype=object)
    x = _as_csr(matrix)

    best_config = None
    best_mean = float("inf")
    table: list[dict] = []
    for point in points:
        params = dict(defaults or {})
        params.update(point)
        params.setdefault("seed", seed)
        config = TrainConfig.from_mapping(params)
        fold_scores = []
        for f in range(folds):
            test_idx = fold_idx[f]
            train_idx = np.concatenate([fold_idx[g] for g in range(folds) if g != f])
            if scorer is not None:
                score = float(scorer(config, train_idx, test_idx))
            else:
                score = _holdout_logloss(x, labels_arr, config, train_idx, test_idx)
            fold_scores.append(score)
        mean_loss = float(np.mean(fold_scores))
        row = dict(point)
        for f, s in enumerate(fold_scores):
            row[f"fold_{f}"] = s
        row["mean_logloss"] = mean_loss
        table.append(row)
        log.info("grid point %s -> mean log-loss %.6f", point, mean_loss)
        if mean_loss < best_mean:
            best_mean = mean_loss
            best_config = config
    return best_config, table


def _holdout_logloss(x, labels_arr, config, train_idx, test_idx) -> float:
    model = train(x[train_idx], list(labels_arr[train_idx]), config)
    probs = predict_proba(model, x[test_idx])
    col = {lab: i for i, lab in enumerate(model.class_labels)}
    losses = []
    for row, lab in zip(probs, labels_arr[test_idx]):
        # a true class absent from the training fold gets floor probability
        p = row[col[lab]] if lab in col else PROB_FLOOR
        losses.append(-np.log(max(p, PROB_FLOOR)))
    return float(np.mean(losses))


def save_cv_table(table: list[dict], path: str | Path) -> None:
    if not table:
        raise EmptyGrid()
    fieldnames = list(table[0])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fieldnames)
        writer.writeheader()
        for row in table:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
