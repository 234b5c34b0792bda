"""Boosted multiclass ensemble: one regression tree per class per round."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from pathlib import Path

import numpy as np
import scipy.sparse

from ..errors import DimensionMismatch, SingleClass
from .objective import gradient_hessian, log_loss, softmax
from .tree import RegressionTree, build_tree

MODEL_FORMAT = "collabel-gbt"
MODEL_VERSION = 1


@dataclass(frozen=True)
class TrainConfig:
    """Boosting hyperparameters. Every field is validated on construction."""

    max_depth: int = 6
    eta: float = 0.3
    num_round: int = 100
    gamma: float = 0.0
    subsample: float = 1.0
    reg_lambda: float = 1.0
    seed: int = 0
    min_child_hessian: float = 0.0

    def __post_init__(self):
        if not (isinstance(self.max_depth, int) and self.max_depth >= 1):
            raise ValueError("max_depth must be a positive integer")
        if not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must be in (0, 1]")
        if not (isinstance(self.num_round, int) and self.num_round >= 1):
            raise ValueError("num_round must be an integer >= 1")
        if self.gamma < 0.0:
            raise ValueError("gamma must be >= 0")
        if not 0.0 < self.subsample <= 1.0:
            raise ValueError("subsample must be in (0, 1]")
        if self.reg_lambda < 0.0:
            raise ValueError("lambda must be >= 0")
        if self.min_child_hessian < 0.0:
            raise ValueError("min_child_hessian must be >= 0")

    @classmethod
    def from_mapping(cls, mapping: dict) -> "TrainConfig":
        """Build from a plain dict, accepting "lambda" for the L2 regularizer."""
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in mapping.items():
            name = "reg_lambda" if key == "lambda" else key
            if name not in known:
                raise ValueError(f"unknown training parameter {key!r}")
            kwargs[name] = value
        return cls(**kwargs)

    def to_mapping(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["lambda"] = out.pop("reg_lambda")
        return out


@dataclass(frozen=True)
class BoostedEnsemble:
    """Trained model: trees[round][class], shared class order and base scores."""

    class_labels: tuple[str, ...]
    base_score: np.ndarray
    trees: tuple[tuple[RegressionTree, ...], ...]
    config: TrainConfig
    n_features: int
    train_loss: tuple[float, ...] = field(default=())

    def __post_init__(self):
        for round_trees in self.trees:
            if len(round_trees) != len(self.class_labels):
                raise ValueError("each round must carry one tree per class")

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "class_labels": list(self.class_labels),
            "base_score": self.base_score.tolist(),
            "n_features": self.n_features,
            "config": self.config.to_mapping(),
            "train_loss": list(self.train_loss),
            "trees": [[t.to_dict() for t in row] for row in self.trees],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BoostedEnsemble":
        if obj.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a {MODEL_FORMAT} model document")
        if obj.get("version") != MODEL_VERSION:
            raise ValueError(f"unsupported model version {obj.get('version')!r}")
        return cls(
            class_labels=tuple(obj["class_labels"]),
            base_score=np.asarray(obj["base_score"], dtype=np.float64),
            trees=tuple(
                tuple(RegressionTree.from_dict(t) for t in row) for row in obj["trees"]
            ),
            config=TrainConfig.from_mapping(obj["config"]),
            n_features=int(obj["n_features"]),
            train_loss=tuple(obj["train_loss"]),
        )

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path: str | Path) -> "BoostedEnsemble":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _as_csr(matrix) -> scipy.sparse.csr_matrix:
    """Accept a TfidfMatrix, any scipy sparse matrix, or a dense array."""
    inner = getattr(matrix, "matrix", matrix)
    if scipy.sparse.issparse(inner):
        out = inner.tocsr().copy()
    else:
        out = scipy.sparse.csr_matrix(np.asarray(inner, dtype=np.float64))
    out.eliminate_zeros()
    return out


def train(matrix, labels: list[str], config: TrainConfig) -> BoostedEnsemble:
    """Fit the boosted ensemble.

    Per round: snapshot class probabilities, draw one row subsample
    shared by all classes, then fit each class's tree to its gradient
    and Hessian statistics. Scores accumulate eta-scaled leaf weights.
    """
    x = _as_csr(matrix)
    n, n_features = x.shape
    if len(labels) != n:
        raise DimensionMismatch(n, len(labels), what="label count")
    class_labels = tuple(sorted(set(labels)))
    if len(class_labels) < 2:
        raise SingleClass()
    class_index = {c: i for i, c in enumerate(class_labels)}
    y = np.asarray([class_index[lab] for lab in labels], dtype=np.int64)
    k = len(class_labels)

    counts = np.bincount(y, minlength=k).astype(np.float64)
    base_score = np.log(counts / n)
    scores = np.tile(base_score, (n, 1))

    x_csc = x.tocsc()
    rng = np.random.default_rng(config.seed)
    loss_history = [log_loss(softmax(scores), y)]
    all_trees: list[tuple[RegressionTree, ...]] = []

    for _ in range(config.num_round):
        probs = softmax(scores)
        if config.subsample < 1.0:
            size = max(1, int(config.subsample * n + 0.5))
            rows = np.sort(rng.choice(n, size=size, replace=False))
        else:
            rows = np.arange(n)
        round_trees = []
        for cls_idx in range(k):
            grad, hess = gradient_hessian(probs, y, cls_idx)
            tree = build_tree(
                x_csc,
                rows,
                grad,
                hess,
                max_depth=config.max_depth,
                reg_lambda=config.reg_lambda,
                gamma=config.gamma,
                eta=config.eta,
                min_child_hessian=config.min_child_hessian,
            )
            scores[:, cls_idx] += _predict_tree(tree, x)
            round_trees.append(tree)
        all_trees.append(tuple(round_trees))
        loss = log_loss(softmax(scores), y)
        if not np.isfinite(loss):
            raise FloatingPointError("training loss became non-finite")
        loss_history.append(loss)

    return BoostedEnsemble(
        class_labels=class_labels,
        base_score=base_score,
        trees=tuple(all_trees),
        config=config,
        n_features=n_features,
        train_loss=tuple(loss_history),
    )


def _predict_tree(tree: RegressionTree, x: scipy.sparse.csr_matrix) -> np.ndarray:
    out = np.empty(x.shape[0], dtype=np.float64)
    for i in range(x.shape[0]):
        start, end = x.indptr[i], x.indptr[i + 1]
        row_values = {int(c): float(v) for c, v in zip(x.indices[start:end], x.data[start:end])}
        out[i] = tree.predict_row(row_values)
    return out


def raw_scores(ensemble: BoostedEnsemble, matrix) -> np.ndarray:
    x = _as_csr(matrix)
    if x.shape[1] != ensemble.n_features:
        raise DimensionMismatch(ensemble.n_features, x.shape[1])
    scores = np.tile(ensemble.base_score, (x.shape[0], 1))
    for round_trees in ensemble.trees:
        for cls_idx, tree in enumerate(round_trees):
            scores[:, cls_idx] += _predict_tree(tree, x)
    return scores


def predict_proba(ensemble: BoostedEnsemble, matrix) -> np.ndarray:
    """Per-row class probabilities in ensemble.class_labels order."""
    return softmax(raw_scores(ensemble, matrix))


def predict_labels(ensemble: BoostedEnsemble, matrix) -> list[str]:
    probs = predict_proba(ensemble, matrix)
    return [ensemble.class_labels[i] for i in probs.argmax(axis=1)]
