"""Single regression tree grown by exact greedy search on sparse columns.

Sparse zeros (absent entries) are not enumerated as split positions on
their own; instead every split learns a default direction that routes
zero-valued rows, and the zero bucket's gradient sums are obtained by
subtracting the nonzero sums from the node totals.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

LEAF = -1


def split_gain(
    grad_sum_left: float,
    hess_sum_left: float,
    grad_sum_right: float,
    hess_sum_right: float,
    reg_lambda: float,
    gamma: float,
) -> float:
    """Loss reduction of a candidate split, minus the complexity penalty.

    The builder takes a split only when this is nonnegative. Zero-gain
    splits are allowed: gradient-balanced patterns (an XOR-style grid)
    score 0 at the root yet become separable one level down, so
    rejecting them would freeze training at a symmetric fixed point.
    """
    gl, hl = grad_sum_left, hess_sum_left
    gr, hr = grad_sum_right, hess_sum_right
    return 0.5 * (
        _score_term(gl, hl, reg_lambda)
        + _score_term(gr, hr, reg_lambda)
        - _score_term(gl + gr, hl + hr, reg_lambda)
    ) - gamma


def _score_term(g: float, h: float, reg_lambda: float) -> float:
    denom = h + reg_lambda
    if denom <= 0.0:
        return 0.0
    return g * g / denom


def leaf_weight(grad_sum: float, hess_sum: float, reg_lambda: float) -> float:
    denom = hess_sum + reg_lambda
    if denom <= 0.0:
        return 0.0
    return -grad_sum / denom


@dataclass(frozen=True)
class RegressionTree:
    """Array-encoded binary tree.

    ``feature[i] == -1`` marks a leaf; internal nodes carry a threshold,
    two children, and the default direction taken by zero/absent values.
    """

    feature: np.ndarray  # int32, -1 at leaves
    threshold: np.ndarray  # float64, nan at leaves
    default_left: np.ndarray  # bool
    children_left: np.ndarray  # int32, -1 at leaves
    children_right: np.ndarray  # int32, -1 at leaves
    value: np.ndarray  # float64 leaf weights, 0 at internal nodes

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] == LEAF:
                return 0
            return 1 + max(walk(self.children_left[node]), walk(self.children_right[node]))

        return walk(0)

    def predict_row(self, row_values: dict[int, float]) -> float:
        """Walk the tree for one row given its nonzero {column: value} map."""
        node = 0
        while self.feature[node] != LEAF:
            v = row_values.get(int(self.feature[node]), 0.0)
            if v == 0.0:
                go_left = bool(self.default_left[node])
            else:
                go_left = v < self.threshold[node]
            node = int(self.children_left[node] if go_left else self.children_right[node])
        return float(self.value[node])

    def to_dict(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": [None if np.isnan(t) else t for t in self.threshold.tolist()],
            "default_left": [bool(b) for b in self.default_left.tolist()],
            "children_left": self.children_left.tolist(),
            "children_right": self.children_right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "RegressionTree":
        return cls(
            feature=np.asarray(obj["feature"], dtype=np.int32),
            threshold=np.asarray(
                [np.nan if t is None else t for t in obj["threshold"]], dtype=np.float64
            ),
            default_left=np.asarray(obj["default_left"], dtype=bool),
            children_left=np.asarray(obj["children_left"], dtype=np.int32),
            children_right=np.asarray(obj["children_right"], dtype=np.int32),
            value=np.asarray(obj["value"], dtype=np.float64),
        )


class _Builder:
    """Grows one tree over a row subset of a CSC matrix."""

    def __init__(self, x_csc, grad, hess, max_depth, reg_lambda, gamma, eta, min_child_hessian):
        self.x = x_csc
        self.grad = grad
        self.hess = hess
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.gamma = gamma
        self.eta = eta
        self.min_child_hessian = min_child_hessian
        self.in_node = np.zeros(x_csc.shape[0], dtype=bool)
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.default_left: list[bool] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.value: list[float] = []

    def build(self, rows: np.ndarray) -> RegressionTree:
        self._grow(rows, depth=0)
        return RegressionTree(
            feature=np.asarray(self.feature, dtype=np.int32),
            threshold=np.asarray(self.threshold, dtype=np.float64),
            default_left=np.asarray(self.default_left, dtype=bool),
            children_left=np.asarray(self.left, dtype=np.int32),
            children_right=np.asarray(self.right, dtype=np.int32),
            value=np.asarray(self.value, dtype=np.float64),
        )

    def _add_node(self) -> int:
        self.feature.append(LEAF)
        self.threshold.append(float("nan"))
        self.default_left.append(True)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(0.0)
        return len(self.feature) - 1

    def _grow(self, rows: np.ndarray, depth: int) -> int:
        node = self._add_node()
        g_total = float(self.grad[rows].sum())
        h_total = float(self.hess[rows].sum())
        if depth >= self.max_depth or len(rows) < 2:
            self.value[node] = self.eta * leaf_weight(g_total, h_total, self.reg_lambda)
            return node
        best = self._best_split(rows, g_total, h_total)
        if best is None:
            self.value[node] = self.eta * leaf_weight(g_total, h_total, self.reg_lambda)
            return node
        feat, thr, default_left = best
        left_rows, right_rows = self._partition(rows, feat, thr, default_left)
        self.feature[node] = feat
        self.threshold[node] = thr
        self.default_left[node] = default_left
        self.left[node] = self._grow(left_rows, depth + 1)
        self.right[node] = self._grow(right_rows, depth + 1)
        return node

    def _column(self, rows: np.ndarray, feat: int) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero (row, value) pairs of one feature restricted to node rows."""
        start, end = self.x.indptr[feat], self.x.indptr[feat + 1]
        col_rows = self.x.indices[start:end]
        col_vals = self.x.data[start:end]
        sel = self.in_node[col_rows]
        return col_rows[sel], col_vals[sel]

    def _best_split(self, rows: np.ndarray, g_total: float, h_total: float):
        self.in_node[rows] = True
        best_gain = -np.inf
        best = None
        n_features = self.x.shape[1]
        for feat in range(n_features):
            nz_rows, nz_vals = self._column(rows, feat)
            if len(nz_rows) == 0:
                continue
            order = np.argsort(nz_vals, kind="stable")
            vals = nz_vals[order]
            g_sorted = self.grad[nz_rows[order]]
            h_sorted = self.hess[nz_rows[order]]
            g_cum = np.cumsum(g_sorted)
            h_cum = np.cumsum(h_sorted)
            g_nz, h_nz = float(g_cum[-1]), float(h_cum[-1])
            n_zero = len(rows) - len(nz_rows)
            g_zero = g_total - g_nz
            h_zero = h_total - h_nz
            # candidate thresholds: midpoints between consecutive distinct
            # values, counting 0.0 as a value when the node has zero rows
            levels = np.unique(vals)
            if n_zero > 0:
                levels = np.unique(np.concatenate([levels, [0.0]]))
            if len(levels) < 2:
                continue
            thresholds = (levels[:-1] + levels[1:]) / 2.0
            defaults = (True, False) if n_zero > 0 else (True,)
            for thr in thresholds:
                # nonzero rows with value < thr form the left-side prefix
                cut = int(np.searchsorted(vals, thr, side="left"))
                gl_nz = float(g_cum[cut - 1]) if cut > 0 else 0.0
                hl_nz = float(h_cum[cut - 1]) if cut > 0 else 0.0
                for default_left in defaults:
                    n_left = cut + (n_zero if default_left else 0)
                    if n_left == 0 or n_left == len(rows):
                        continue
                    gl, hl = gl_nz, hl_nz
                    if default_left:
                        gl += g_zero
                        hl += h_zero
                    gr = g_total - gl
                    hr = h_total - hl
                    if hl < self.min_child_hessian or hr < self.min_child_hessian:
                        continue
                    gain = split_gain(gl, hl, gr, hr, self.reg_lambda, self.gamma)
                    if gain >= 0.0 and gain > best_gain:
                        best_gain = gain
                        best = (feat, float(thr), default_left)
        self.in_node[rows] = False
        return best

    def _partition(self, rows, feat, thr, default_left):
        self.in_node[rows] = True
        nz_rows, nz_vals = self._column(rows, feat)
        self.in_node[rows] = False
        goes_left = np.full(len(rows), default_left, dtype=bool)
        pos = {int(r): i for i, r in enumerate(rows)}
        for r, v in zip(nz_rows, nz_vals):
            goes_left[pos[int(r)]] = v < thr
        return rows[goes_left], rows[~goes_left]


def build_tree(
    x_csc,
    rows: np.ndarray,
    grad: np.ndarray,
    hess: np.ndarray,
    *,
    max_depth: int,
    reg_lambda: float,
    gamma: float,
    eta: float,
    min_child_hessian: float = 0.0,
) -> RegressionTree:
    """Fit one tree to gradient statistics over the given row subset.

    Leaf values arrive pre-scaled by eta, so ensemble prediction is a
    plain sum of tree outputs.
    """
    builder = _Builder(x_csc, grad, hess, max_depth, reg_lambda, gamma, eta, min_child_hessian)
    return builder.build(np.asarray(rows))
