"""Unpruned information-gain decision tree over numeric thresholds.

Candidate thresholds are midpoints between consecutive distinct values of an
attribute within the node. Split search runs over every column at once: the
nonzero entries of the node's columns are sorted by (column, value), the
implicit zeros of each column are folded in as one block, and cumulative
class counts give the left/right contingency of every candidate.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy import sparse, stats

from dialecto.arff_io import Dataset
from dialecto.classifiers.base import TrainedModel, dataset_matrix, fit_classifier, register
from dialecto.classifiers.specs import TreeSpec
from dialecto.features import one_hot

logger = logging.getLogger(__name__)

GAIN_EPS = 1e-12
LEAF = -1


def _entropy_rows(counts: np.ndarray) -> np.ndarray:
    with np.errstate(invalid="ignore", divide="ignore"):
        h = stats.entropy(counts, base=2, axis=-1)
    return np.nan_to_num(h, nan=0.0)


@dataclass(frozen=True)
class Split:
    attribute: int
    threshold: float
    gain: float


def split_candidates(X: sparse.csr_matrix, Y: np.ndarray):
    """Every (attribute, threshold, gain) candidate for the rows of ``X``.

    ``Y`` is the one-hot class matrix of those rows. Returns three aligned
    arrays; attributes constant within the rows contribute nothing.
    """
    n, k = Y.shape
    csc = sparse.csc_matrix(X, copy=True)
    csc.eliminate_zeros()
    csc.sort_indices()
    nnz_per_col = np.diff(csc.indptr)
    cols_nz = np.repeat(np.arange(csc.shape[1]), nnz_per_col)
    entry_counts = Y[csc.indices]

    node_counts = Y.sum(axis=0)
    zero_rows = n - nnz_per_col
    presence = csc.copy()
    presence.data[:] = 1.0
    nz_class = np.asarray(presence.T @ Y)
    has_zero = (zero_rows > 0) & (nnz_per_col > 0)
    zero_cols = np.flatnonzero(has_zero)

    cols = np.concatenate([cols_nz, zero_cols])
    values = np.concatenate([csc.data, np.zeros(len(zero_cols))])
    counts = np.vstack([entry_counts, node_counts - nz_class[zero_cols]])
    if not len(cols):
        return np.zeros(0, dtype=np.int64), np.zeros(0), np.zeros(0)

    order = np.lexsort((values, cols))
    cols, values, counts = cols[order], values[order], counts[order]
    # merge equal (column, value) runs
    starts = np.flatnonzero(np.r_[True, (cols[1:] != cols[:-1]) | (values[1:] != values[:-1])])
    cols, values = cols[starts], values[starts]
    counts = np.add.reduceat(counts, starts, axis=0)

    cumulative = np.cumsum(counts, axis=0)
    col_start = np.flatnonzero(np.r_[True, cols[1:] != cols[:-1]])
    before = np.r_[np.zeros((1, k)), cumulative[col_start[1:] - 1]]
    offsets = np.repeat(before, np.diff(np.r_[col_start, len(cols)]), axis=0)
    left = cumulative - offsets

    # a candidate sits between a group and the next group of the same column
    cut = np.flatnonzero(cols[:-1] == cols[1:])
    left = left[cut]
    right = node_counts - left
    n_left = left.sum(axis=1)
    parent = _entropy_rows(node_counts[np.newaxis, :])[0]
    gains = parent - (n_left / n) * _entropy_rows(left) - ((n - n_left) / n) * _entropy_rows(right)
    thresholds = (values[cut] + values[cut + 1]) / 2.0
    return cols[cut], thresholds, gains


def best_split(X: sparse.csr_matrix, Y: np.ndarray) -> Split | None:
    """Highest-gain split; near-ties go to the lowest attribute, then the lowest threshold."""
    attributes, thresholds, gains = split_candidates(X, Y)
    if not len(gains):
        return None
    top = gains.max()
    near = np.flatnonzero(gains >= top - GAIN_EPS)
    pick = near[np.lexsort((thresholds[near], attributes[near]))[0]]
    return Split(int(attributes[pick]), float(thresholds[pick]), float(gains[pick]))


@dataclass(frozen=True, eq=False)
class TreeModel(TrainedModel):
    """Flat pre-order node arrays; ``attribute == -1`` marks a leaf."""

    min_leaf: int
    attribute: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    support: np.ndarray
    distribution: np.ndarray   # (nodes, k)

    @property
    def node_count(self) -> int:
        return len(self.attribute)

    def apply(self, X: sparse.csr_matrix) -> np.ndarray:
        """Leaf id reached by each row."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.attribute[node] != LEAF)
        while active.size:
            feats = self.attribute[node[active]]
            vals = np.asarray(X[active, feats]).ravel()
            go_left = vals <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])
            active = active[self.attribute[node[active]] != LEAF]
        return node

    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        return self.distribution[self.apply(X)]

    def to_params(self) -> dict[str, Any]:
        def node_json(i: int) -> dict[str, Any]:
            if self.attribute[i] == LEAF:
                return {"support": int(self.support[i]), "distribution": self.distribution[i].tolist()}
            return {"attribute": int(self.attribute[i]), "threshold": float(self.threshold[i]),
                    "support": int(self.support[i]), "distribution": self.distribution[i].tolist(),
                    "left": node_json(int(self.left[i])), "right": node_json(int(self.right[i]))}

        return {"min_leaf": self.min_leaf, "root": node_json(0)}

    @classmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "TreeModel":
        builder = _NodeArrays(len(labels))
        stack = [(params["root"], None, None)]
        while stack:
            node, parent, side = stack.pop()
            i = builder.add(node.get("attribute", LEAF), node.get("threshold", 0.0),
                            node["support"], np.asarray(node["distribution"], dtype=np.float64))
            builder.link(parent, side, i)
            if "attribute" in node:
                stack.append((node["right"], i, "right"))
                stack.append((node["left"], i, "left"))
        return builder.build(labels, n_features, int(params["min_leaf"]))


class _NodeArrays:
    def __init__(self, k: int):
        self.k = k
        self.attribute, self.threshold, self.support, self.distribution = [], [], [], []
        self.left, self.right = [], []

    def add(self, attribute: int, threshold: float, support: int, distribution: np.ndarray) -> int:
        self.attribute.append(attribute)
        self.threshold.append(threshold)
        self.support.append(support)
        self.distribution.append(distribution)
        self.left.append(LEAF)
        self.right.append(LEAF)
        return len(self.attribute) - 1

    def link(self, parent: int | None, side: str | None, child: int):
        if parent is not None:
            (self.left if side == "left" else self.right)[parent] = child

    def build(self, labels: Sequence[str], n_features: int, min_leaf: int) -> TreeModel:
        return TreeModel(tuple(labels), n_features, min_leaf,
                         np.asarray(self.attribute, dtype=np.int64),
                         np.asarray(self.threshold, dtype=np.float64),
                         np.asarray(self.left, dtype=np.int64),
                         np.asarray(self.right, dtype=np.int64),
                         np.asarray(self.support, dtype=np.int64),
                         np.asarray(self.distribution, dtype=np.float64).reshape(-1, self.k))


@register("DecisionTree", TreeModel)
def fit_tree(spec: TreeSpec, X: sparse.csr_matrix, y: np.ndarray,
             labels: tuple[str, ...], seed: int | None = None) -> TreeModel:
    k = len(labels)
    Y = one_hot(y, k)
    X = sparse.csr_matrix(X)
    builder = _NodeArrays(k)
    # pre-order: the left subtree is finished before the right one starts
    stack = [(np.arange(X.shape[0]), None, None)]
    while stack:
        rows, parent, side = stack.pop()
        counts = Y[rows].sum(axis=0)
        split = None
        if len(rows) >= spec.min_leaf and np.count_nonzero(counts) > 1:
            split = best_split(X[rows], Y[rows])
            if split is not None and split.gain <= GAIN_EPS:
                split = None
        node = builder.add(LEAF if split is None else split.attribute,
                           0.0 if split is None else split.threshold,
                           len(rows), counts / len(rows))
        builder.link(parent, side, node)
        if split is not None:
            values = X[rows, split.attribute].toarray().ravel()
            mask = values <= split.threshold
            stack.append((rows[~mask], node, "right"))
            stack.append((rows[mask], node, "left"))
    model = builder.build(labels, X.shape[1], spec.min_leaf)
    logger.debug("tree: %d nodes", model.node_count)
    return model


def train_tree(ds: Dataset, min_leaf: int = 2) -> TreeModel:
    X, y, labels = dataset_matrix(ds)
    return fit_classifier(TreeSpec(min_leaf=min_leaf), X, y, labels)
