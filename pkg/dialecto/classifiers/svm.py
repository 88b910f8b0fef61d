"""Linear soft-margin SVM, one machine per class pair, trained by SMO.

Each pairwise dual is solved with the maximal-violating-pair working set:
at every step the pair (i, j) with the largest KKT violation is moved
analytically until the violation drops below ``tol``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Sequence

import numpy as np
from scipy import sparse

from dialecto.arff_io import Dataset
from dialecto.classifiers.base import TrainedModel, dataset_matrix, fit_classifier, register
from dialecto.classifiers.specs import SvmSpec
from dialecto.errors import ModelError

logger = logging.getLogger(__name__)

DENSE_GRAM_LIMIT = 2000


@dataclass(frozen=True)
class PairwiseMachine:
    """Decision ``x.w + b``: positive votes for ``first``, otherwise ``second``."""

    first: int
    second: int
    w: np.ndarray
    b: float


class _Gram:
    """Kernel columns of a linear kernel, precomputed for small problems."""

    def __init__(self, X: sparse.csr_matrix):
        self.X = X
        self.diag = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        self.full = (X @ X.T).toarray() if X.shape[0] <= DENSE_GRAM_LIMIT else None

    def column(self, i: int) -> np.ndarray:
        if self.full is not None:
            return self.full[:, i]
        return np.asarray((self.X @ self.X[i].T).todense()).ravel()


def smo(X: sparse.csr_matrix, signs: np.ndarray, C: float, tol: float,
        max_iter: int) -> tuple[np.ndarray, float]:
    """Solve one binary dual; returns (alpha, b) with ``signs`` in {+1, -1}."""
    n = len(signs)
    gram = _Gram(X)
    alpha = np.zeros(n)
    grad = np.ones(n)
    # feasible moves: y*alpha may rise below upper, fall above lower
    upper = np.where(signs > 0, C, 0.0)
    lower = np.where(signs > 0, 0.0, -C)
    for _ in range(max_iter):
        ya = signs * alpha
        yg = signs * grad
        can_rise = ya < upper
        can_fall = ya > lower
        if not can_rise.any() or not can_fall.any():
            break
        i = int(np.argmax(np.where(can_rise, yg, -np.inf)))
        j = int(np.argmin(np.where(can_fall, yg, np.inf)))
        gap = yg[i] - yg[j]
        if gap <= tol:
            break
        Ki, Kj = gram.column(i), gram.column(j)
        curvature = max(gram.diag[i] + gram.diag[j] - 2.0 * Ki[j], 1e-12)
        room_i, room_j = upper[i] - ya[i], ya[j] - lower[j]
        step = min(room_i, room_j, gap / curvature)
        grad += step * signs * (Kj - Ki)
        alpha[i] += signs[i] * step
        alpha[j] -= signs[j] * step
        # clip onto the box
        if step == room_i:
            alpha[i] = C if signs[i] > 0 else 0.0
        if step == room_j:
            alpha[j] = 0.0 if signs[j] > 0 else C
    else:
        logger.warning("SMO stopped at max_iter=%d before reaching tolerance %g", max_iter, tol)
    yg = signs * grad
    ya = signs * alpha
    free = (alpha > 0) & (alpha < C)
    if free.any():
        b = float(yg[free].mean())
    else:
        rise = yg[ya < upper]
        fall = yg[ya > lower]
        top = rise.max() if rise.size else fall.min()
        bottom = fall.min() if fall.size else top
        b = float((top + bottom) / 2.0)
    return alpha, b


def _train_pair(X: sparse.csr_matrix, y: np.ndarray, first: int, second: int,
                spec: SvmSpec) -> PairwiseMachine:
    rows = np.flatnonzero((y == first) | (y == second))
    d = X.shape[1]
    has_first = bool(np.any(y[rows] == first))
    has_second = bool(np.any(y[rows] == second))
    if not (has_first and has_second):
        # one side unseen in training: constant vote for the seen class
        b = 1.0 if has_first else -1.0 if has_second else 0.0
        return PairwiseMachine(first, second, np.zeros(d), b)
    sub = X[rows]
    signs = np.where(y[rows] == first, 1.0, -1.0)
    alpha, b = smo(sub, signs, spec.C, spec.tol, spec.max_iter)
    w = np.asarray(sub.T @ (alpha * signs)).ravel()
    return PairwiseMachine(first, second, w, b)


@dataclass(frozen=True, eq=False)
class SvmModel(TrainedModel):
    C: float
    machines: tuple[PairwiseMachine, ...]

    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        votes = np.zeros((X.shape[0], len(self.labels)))
        rows = np.arange(X.shape[0])
        for m in self.machines:
            decision = np.asarray(X @ m.w).ravel() + m.b
            winner = np.where(decision >= 0, m.first, m.second)
            votes[rows, winner] += 1.0
        return votes / len(self.machines)

    def to_params(self) -> dict[str, Any]:
        return {"C": self.C, "machines": [
            {"pair": [m.first, m.second], "w": m.w.tolist(), "b": m.b} for m in self.machines
        ]}

    @classmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "SvmModel":
        machines = tuple(
            PairwiseMachine(int(m["pair"][0]), int(m["pair"][1]),
                            np.asarray(m["w"], dtype=np.float64).reshape(n_features), float(m["b"]))
            for m in params["machines"]
        )
        return cls(tuple(labels), n_features, float(params["C"]), machines)


@register("LinearSVM", SvmModel)
def fit_svm(spec: SvmSpec, X: sparse.csr_matrix, y: np.ndarray,
            labels: tuple[str, ...], seed: int | None = None) -> SvmModel:
    if len(labels) < 2:
        raise ModelError("an SVM needs at least two classes")
    machines = tuple(_train_pair(X, y, a, b, spec) for a, b in combinations(range(len(labels)), 2))
    return SvmModel(labels, X.shape[1], spec.C, machines)


def train_svm(ds: Dataset, C: float = 1.0) -> SvmModel:
    X, y, labels = dataset_matrix(ds)
    return fit_classifier(SvmSpec(C=C), X, y, labels)
