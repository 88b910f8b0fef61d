"""Multinomial logistic regression with a ridge penalty.

Minimises the summed negative log-likelihood plus ``ridge * ||W||^2`` by
full-batch gradient descent from zero weights, with a backtracking line
search. The biases are not penalised.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from dialecto.arff_io import Dataset
from dialecto.classifiers.base import TrainedModel, dataset_matrix, fit_classifier, register
from dialecto.classifiers.specs import LogisticSpec
from dialecto.features import one_hot

logger = logging.getLogger(__name__)

ARMIJO = 0.5


def _scores(W: np.ndarray, b: np.ndarray, X) -> np.ndarray:
    return np.asarray(X @ W) + b


def logistic_loss(W: np.ndarray, b: np.ndarray, X, y: np.ndarray, ridge: float) -> float:
    scores = _scores(W, b, X)
    nll = logsumexp(scores, axis=1) - scores[np.arange(len(y)), y]
    return float(nll.sum() + ridge * np.sum(W * W))


def logistic_gradient(W: np.ndarray, b: np.ndarray, X, y: np.ndarray,
                      ridge: float) -> tuple[np.ndarray, np.ndarray]:
    scores = _scores(W, b, X)
    P = np.exp(scores - logsumexp(scores, axis=1, keepdims=True))
    residual = P - one_hot(y, W.shape[1])
    grad_W = np.asarray(X.T @ residual) + 2.0 * ridge * W
    return grad_W, residual.sum(axis=0)


@dataclass(frozen=True, eq=False)
class LogisticModel(TrainedModel):
    ridge: float
    weights: np.ndarray   # (V, k)
    biases: np.ndarray    # (k,)

    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        scores = _scores(self.weights, self.biases, X)
        return np.exp(scores - logsumexp(scores, axis=1, keepdims=True))

    def to_params(self) -> dict[str, Any]:
        return {"ridge": self.ridge, "weights": self.weights.tolist(), "biases": self.biases.tolist()}

    @classmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "LogisticModel":
        weights = np.asarray(params["weights"], dtype=np.float64).reshape(n_features, len(labels))
        return cls(tuple(labels), n_features, float(params["ridge"]), weights,
                   np.asarray(params["biases"], dtype=np.float64))


@register("Logistic", LogisticModel)
def fit_logistic(spec: LogisticSpec, X: sparse.csr_matrix, y: np.ndarray,
                 labels: tuple[str, ...], seed: int | None = None) -> LogisticModel:
    k, V = len(labels), X.shape[1]
    W, b = np.zeros((V, k)), np.zeros(k)
    loss = logistic_loss(W, b, X, y, spec.ridge)
    step = 1.0
    for iteration in range(spec.max_iter):
        grad_W, grad_b = logistic_gradient(W, b, X, y, spec.ridge)
        grad_sq = float(np.sum(grad_W * grad_W) + np.sum(grad_b * grad_b))
        if np.sqrt(grad_sq) <= spec.tol:
            break
        step *= 2.0
        while True:
            W_new, b_new = W - step * grad_W, b - step * grad_b
            new_loss = logistic_loss(W_new, b_new, X, y, spec.ridge)
            if new_loss <= loss - ARMIJO * step * grad_sq or step < 1e-20:
                break
            step *= 0.5
        converged = loss - new_loss <= spec.tol * max(1.0, abs(loss))
        W, b, loss = W_new, b_new, new_loss
        if converged:
            break
    else:
        logger.debug("logistic: stopped after %d iterations (loss %.6g)", spec.max_iter, loss)
    return LogisticModel(labels, V, spec.ridge, W, b)


def train_logistic(ds: Dataset, ridge: float = 1e-8, max_iter: int = 200, tol: float = 1e-6) -> LogisticModel:
    X, y, labels = dataset_matrix(ds)
    return fit_classifier(LogisticSpec(ridge=ridge, max_iter=max_iter, tol=tol), X, y, labels)
