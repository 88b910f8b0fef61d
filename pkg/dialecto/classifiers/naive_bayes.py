"""Multinomial naive Bayes with Laplace smoothing."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy import sparse
from scipy.special import logsumexp

from dialecto.arff_io import Dataset
from dialecto.classifiers.base import TrainedModel, dataset_matrix, fit_classifier, register
from dialecto.classifiers.specs import NaiveBayesSpec
from dialecto.errors import ModelError
from dialecto.features import one_hot


@dataclass(frozen=True, eq=False)
class NaiveBayesModel(TrainedModel):
    alpha: float
    log_priors: np.ndarray        # (k,), -inf for classes absent from training
    log_likelihoods: np.ndarray   # (k, V)

    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        if X.nnz and X.data.min() < 0:
            raise ModelError("multinomial naive Bayes needs nonnegative counts")
        joint = self.log_priors + np.asarray(X @ self.log_likelihoods.T)
        return np.exp(joint - logsumexp(joint, axis=1, keepdims=True))

    def to_params(self) -> dict[str, Any]:
        priors = [None if np.isneginf(p) else float(p) for p in self.log_priors]
        return {"alpha": self.alpha, "log_priors": priors,
                "log_likelihoods": self.log_likelihoods.tolist()}

    @classmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "NaiveBayesModel":
        priors = np.array([-np.inf if p is None else p for p in params["log_priors"]], dtype=np.float64)
        likelihoods = np.asarray(params["log_likelihoods"], dtype=np.float64).reshape(len(labels), n_features)
        return cls(tuple(labels), n_features, float(params["alpha"]), priors, likelihoods)


@register("MultinomialNB", NaiveBayesModel)
def fit_naive_bayes(spec: NaiveBayesSpec, X: sparse.csr_matrix, y: np.ndarray,
                    labels: tuple[str, ...], seed: int | None = None) -> NaiveBayesModel:
    if X.nnz and X.data.min() < 0:
        raise ModelError("multinomial naive Bayes needs nonnegative counts")
    k, V = len(labels), X.shape[1]
    Y = one_hot(y, k)
    class_counts = Y.sum(axis=0)
    word_counts = np.asarray((X.T @ Y).T)   # (k, V)
    with np.errstate(divide="ignore"):
        log_priors = np.log(class_counts / len(y))
    totals = word_counts.sum(axis=1, keepdims=True)
    log_likelihoods = np.log(word_counts + spec.alpha) - np.log(totals + spec.alpha * V)
    return NaiveBayesModel(labels, V, spec.alpha, log_priors, log_likelihoods)


def train_mnb(ds: Dataset, alpha: float = 1.0) -> NaiveBayesModel:
    X, y, labels = dataset_matrix(ds)
    return fit_classifier(NaiveBayesSpec(alpha=alpha), X, y, labels)
