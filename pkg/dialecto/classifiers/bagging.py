"""Bootstrap aggregation over any single-model family."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from scipy import sparse

from dialecto.arff_io import Dataset
from dialecto.classifiers.base import MODEL_TYPES, TrainedModel, dataset_matrix, fit_classifier, register
from dialecto.classifiers.specs import BaggingSpec, TreeSpec


def bootstrap_indices(n: int, size: int, seed: int) -> list[np.ndarray]:
    """All resamples, drawn up front from one seeded stream."""
    rng = np.random.default_rng(seed)
    return [rng.integers(0, n, size=n) for _ in range(size)]


@dataclass(frozen=True, eq=False)
class BaggingModel(TrainedModel):
    seed: int
    members: tuple[TrainedModel, ...]

    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        return np.mean([m._proba(X) for m in self.members], axis=0)

    def to_params(self) -> dict[str, Any]:
        return {"seed": self.seed, "members": [
            {"variant": m.variant, "params": m.to_params()} for m in self.members
        ]}

    @classmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "BaggingModel":
        members = tuple(
            MODEL_TYPES[m["variant"]].from_params(labels, n_features, m["params"]) for m in params["members"]
        )
        return cls(tuple(labels), n_features, int(params["seed"]), members)


@register("Bagging", BaggingModel)
def fit_bagging(spec: BaggingSpec, X: sparse.csr_matrix, y: np.ndarray,
                labels: tuple[str, ...], seed: int | None = None) -> BaggingModel:
    seed = spec.seed if seed is None else seed
    resamples = bootstrap_indices(X.shape[0], spec.size, seed)
    members = tuple(fit_classifier(spec.base, X[rows], y[rows], labels) for rows in resamples)
    return BaggingModel(labels, X.shape[1], seed, members)


def train_bagging(ds: Dataset, size: int = 10, seed: int = 1, base=None) -> BaggingModel:
    X, y, labels = dataset_matrix(ds)
    return fit_classifier(BaggingSpec(size=size, seed=seed, base=base or TreeSpec()), X, y, labels)
