"""Common contract of trained models and the variant registry."""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, ClassVar, Sequence

import numpy as np
from scipy import sparse

from dialecto.arff_io import Dataset
from dialecto.errors import DatasetError, ModelError

logger = logging.getLogger(__name__)

_TRAINERS: dict[str, Callable[..., "TrainedModel"]] = {}
MODEL_TYPES: dict[str, type["TrainedModel"]] = {}


def as_matrix(X, n_features: int | None = None) -> sparse.csr_matrix:
    """Finite float64 CSR view of ``X``, checked against the expected width."""
    X = sparse.csr_matrix(X, dtype=np.float64)
    if n_features is not None and X.shape[1] != n_features:
        raise ModelError(f"expected {n_features} attributes, got {X.shape[1]}")
    if not np.all(np.isfinite(X.data)):
        raise ModelError("feature values must be finite")
    return X


@dataclass(frozen=True, eq=False)
class TrainedModel(ABC):
    labels: tuple[str, ...]
    n_features: int

    variant: ClassVar[str]

    def predict_proba(self, X) -> np.ndarray:
        """Class distributions, one row per instance."""
        return self._proba(as_matrix(X, self.n_features))

    def predict_indices(self, X) -> np.ndarray:
        # argmax returns the first maximum: ties go to the lowest class index
        return np.argmax(self.predict_proba(X), axis=1)

    @abstractmethod
    def _proba(self, X: sparse.csr_matrix) -> np.ndarray:
        ...

    @abstractmethod
    def to_params(self) -> dict[str, Any]:
        ...

    @classmethod
    @abstractmethod
    def from_params(cls, labels: Sequence[str], n_features: int, params: dict[str, Any]) -> "TrainedModel":
        ...


def register(variant: str, model_type: type[TrainedModel]):
    """Decorator binding a trainer function and its model type to a variant tag."""

    def wrap(trainer):
        model_type.variant = variant
        _TRAINERS[variant] = trainer
        MODEL_TYPES[variant] = model_type
        return trainer

    return wrap


def fit_classifier(spec, X, y: np.ndarray, labels: Sequence[str], seed: int | None = None) -> TrainedModel:
    """Train the family selected by ``spec.variant`` on a feature matrix."""
    X = as_matrix(X)
    y = np.asarray(y, dtype=np.int64)
    labels = tuple(labels)
    if X.shape[0] == 0:
        raise ModelError("cannot train on an empty dataset")
    if len(y) != X.shape[0]:
        raise ModelError(f"{X.shape[0]} instances but {len(y)} class values")
    if not labels:
        raise ModelError("label set is empty")
    if y.min() < 0 or y.max() >= len(labels):
        raise ModelError("class values outside the label set")
    try:
        trainer = _TRAINERS[spec.variant]
    except KeyError:
        raise ModelError(f"unknown classifier variant {spec.variant!r}") from None
    logger.debug("training %s on %d x %d", spec.name, *X.shape)
    return trainer(spec, X, y, labels, seed)


def dataset_matrix(ds: Dataset) -> tuple[sparse.csr_matrix, np.ndarray, tuple[str, ...]]:
    try:
        X, y = ds.numeric_matrix()
    except DatasetError as exc:
        raise ModelError(str(exc)) from exc
    return X, y, ds.labels


def predict(model: TrainedModel, instance) -> tuple[str, np.ndarray]:
    """Label and class distribution for a single instance."""
    row = sparse.csr_matrix(instance, dtype=np.float64) if sparse.issparse(instance) \
        else np.asarray(instance, dtype=np.float64).reshape(1, -1)
    if row.shape[0] != 1:
        raise ModelError("predict takes exactly one instance")
    distribution = model.predict_proba(row)[0]
    return model.labels[int(np.argmax(distribution))], distribution
