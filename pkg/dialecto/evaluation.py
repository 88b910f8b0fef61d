"""Test protocols and the (feature set × classifier × protocol) accuracy grid.

Feature filters are fitted on the training part of every fold or split and
applied to the held-out part. With ``paper_mode`` they are fitted once on the
whole dataset before any splitting, as in the original toolkit workflow.
"""

from __future__ import annotations

import json
import logging
import math
import warnings
from dataclasses import dataclass, field
from typing import Annotated, Literal, Sequence, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt
from scipy import sparse
from sklearn.metrics import confusion_matrix
from sklearn.model_selection import KFold, StratifiedKFold, train_test_split
from tqdm import tqdm

from dialecto.arff_io import Dataset
from dialecto.classifiers import ClassifierSpec, fit_classifier
from dialecto.errors import DatasetError, DialectoError, EvaluationError
from dialecto.features import FeaturePipeline, FeatureSpec, Stoplist, text_and_class

logger = logging.getLogger(__name__)


class _Protocol(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class TrainingSetProtocol(_Protocol):
    kind: Literal["training_set"] = "training_set"

    @property
    def name(self) -> str:
        return "Training set"


class CrossValidationProtocol(_Protocol):
    kind: Literal["cross_validation"] = "cross_validation"
    folds: int = Field(default=10, ge=2)
    seed: NonNegativeInt = 1

    @property
    def name(self) -> str:
        return f"{self.folds}-fold CV"


class PercentageSplitProtocol(_Protocol):
    kind: Literal["percentage_split"] = "percentage_split"
    train_fraction: float = Field(default=0.6, gt=0.0, lt=1.0)
    seed: NonNegativeInt = 1

    @property
    def name(self) -> str:
        train = round(self.train_fraction * 100)
        return f"{train}/{100 - train} split"


Protocol = Annotated[
    Union[TrainingSetProtocol, CrossValidationProtocol, PercentageSplitProtocol],
    Field(discriminator="kind"),
]

DEFAULT_PROTOCOLS = (TrainingSetProtocol(), CrossValidationProtocol(), PercentageSplitProtocol())


@dataclass(frozen=True, eq=False)
class EvaluationReport:
    classifier: str
    features: str
    protocol: str
    labels: tuple[str, ...]
    confusion: np.ndarray           # rows: actual class, columns: predicted class
    n_instances: int
    paper_mode: bool = False
    predictions: np.ndarray | None = field(default=None, repr=False)   # -1 where untested

    @property
    def n_tested(self) -> int:
        return int(self.confusion.sum())

    @property
    def accuracy(self) -> float:
        return 100.0 * float(np.trace(self.confusion)) / self.n_tested

    @property
    def majority_rate(self) -> float:
        """Share (%) of the most frequent class among the tested instances."""
        return 100.0 * float(self.confusion.sum(axis=1).max()) / self.n_tested

    def to_dict(self) -> dict:
        return {
            "classifier": self.classifier,
            "features": self.features,
            "protocol": self.protocol,
            "accuracy": self.accuracy,
            "majority_rate": self.majority_rate,
            "n_instances": self.n_instances,
            "n_tested": self.n_tested,
            "labels": list(self.labels),
            "confusion": self.confusion.tolist(),
        }


@dataclass(frozen=True)
class _Inputs:
    """Either raw texts (features fitted per split) or a ready feature matrix."""

    texts: list[str] | None
    X: sparse.csr_matrix | None
    y: np.ndarray
    labels: tuple[str, ...]
    features: FeatureSpec | None
    stoplist: Stoplist | None

    def __len__(self) -> int:
        return len(self.y)

    def split(self, train: np.ndarray, test: np.ndarray):
        if self.X is not None:
            return self.X[train], self.X[test]
        pipeline = FeaturePipeline(self.features, self.stoplist)
        X_train = pipeline.fit_transform([self.texts[i] for i in train], self.y[train], len(self.labels))
        return X_train, pipeline.transform([self.texts[i] for i in test])


def _prepare(ds: Dataset, features: FeatureSpec | None, paper_mode: bool,
             stoplist: Stoplist | None) -> _Inputs:
    if not len(ds):
        raise EvaluationError("cannot evaluate on an empty dataset")
    if features is None:
        try:
            X, y = ds.numeric_matrix()
        except DatasetError as exc:
            raise EvaluationError(f"{exc}; pass a feature spec for text datasets") from exc
        return _Inputs(None, X, y, ds.labels, None, stoplist)
    texts, y = text_and_class(ds)
    if paper_mode:
        X = FeaturePipeline(features, stoplist).fit_transform(texts, y, len(ds.labels))
        return _Inputs(None, X, y, ds.labels, features, stoplist)
    return _Inputs(texts, None, y, ds.labels, features, stoplist)


def _feature_name(features: FeatureSpec | None) -> str:
    return features.name if features is not None else "as given"


def _run_folds(classifier: ClassifierSpec, inputs: _Inputs, folds: Sequence[tuple[np.ndarray, np.ndarray]],
               model_seed: int | None) -> tuple[np.ndarray, np.ndarray]:
    """Pooled confusion matrix and per-instance predictions over ``folds``."""
    k = len(inputs.labels)
    predictions = np.full(len(inputs), -1, dtype=np.int64)
    for train, test in folds:
        X_train, X_test = inputs.split(train, test)
        model = fit_classifier(classifier, X_train, inputs.y[train], inputs.labels, model_seed)
        predictions[test] = model.predict_indices(X_test)
    tested = predictions >= 0
    confusion = confusion_matrix(inputs.y[tested], predictions[tested], labels=np.arange(k))
    return confusion, predictions


def _report(classifier, features, protocol_name: str, inputs: _Inputs, confusion, predictions,
            paper_mode: bool) -> EvaluationReport:
    return EvaluationReport(classifier.name, _feature_name(features), protocol_name, inputs.labels,
                            confusion, len(inputs), paper_mode, predictions)


def cv_folds(y: np.ndarray, k: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified shuffled k-fold partition; unstratified when no class can fill the folds."""
    n = len(y)
    if not 2 <= k <= n:
        raise EvaluationError(f"cross-validation needs 2 <= k <= N, got k={k}, N={n}")
    placeholder = np.zeros(n)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            folds = list(StratifiedKFold(n_splits=k, shuffle=True, random_state=seed).split(placeholder, y))
        for warning in caught:
            logger.warning("Stratification: %s", warning.message)
    except ValueError as exc:
        logger.warning("Cannot stratify %d folds (%s); using unstratified folds", k, exc)
        folds = list(KFold(n_splits=k, shuffle=True, random_state=seed).split(placeholder))
    return folds


def split_indices(y: np.ndarray, train_fraction: float, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Seeded stratified shuffle; the first floor(fraction * N) instances train."""
    n = len(y)
    n_train = math.floor(train_fraction * n + 1e-9)
    if n_train == 0 or n_train == n:
        raise EvaluationError(f"a {train_fraction:g} split of {n} instances leaves one side empty")
    indices = np.arange(n)
    try:
        train, test = train_test_split(indices, train_size=n_train, test_size=n - n_train,
                                       stratify=y, random_state=seed)
    except ValueError as exc:
        logger.warning("Cannot stratify the split (%s); using an unstratified shuffle", exc)
        train, test = train_test_split(indices, train_size=n_train, test_size=n - n_train,
                                       random_state=seed)
    return train, test


def evaluate_training_set(classifier: ClassifierSpec, ds: Dataset, features: FeatureSpec | None = None, *,
                          model_seed: int | None = None, paper_mode: bool = False,
                          stoplist: Stoplist | None = None) -> EvaluationReport:
    """Train on every instance and test on the same instances."""
    inputs = _prepare(ds, features, paper_mode, stoplist)
    everything = np.arange(len(inputs))
    confusion, predictions = _run_folds(classifier, inputs, [(everything, everything)], model_seed)
    return _report(classifier, features, TrainingSetProtocol().name, inputs, confusion, predictions, paper_mode)


def evaluate_cross_validation(classifier: ClassifierSpec, features: FeatureSpec | None, ds: Dataset,
                              k: int = 10, seed: int = 1, *, model_seed: int | None = None,
                              paper_mode: bool = False, stoplist: Stoplist | None = None) -> EvaluationReport:
    inputs = _prepare(ds, features, paper_mode, stoplist)
    folds = cv_folds(inputs.y, k, seed)
    confusion, predictions = _run_folds(classifier, inputs, folds, model_seed)
    return _report(classifier, features, CrossValidationProtocol(folds=k).name, inputs,
                   confusion, predictions, paper_mode)


def evaluate_percentage_split(classifier: ClassifierSpec, features: FeatureSpec | None, ds: Dataset,
                              train_fraction: float = 0.6, seed: int = 1, *, model_seed: int | None = None,
                              paper_mode: bool = False, stoplist: Stoplist | None = None) -> EvaluationReport:
    inputs = _prepare(ds, features, paper_mode, stoplist)
    train, test = split_indices(inputs.y, train_fraction, seed)
    confusion, predictions = _run_folds(classifier, inputs, [(train, test)], model_seed)
    name = PercentageSplitProtocol(train_fraction=train_fraction).name
    return _report(classifier, features, name, inputs, confusion, predictions, paper_mode)


def evaluate(protocol: Protocol, classifier: ClassifierSpec, features: FeatureSpec | None, ds: Dataset, *,
             split_seed: int | None = None, model_seed: int | None = None, paper_mode: bool = False,
             stoplist: Stoplist | None = None) -> EvaluationReport:
    """Run one protocol; ``split_seed`` overrides the protocol's own seed."""
    options = dict(model_seed=model_seed, paper_mode=paper_mode, stoplist=stoplist)
    if isinstance(protocol, TrainingSetProtocol):
        return evaluate_training_set(classifier, ds, features, **options)
    seed = protocol.seed if split_seed is None else split_seed
    if isinstance(protocol, CrossValidationProtocol):
        return evaluate_cross_validation(classifier, features, ds, protocol.folds, seed, **options)
    return evaluate_percentage_split(classifier, features, ds, protocol.train_fraction, seed, **options)


# ---------------------------------------------------------------------------
# grid
# ---------------------------------------------------------------------------

def derive_seed(*entropy: int) -> int:
    """Independent 32-bit seed for one coordinate of the grid."""
    return int(np.random.SeedSequence([int(e) for e in entropy]).generate_state(1)[0])


@dataclass(frozen=True)
class GridCell:
    features: str
    classifier: str
    protocol: str
    report: EvaluationReport | None = None
    error: str | None = None

    @property
    def accuracy(self) -> float:
        return math.nan if self.report is None else self.report.accuracy


def _run_cell(ds, f_idx, feature, c_idx, classifier, p_idx, protocol, seed, paper_mode, stoplist) -> GridCell:
    split_seed = derive_seed(seed, getattr(protocol, "seed", 0), p_idx)
    model_seed = derive_seed(seed, getattr(classifier, "seed", 0), f_idx, c_idx, p_idx)
    try:
        report = evaluate(protocol, classifier, feature, ds, split_seed=split_seed, model_seed=model_seed,
                          paper_mode=paper_mode, stoplist=stoplist)
    except DialectoError as exc:
        return GridCell(feature.name, classifier.name, protocol.name, error=str(exc))
    return GridCell(feature.name, classifier.name, protocol.name, report=report)


def _unique_names(axis: str, names: Sequence[str]):
    if not names:
        raise EvaluationError(f"the {axis} axis is empty")
    if len(set(names)) != len(names):
        raise EvaluationError(f"duplicate {axis} names: {list(names)}")


def _two_decimals(value: float) -> str:
    return f"{value:.2f}"


def _number(value: float):
    return None if math.isnan(value) else value


@dataclass(frozen=True)
class GridResult:
    feature_names: tuple[str, ...]
    classifier_names: tuple[str, ...]
    protocol_names: tuple[str, ...]
    cells: tuple[GridCell, ...]      # feature-major, then classifier, then protocol
    seed: int = 0
    paper_mode: bool = False
    title: str = ""

    def cell(self, features: str, classifier: str, protocol: str) -> GridCell:
        for c in self.cells:
            if (c.features, c.classifier, c.protocol) == (features, classifier, protocol):
                return c
        raise KeyError((features, classifier, protocol))

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            "features": [c.features for c in self.cells],
            "classifier": [c.classifier for c in self.cells],
            "protocol": [c.protocol for c in self.cells],
            "accuracy": [c.accuracy for c in self.cells],
            "majority_rate": [math.nan if c.report is None else c.report.majority_rate for c in self.cells],
        })

    @property
    def excluded(self) -> list[GridCell]:
        return [c for c in self.cells if c.error is not None]

    def classifier_averages(self) -> pd.Series:
        """Mean accuracy per classifier over every feature set and protocol."""
        return self.frame().groupby("classifier", sort=False)["accuracy"].mean().reindex(self.classifier_names)

    def feature_averages(self) -> pd.Series:
        """Mean accuracy per feature set over every classifier and protocol."""
        return self.frame().groupby("features", sort=False)["accuracy"].mean().reindex(self.feature_names)

    def best_feature(self) -> str | None:
        averages = self.feature_averages()
        if averages.isna().all():
            return None
        # idxmax keeps the first of equal maxima
        return str(averages.idxmax())

    def protocol_table(self, features: str | None = None) -> pd.DataFrame:
        """Classifier × protocol accuracies for one feature set, plus the majority baseline row."""
        features = features or self.best_feature() or self.feature_names[0]
        frame = self.frame()
        frame = frame[frame["features"] == features]
        table = frame.pivot(index="classifier", columns="protocol", values="accuracy")
        table = table.reindex(index=list(self.classifier_names), columns=list(self.protocol_names))
        baseline = frame.groupby("protocol", sort=False)["majority_rate"].mean().reindex(self.protocol_names)
        table.loc["Majority class"] = baseline
        return table

    def render_tables(self) -> str:
        mode = "filters fitted on the whole dataset (paper mode)" if self.paper_mode \
            else "filters fitted inside each fold"
        header = f"{self.title} - {mode}" if self.title else mode
        best = self.best_feature() or self.feature_names[0]
        blocks = [
            header,
            "",
            "Average accuracy of classifiers (%)",
            self.classifier_averages().rename("Accuracy").to_frame().to_string(float_format=_two_decimals, na_rep="n/a"),
            "",
            "Average accuracy by feature set (%)",
            self.feature_averages().rename("Accuracy").to_frame().to_string(float_format=_two_decimals, na_rep="n/a"),
            "",
            f"Accuracy of classifiers using {best} (%)",
            self.protocol_table(best).to_string(float_format=_two_decimals, na_rep="n/a"),
        ]
        if self.excluded:
            blocks += ["", f"{len(self.excluded)} cell(s) failed and were excluded from the averages:"]
            blocks += [f"  {c.features} / {c.classifier} / {c.protocol}: {c.error}" for c in self.excluded]
        return "\n".join(blocks) + "\n"

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "seed": self.seed,
            "paper_mode": self.paper_mode,
            "features": list(self.feature_names),
            "classifiers": list(self.classifier_names),
            "protocols": list(self.protocol_names),
            "cells": [
                {"features": c.features, "classifier": c.classifier, "protocol": c.protocol, "error": c.error,
                 **({} if c.report is None else {k: v for k, v in c.report.to_dict().items()
                                                 if k not in ("classifier", "features", "protocol")})}
                for c in self.cells
            ],
            "classifier_averages": {k: _number(v) for k, v in self.classifier_averages().items()},
            "feature_averages": {k: _number(v) for k, v in self.feature_averages().items()},
            "best_feature": self.best_feature(),
            "excluded": [[c.features, c.classifier, c.protocol] for c in self.excluded],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2, allow_nan=False)


def run_grid(ds: Dataset, feature_specs: Sequence[FeatureSpec], classifier_specs: Sequence[ClassifierSpec],
             protocols: Sequence[Protocol], *, seed: int = 0, paper_mode: bool = False,
             stoplist: Stoplist | None = None, n_jobs: int = 1, progress: bool = False,
             title: str = "") -> GridResult:
    """Evaluate every (feature set, classifier, protocol) combination."""
    if not len(ds):
        raise EvaluationError("cannot evaluate on an empty dataset")
    _unique_names("feature", [f.name for f in feature_specs])
    _unique_names("classifier", [c.name for c in classifier_specs])
    _unique_names("protocol", [p.name for p in protocols])
    tasks = [
        delayed(_run_cell)(ds, f_idx, feature, c_idx, classifier, p_idx, protocol, seed, paper_mode, stoplist)
        for f_idx, feature in enumerate(feature_specs)
        for c_idx, classifier in enumerate(classifier_specs)
        for p_idx, protocol in enumerate(protocols)
    ]
    logger.info("Evaluating %d cells on %d instances", len(tasks), len(ds))
    results = Parallel(n_jobs=n_jobs, return_as="generator")(tasks)
    cells = tuple(tqdm(results, total=len(tasks), desc=title or "grid", disable=not progress))
    for cell in cells:
        if cell.error is not None:
            logger.warning("%s / %s / %s failed: %s", cell.features, cell.classifier, cell.protocol, cell.error)
    return GridResult(
        tuple(f.name for f in feature_specs),
        tuple(c.name for c in classifier_specs),
        tuple(p.name for p in protocols),
        cells, seed, paper_mode, title,
    )
