"""Classifier hyperparameters, one frozen model per family.

The ``variant`` tag selects the family when specs are read from a config
file; ``name`` is what reports and tables show.
"""

from __future__ import annotations

from typing import Annotated, Literal, Union

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveFloat, PositiveInt


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


class NaiveBayesSpec(_Spec):
    variant: Literal["MultinomialNB"] = "MultinomialNB"
    name: str = "MultinomialNB"
    alpha: PositiveFloat = 1.0


class LogisticSpec(_Spec):
    variant: Literal["Logistic"] = "Logistic"
    name: str = "Logistic"
    ridge: float = Field(default=1e-8, ge=0.0)
    max_iter: PositiveInt = 200
    tol: PositiveFloat = 1e-6


class SvmSpec(_Spec):
    variant: Literal["LinearSVM"] = "LinearSVM"
    name: str = "SMO"
    C: PositiveFloat = 1.0
    tol: PositiveFloat = 1e-3
    max_iter: PositiveInt = 100_000


class TreeSpec(_Spec):
    variant: Literal["DecisionTree"] = "DecisionTree"
    name: str = "J48"
    min_leaf: PositiveInt = 2


BaseLearnerSpec = Annotated[
    Union[NaiveBayesSpec, LogisticSpec, SvmSpec, TreeSpec],
    Field(discriminator="variant"),
]


class BaggingSpec(_Spec):
    variant: Literal["Bagging"] = "Bagging"
    name: str = "Bagging"
    size: PositiveInt = 10
    seed: NonNegativeInt = 1
    base: BaseLearnerSpec = TreeSpec()


ClassifierSpec = Annotated[
    Union[NaiveBayesSpec, LogisticSpec, SvmSpec, BaggingSpec, TreeSpec],
    Field(discriminator="variant"),
]

DEFAULT_CLASSIFIER_SPECS = (
    NaiveBayesSpec(),
    LogisticSpec(),
    SvmSpec(),
    BaggingSpec(),
    TreeSpec(),
)
