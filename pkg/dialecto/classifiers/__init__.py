"""The five classifier families behind one train → model → predict contract."""

from dialecto.classifiers.bagging import BaggingModel, fit_bagging, train_bagging
from dialecto.classifiers.base import TrainedModel, fit_classifier, predict
from dialecto.classifiers.inspection import MnbSummary, TreeSummary, inspect_mnb, inspect_tree
from dialecto.classifiers.logistic import LogisticModel, fit_logistic, train_logistic
from dialecto.classifiers.naive_bayes import NaiveBayesModel, fit_naive_bayes, train_mnb
from dialecto.classifiers.serialization import SavedModel, model_from_json, model_to_json
from dialecto.classifiers.specs import (
    DEFAULT_CLASSIFIER_SPECS,
    BaggingSpec,
    ClassifierSpec,
    LogisticSpec,
    NaiveBayesSpec,
    SvmSpec,
    TreeSpec,
)
from dialecto.classifiers.svm import SvmModel, fit_svm, train_svm
from dialecto.classifiers.tree import TreeModel, fit_tree, train_tree

__all__ = [
    "BaggingModel", "BaggingSpec", "ClassifierSpec", "DEFAULT_CLASSIFIER_SPECS", "LogisticModel",
    "LogisticSpec", "MnbSummary", "NaiveBayesModel", "NaiveBayesSpec", "SavedModel", "SvmModel",
    "SvmSpec", "TrainedModel", "TreeModel", "TreeSpec", "TreeSummary", "fit_bagging", "fit_classifier",
    "fit_logistic", "fit_naive_bayes", "fit_svm", "fit_tree", "inspect_mnb", "inspect_tree",
    "model_from_json", "model_to_json", "predict", "train_bagging", "train_logistic", "train_mnb",
    "train_svm", "train_tree",
]
