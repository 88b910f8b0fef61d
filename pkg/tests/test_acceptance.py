"""Directional checks on the full generated six-country corpus.

These rebuild the corpus and run the whole classifier grid, so they are
marked slow: ``pytest -m "not slow"`` skips them.
"""

import numpy as np
import pytest

from conftest import subcorpora_from_dumps
from dialecto.analysis import similarity_matrix
from dialecto.classifiers import (
    DEFAULT_CLASSIFIER_SPECS,
    NaiveBayesSpec,
    TreeSpec,
    fit_classifier,
    inspect_mnb,
    inspect_tree,
)
from dialecto.corpus_prep import Granularity, build_dataset
from dialecto.evaluation import DEFAULT_PROTOCOLS, run_grid
from dialecto.features import FeaturePipeline, FeatureSpec, text_and_class
from dialecto.synthetic import COUNTRIES, MARKERS, REFERENCE_TLD, STOP_WORDS, generate_corpus, generate_reference

pytestmark = pytest.mark.slow

STWV = FeatureSpec(name="stwv")
SELECT_0 = FeatureSpec(name="select-0", threshold=0.0)


@pytest.fixture(scope="module")
def subcorpora():
    return subcorpora_from_dumps(generate_corpus(COUNTRIES, docs_per_country=200, seed=7))


@pytest.fixture(scope="module")
def dataset(subcorpora):
    return build_dataset(subcorpora, Granularity.DOCUMENT)


@pytest.fixture(scope="module")
def grid(dataset):
    return run_grid(dataset, [STWV, SELECT_0], DEFAULT_CLASSIFIER_SPECS, DEFAULT_PROTOCOLS, seed=0)


class TestAccuracyOrdering:

    def test_selection_beats_raw_counts(self, grid):
        averages = grid.feature_averages()
        assert averages["select-0"] > averages["stwv"]

    def test_logistic_fits_training_data_best(self, grid):
        training = grid.cell("stwv", "Logistic", "Training set").accuracy
        assert training >= grid.cell("stwv", "Logistic", "10-fold CV").accuracy

    def test_every_classifier_beats_majority(self, grid):
        for name in grid.classifier_names:
            cell = grid.cell("select-0", name, "10-fold CV")
            assert cell.accuracy > cell.report.majority_rate

    def test_no_failed_cells(self, grid):
        assert grid.excluded == []


class TestDistinguishingWords:

    @pytest.fixture(scope="class")
    def counts(self, dataset):
        texts, y = text_and_class(dataset)
        pipeline = FeaturePipeline(STWV)
        return pipeline.fit_transform(texts, y, len(dataset.labels)), y, pipeline.vocabulary_.words

    def test_tree_splits_on_a_marker(self, dataset, counts):
        X, y, words = counts
        model = fit_classifier(TreeSpec(), X, y, dataset.labels, seed=0)
        split_words = {node.word for node in inspect_tree(model, words).nodes if node.word is not None}
        markers = {m for values in MARKERS.values() for m in values}
        assert split_words & markers

    def test_naive_bayes_top_word_is_a_stop_word(self, dataset, counts):
        X, y, words = counts
        model = fit_classifier(NaiveBayesSpec(), X, y, dataset.labels)
        assert inspect_mnb(model, 5, words).overall[0].word in STOP_WORDS


def test_similarity_matrix_shape(subcorpora):
    (reference,) = subcorpora_from_dumps({REFERENCE_TLD: generate_reference(docs=300, seed=8)})
    matrix = similarity_matrix(subcorpora + [reference])
    assert matrix.names == COUNTRIES + (REFERENCE_TLD,)
    np.testing.assert_array_equal(np.diag(matrix.scores), np.ones(7))
    np.testing.assert_allclose(matrix.scores, matrix.scores.T, atol=1e-9)
    assert (matrix.scores[~np.eye(7, dtype=bool)] > 1.0).all()
