"""Word vectors, stop lists and information-gain selection."""

import json
import math
from collections import Counter

import numpy as np
import pytest

from conftest import numeric_dataset, text_dataset
from dialecto.errors import FeatureError
from dialecto.features import (
    FeaturePipeline,
    FeatureSpec,
    RankedAttribute,
    Stoplist,
    StwvConfig,
    Vocabulary,
    info_gain,
    info_gains,
    load_stoplist,
    rank_attributes,
    rank_words,
    ranking_to_json,
    remove_stopwords,
    select_by_threshold,
    string_to_word_vector,
    text_and_class,
    tokenize,
)


def _entropy(counts) -> float:
    total = sum(counts)
    return -sum(c / total * math.log2(c / total) for c in counts if c)


def _oracle_gain(column, y) -> float:
    """H(C) - sum over present/absent of p(v) * H(C | v), by explicit counting."""
    n = len(y)
    h = _entropy(Counter(y).values())
    for present in (True, False):
        subset = [c for v, c in zip(column, y) if (v != 0) == present]
        if subset:
            h -= len(subset) / n * _entropy(Counter(subset).values())
    return h


def _vectors(ds) -> list[list[float]]:
    return [list(inst.values[:-1]) for inst in ds.instances]


class TestTokenize:

    def test_keeps_elisions_and_splits_hyphens(self):
        assert tokenize("L'été, c'est-à-dire 2024!") == ["l'été", "c'est", "à", "dire", "2024"]

    def test_case_kept_on_request(self):
        assert tokenize("Dakar dakar", lowercase=False) == ["Dakar", "dakar"]


class TestStringToWordVector:

    def test_counts_example(self):
        ds, vocab = string_to_word_vector(text_dataset(["a b a", "b c"], [0, 1]))
        assert vocab.words == ("a", "b", "c")
        assert [a.name for a in ds.attributes] == ["a", "b", "c", "class"]
        assert _vectors(ds) == [[2.0, 1.0, 0.0], [0.0, 1.0, 1.0]]
        np.testing.assert_array_equal(ds.class_values(), [0, 1])
        assert ds.sparse

    def test_empty_text_gives_zero_vector(self):
        ds, _ = string_to_word_vector(text_dataset(["a b", ""], [0, 1]))
        assert _vectors(ds)[1] == [0.0, 0.0]
        np.testing.assert_array_equal(ds.class_values(), [0, 1])

    def test_case_folding(self):
        ds, vocab = string_to_word_vector(text_dataset(["Le le LE"], [0]))
        assert vocab.words == ("le",)
        assert _vectors(ds) == [[3.0]]

    def test_binary_counts(self):
        ds, _ = string_to_word_vector(text_dataset(["a a a b"], [0]), StwvConfig(counts="binary"))
        assert _vectors(ds) == [[1.0, 1.0]]

    def test_min_doc_freq(self):
        _, vocab = string_to_word_vector(text_dataset(["a b", "a c", "a b"], [0, 1, 0]), StwvConfig(min_doc_freq=2))
        assert vocab.words == ("a", "b")

    def test_word_named_like_class_attribute(self):
        ds, vocab = string_to_word_vector(text_dataset(["class ville"], [0]))
        assert vocab.words == ("class", "ville")
        assert [a.name for a in ds.attributes] == ["class_", "ville", "class"]

    def test_missing_text_rejected(self):
        with pytest.raises(FeatureError, match="missing"):
            string_to_word_vector(text_dataset(["a", None], [0, 1]))

    def test_needs_text_dataset(self):
        with pytest.raises(FeatureError):
            text_and_class(numeric_dataset(np.ones((2, 2)), np.array([0, 1])))

    def test_label_multiset_preserved(self, marker_dataset):
        ds, _ = string_to_word_vector(marker_dataset)
        assert sorted(ds.class_values()) == sorted(marker_dataset.class_values())


class TestRemoveStopwords:

    def test_removes_listed_words(self):
        ds, vocab = string_to_word_vector(text_dataset(["de la ville", "la ville"], [0, 1]))
        out, kept = remove_stopwords(ds, vocab, Stoplist(frozenset({"de", "la"})))
        assert kept.words == ("ville",)
        assert [a.name for a in out.attributes] == ["ville", "class"]
        assert _vectors(out) == [[1.0], [1.0]]

    def test_empty_stoplist_is_identity(self):
        ds, vocab = string_to_word_vector(text_dataset(["de la ville"], [0]))
        out, kept = remove_stopwords(ds, vocab, Stoplist(frozenset()))
        assert out == ds
        assert kept == vocab

    def test_bundled_list_drops_pour(self):
        ds, vocab = string_to_word_vector(text_dataset(["pour la ville de Dakar"], [0]))
        _, kept = remove_stopwords(ds, vocab, load_stoplist())
        assert "pour" not in kept.words
        assert kept.words == ("dakar", "ville")

    def test_stop_free_text_commutes(self):
        ds = text_dataset(["ville marché", "plage ville"], [0, 1])
        plain, vocab = string_to_word_vector(ds)
        filtered, kept = remove_stopwords(plain, vocab, load_stoplist())
        assert filtered == plain
        assert kept == vocab

    def test_stoplist_must_be_lowercase(self, tmp_path):
        path = tmp_path / "stop.txt"
        path.write_text("# mine\nde\nLa\n", encoding="utf-8")
        with pytest.raises(FeatureError, match="lowercase"):
            load_stoplist(path)


class TestInfoGain:

    def test_perfect_attribute_is_one_bit(self):
        ds = numeric_dataset(np.array([[1.0], [3.0], [0.0], [0.0]]), np.array([0, 0, 1, 1]))
        assert info_gain(ds, 0) == pytest.approx(1.0, abs=1e-12)

    def test_constant_attribute_is_zero(self):
        ds = numeric_dataset(np.zeros((4, 1)), np.array([0, 0, 1, 1]))
        assert info_gain(ds, 0) == 0.0

    def test_one_present_instance(self):
        ds = numeric_dataset(np.array([[2.0], [0.0], [0.0], [0.0]]), np.array([0, 0, 1, 1]))
        expected = 1.0 - 0.75 * _entropy([1, 2])
        assert info_gain(ds, 0) == pytest.approx(expected, abs=1e-12)

    def test_single_instance_is_zero(self):
        ds = numeric_dataset(np.array([[1.0]]), np.array([0]))
        assert info_gain(ds, 0) == 0.0

    def test_class_attribute_rejected(self):
        ds = numeric_dataset(np.ones((2, 1)), np.array([0, 1]))
        with pytest.raises(FeatureError):
            info_gain(ds, 1)

    def test_matches_brute_force_oracle(self, rng):
        for _ in range(1000):
            n, d, k = int(rng.integers(1, 13)), int(rng.integers(1, 6)), int(rng.integers(1, 4))
            X = rng.integers(0, 3, size=(n, d)).astype(float)
            y = rng.integers(0, k, size=n)
            gains = info_gains(X, y, k)
            h_class = _entropy(Counter(y.tolist()).values())
            for j in range(d):
                assert gains[j] == pytest.approx(_oracle_gain(X[:, j], y.tolist()), abs=1e-12)
                assert 0.0 <= gains[j] <= h_class + 1e-12


class TestRanking:

    def test_higher_gain_first(self):
        ds = numeric_dataset(np.array([[0.0, 1.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]), np.array([0, 1, 0, 1]))
        assert [r.index for r in rank_attributes(ds)] == [1, 0]

    def test_duplicate_attributes_keep_index_order(self):
        column = np.array([[1.0], [0.0], [1.0], [0.0]])
        ds = numeric_dataset(np.hstack([column, column, column]), np.array([0, 1, 0, 1]))
        assert [r.index for r in rank_attributes(ds)] == [0, 1, 2]

    def test_random_rankings_sorted(self, rng):
        for _ in range(100):
            n, d = int(rng.integers(2, 12)), int(rng.integers(1, 6))
            X = rng.integers(0, 2, size=(n, d)).astype(float)
            y = rng.integers(0, 2, size=n)
            ranking = rank_attributes(numeric_dataset(X, y))
            assert sorted(r.index for r in ranking) == list(range(d))
            for r in ranking:
                assert r.info_gain == pytest.approx(_oracle_gain(X[:, r.index], y.tolist()), abs=1e-12)
            for a, b in zip(ranking, ranking[1:]):
                assert a.info_gain > b.info_gain or (a.info_gain == b.info_gain and a.index < b.index)

    def test_rank_words_and_json(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        ranking, vocab = rank_words(texts, y, 2)
        top = json.loads(ranking_to_json(ranking, vocab))[:2]
        assert [row["word"] for row in top] == ["dakar", "paris"]
        assert top[0]["gain"] == pytest.approx(1.0)


class TestSelectByThreshold:

    @pytest.fixture
    def ranked(self):
        ds = numeric_dataset(np.eye(3), np.array([0, 1, 0]))
        ranking = [RankedAttribute(2, 0.3), RankedAttribute(0, 0.07), RankedAttribute(1, 0.0)]
        return ds, ranking

    @pytest.mark.parametrize("threshold, names", [
        (0.0, ["f2", "f0"]),
        (0.05, ["f2"]),
        (-1.0, ["f2", "f0", "f1"]),
    ])
    def test_strictly_greater(self, ranked, threshold, names):
        ds, ranking = ranked
        out = select_by_threshold(ds, ranking, threshold)
        assert [a.name for a in out.attributes] == names + ["class"]

    def test_columns_follow_ranking(self, ranked):
        ds, ranking = ranked
        out = select_by_threshold(ds, ranking, 0.0)
        assert _vectors(out) == [[0.0, 1.0], [0.0, 0.0], [1.0, 0.0]]

    def test_everything_removed(self, ranked):
        ds, ranking = ranked
        with pytest.raises(FeatureError, match="lower threshold"):
            select_by_threshold(ds, ranking, 0.5)

    def test_monotone_in_threshold(self, rng):
        X = rng.integers(0, 3, size=(12, 6)).astype(float)
        ds = numeric_dataset(X, rng.integers(0, 2, size=12))
        ranking = rank_attributes(ds)
        kept = {}
        for t in (-1.0, 0.0, 0.01, 0.05):
            try:
                kept[t] = {a.name for a in select_by_threshold(ds, ranking, t).attributes}
            except FeatureError:
                kept[t] = {"class"}
        assert kept[0.05] <= kept[0.01] <= kept[0.0] <= kept[-1.0]


class TestFeaturePipeline:

    def test_threshold_keeps_markers(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        pipeline = FeaturePipeline(FeatureSpec(name="sel", threshold=0.5)).fit(texts, y, 2)
        assert pipeline.vocabulary_.words == ("dakar", "paris")
        np.testing.assert_allclose(pipeline.gains_, [1.0, 1.0])

    def test_transform_reuses_fitted_columns(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        pipeline = FeaturePipeline(FeatureSpec(name="sel", threshold=0.5)).fit(texts, y, 2)
        X = pipeline.transform(["Paris dakar dakar inconnu", "rien"])
        np.testing.assert_array_equal(X.toarray(), [[2.0, 1.0], [0.0, 0.0]])

    def test_stopwords_removed(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        X = FeaturePipeline(FeatureSpec(name="stop", stopwords=True)).fit_transform(texts, y, 2)
        pipeline = FeaturePipeline(FeatureSpec(name="stop", stopwords=True)).fit(texts, y, 2)
        assert not {"le", "la", "de", "et", "pour"} & set(pipeline.vocabulary_.words)
        assert X.shape == (8, len(pipeline.vocabulary_))

    def test_matches_dataset_filters(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        pipeline = FeaturePipeline(FeatureSpec(name="sel", threshold=0.0)).fit(texts, y, 2)
        words_ds, vocab = string_to_word_vector(marker_dataset)
        selected = select_by_threshold(words_ds, rank_attributes(words_ds), 0.0)
        assert pipeline.vocabulary_.words == tuple(a.name for a in selected.attributes[:-1])

    def test_threshold_too_high(self, marker_dataset):
        texts, y = text_and_class(marker_dataset)
        with pytest.raises(FeatureError, match="lower threshold"):
            FeaturePipeline(FeatureSpec(name="sel", threshold=2.0)).fit(texts, y, 2)

    def test_vocabulary_rejects_duplicates(self):
        with pytest.raises(FeatureError):
            Vocabulary(("a", "a"))
