"""Corpus similarity and multi-word expressions."""

import json
from collections import Counter

import numpy as np
import pytest

from conftest import make_subcorpus, subcorpora_from_dumps
from dialecto.analysis import (
    WordProfile,
    corpus_similarity,
    mwe_to_json,
    similarity_matrix,
    top_mwe,
    word_profile,
)
from dialecto.corpus_prep import Subcorpus, sentence_tokenize
from dialecto.errors import AnalysisError
from dialecto.features import tokenize
from dialecto.synthetic import generate_corpus, generate_reference


def _oracle_similarity(a: list[str], b: list[str], top_n: int) -> float:
    """Direct evaluation of the score from token lists."""
    def counts(tokens):
        table = {}
        for t in tokens:
            table[t] = table.get(t, 0) + 1
        return table

    ca, cb = counts(a), counts(b)
    top = lambda c: [w for w, _ in sorted(c.items(), key=lambda kv: (-kv[1], kv[0]))[:top_n]]
    words = set(top(ca)) | set(top(cb))
    total = 0.0
    for w in words:
        fa = ca.get(w, 0) * 1e6 / len(a)
        fb = cb.get(w, 0) * 1e6 / len(b)
        total += (fa - fb) ** 2 / (fa + fb)
    return 1.0 + total / len(words)


@pytest.fixture(scope="module")
def corpora():
    dumps = generate_corpus(["dz", "fr", "sn"], docs_per_country=20, seed=5)
    dumps["ref"] = generate_reference(docs=20, seed=6)
    return subcorpora_from_dumps(dumps)


class TestCorpusSimilarity:

    def test_self_similarity_is_one(self, corpora):
        for sc in corpora:
            assert corpus_similarity(sc, sc) == 1.0

    def test_matches_direct_formula(self, rng):
        vocabulary = [f"w{i}" for i in range(30)]
        for _ in range(50):
            a = rng.choice(vocabulary, size=int(rng.integers(20, 200))).tolist()
            b = rng.choice(vocabulary, size=int(rng.integers(20, 200))).tolist()
            sa, sb = make_subcorpus("aa", [" ".join(a)]), make_subcorpus("bb", [" ".join(b)])
            np.testing.assert_allclose(corpus_similarity(sa, sb, top_n=10), _oracle_similarity(a, b, 10),
                                       rtol=1e-12)

    def test_symmetric(self, corpora):
        assert corpus_similarity(corpora[0], corpora[1]) == corpus_similarity(corpora[1], corpora[0])

    def test_widening_a_frequency_gap_raises_the_score(self, rng):
        """Per-million rates held fixed except one word, whose gap grows."""
        words = [f"w{i}" for i in range(30)]
        for _ in range(300):
            fa = dict(zip(words, rng.integers(1, 5000, size=len(words)).tolist()))
            fb = dict(zip(words, rng.integers(1, 5000, size=len(words)).tolist()))
            word = words[int(rng.integers(len(words)))]
            if fa[word] < fb[word]:
                fa, fb = fb, fa
            b = WordProfile("bb", Counter(fb), 1_000_000)
            before = corpus_similarity(WordProfile("aa", Counter(fa), 1_000_000), b, top_n=len(words))
            fa[word] += int(rng.integers(1, 5000))
            after = corpus_similarity(WordProfile("aa", Counter(fa), 1_000_000), b, top_n=len(words))
            assert after > before

    def test_top_n_floor(self, corpora):
        with pytest.raises(AnalysisError, match="at least 10"):
            corpus_similarity(corpora[0], corpora[1], top_n=9)

    def test_empty_corpus(self, corpora):
        with pytest.raises(AnalysisError, match="no words"):
            corpus_similarity(corpora[0], Subcorpus("ma", ()))


class TestSimilarityMatrix:

    def test_shape_diagonal_and_symmetry(self, corpora):
        matrix = similarity_matrix(corpora, top_n=50)
        assert matrix.names == ("dz", "fr", "sn", "ref")
        assert matrix.scores.shape == (4, 4)
        np.testing.assert_array_equal(np.diag(matrix.scores), np.ones(4))
        np.testing.assert_array_equal(matrix.scores, matrix.scores.T)
        off_diagonal = matrix.scores[~np.eye(4, dtype=bool)]
        assert (off_diagonal > 1.0).all()

    def test_render_and_json(self, corpora):
        matrix = similarity_matrix(corpora[:2], top_n=50)
        lines = matrix.render().splitlines()
        assert lines[0].split() == ["dz", "fr"]
        assert lines[1].split()[:2] == ["dz", "1.00"]
        document = json.loads(matrix.to_json())
        assert document["corpora"] == ["dz", "fr"]
        assert document["scores"][0][0] == 1.0

    def test_needs_two_corpora(self, corpora):
        with pytest.raises(AnalysisError, match="at least two"):
            similarity_matrix(corpora[:1])


class TestTopMwe:

    TEXTS = [
        "Le prix de la farine monte. De la farine au marché.",
        "Il parle de la ville. La ville dort.",
    ]

    def test_most_frequent_bigram_first(self):
        entries = top_mwe(make_subcorpus("fr", self.TEXTS), n=2, top_k=3)
        assert entries[0].ngram == ("de", "la")
        assert entries[0].count == 3
        assert [e.ngram for e in entries[1:]] == [("la", "farine"), ("la", "ville")]

    def test_rate_per_million_words(self):
        sc = make_subcorpus("fr", self.TEXTS)
        entry = top_mwe(sc, n=2, top_k=1)[0]
        total = sum(len(tokenize(t)) for t in self.TEXTS)
        assert entry.per_million == pytest.approx(3 * 1e6 / total)

    def test_never_crosses_sentences(self):
        entries = top_mwe(make_subcorpus("fr", ["Il pleut. Elle sort."]), n=2, top_k=100)
        assert {e.ngram for e in entries} == {("il", "pleut"), ("elle", "sort")}

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_ngram_count_conserved(self, corpora, n):
        sc = corpora[0]
        entries = top_mwe(sc, n=n, top_k=10 ** 9)
        expected = sum(max(0, len(tokenize(s)) - n + 1)
                       for doc in sc.documents for s in sentence_tokenize(doc.text))
        assert sum(e.count for e in entries) == expected
        assert all(len(e.ngram) == n for e in entries)

    @pytest.mark.parametrize("n", [1, 5])
    def test_size_range(self, n):
        with pytest.raises(AnalysisError, match="between 2 and 4"):
            top_mwe(make_subcorpus("fr", self.TEXTS), n=n)

    def test_json(self):
        document = json.loads(mwe_to_json(top_mwe(make_subcorpus("fr", self.TEXTS), top_k=1)))
        assert document[0]["ngram"] == ["de", "la"]
        assert document[0]["count"] == 3


class TestWordProfile:

    def test_counts_lowercased_tokens(self):
        profile = word_profile(make_subcorpus("fr", ["La ville. la"]))
        assert profile.counts["la"] == 2
        assert profile.total == 3
        assert profile.top_words(1) == ["la"]
