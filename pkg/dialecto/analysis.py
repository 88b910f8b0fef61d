"""Corpus comparison and multi-word-expression counts."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from dialecto.corpus_prep import Subcorpus, sentence_tokenize
from dialecto.errors import AnalysisError
from dialecto.features import tokenize

logger = logging.getLogger(__name__)

MIN_TOP_N = 10
MWE_SIZES = range(2, 5)


@dataclass(frozen=True)
class WordProfile:
    name: str
    counts: Counter
    total: int

    def top_words(self, top_n: int) -> list[str]:
        ranked = sorted(self.counts.items(), key=lambda item: (-item[1], item[0]))
        return [word for word, _ in ranked[:top_n]]

    def per_million(self, words: Sequence[str]) -> np.ndarray:
        return np.array([self.counts.get(w, 0) for w in words], dtype=np.float64) * 1e6 / self.total


def word_profile(sc: Subcorpus) -> WordProfile:
    counts = Counter()
    for doc in sc.documents:
        counts.update(tokenize(doc.text))
    total = sum(counts.values())
    if total == 0:
        raise AnalysisError(f"corpus {sc.tld!r} has no words")
    return WordProfile(sc.tld, counts, total)


def _profile(corpus: Subcorpus | WordProfile) -> WordProfile:
    return corpus if isinstance(corpus, WordProfile) else word_profile(corpus)


def corpus_similarity(a: Subcorpus | WordProfile, b: Subcorpus | WordProfile, top_n: int = 500) -> float:
    """``1 + mean((fa - fb)^2 / (fa + fb))`` over the union of both top-N word lists.

    Frequencies are per million words, so a corpus compared with itself
    scores exactly 1.0 and larger values mean more different corpora.
    """
    if top_n < MIN_TOP_N:
        raise AnalysisError(f"top_n must be at least {MIN_TOP_N}, got {top_n}")
    pa, pb = _profile(a), _profile(b)
    words = sorted(set(pa.top_words(top_n)) | set(pb.top_words(top_n)))
    fa, fb = pa.per_million(words), pb.per_million(words)
    terms = (fa - fb) ** 2 / (fa + fb)
    return 1.0 + float(terms.mean())


@dataclass(frozen=True, eq=False)
class SimilarityMatrix:
    names: tuple[str, ...]
    scores: np.ndarray

    def frame(self) -> pd.DataFrame:
        return pd.DataFrame(self.scores, index=list(self.names), columns=list(self.names))

    def render(self) -> str:
        return self.frame().to_string(float_format=lambda v: f"{v:.2f}") + "\n"

    def to_json(self) -> str:
        return json.dumps({"corpora": list(self.names), "scores": self.scores.tolist()},
                          ensure_ascii=False, indent=2)


def similarity_matrix(corpora: Sequence[Subcorpus], top_n: int = 500, n_jobs: int = 1) -> SimilarityMatrix:
    """Pairwise scores of every corpus against every other (reference corpora included)."""
    if len(corpora) < 2:
        raise AnalysisError("a similarity matrix needs at least two corpora")
    profiles = [word_profile(sc) for sc in corpora]
    pairs = [(i, j) for i in range(len(profiles)) for j in range(i, len(profiles))]
    values = Parallel(n_jobs=n_jobs)(
        delayed(corpus_similarity)(profiles[i], profiles[j], top_n) for i, j in pairs
    )
    scores = np.zeros((len(profiles), len(profiles)))
    for (i, j), value in zip(pairs, values):
        scores[i, j] = scores[j, i] = value
    return SimilarityMatrix(tuple(p.name for p in profiles), scores)


@dataclass(frozen=True)
class MweEntry:
    ngram: tuple[str, ...]
    count: int
    per_million: float

    def to_dict(self) -> dict:
        return {"ngram": list(self.ngram), "count": self.count, "per_million": self.per_million}


def top_mwe(sc: Subcorpus, n: int = 2, top_k: int = 20,
            abbreviations: frozenset[str] | None = None) -> list[MweEntry]:
    """Most frequent contiguous word n-grams, never crossing a sentence boundary."""
    if n not in MWE_SIZES:
        raise AnalysisError(f"n-gram size must be between 2 and 4, got {n}")
    if top_k < 1:
        raise AnalysisError("top_k must be positive")
    counts = Counter()
    total = 0
    for doc in sc.documents:
        for sentence in sentence_tokenize(doc.text, abbreviations):
            tokens = tokenize(sentence)
            total += len(tokens)
            counts.update(zip(*(tokens[i:] for i in range(n))))
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:top_k]
    return [MweEntry(ngram, count, count * 1e6 / total) for ngram, count in ranked]


def mwe_to_json(entries: Sequence[MweEntry]) -> str:
    return json.dumps([e.to_dict() for e in entries], ensure_ascii=False, indent=2)
