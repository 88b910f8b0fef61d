"""String-to-word-vector featurization, stop-word removal and
information-gain attribute selection.

The Dataset-level functions mirror the filter chain one step at a time;
:class:`FeaturePipeline` runs the same chain on raw texts and is what the
evaluation protocols fit inside each fold.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, PositiveInt
from scipy import sparse, stats
from sklearn.feature_extraction.text import CountVectorizer

from dialecto.arff_io import AttributeKind, AttributeSpec, Dataset
from dialecto.errors import FeatureError

logger = logging.getLogger(__name__)

# maximal runs of letters, digits and apostrophes: keeps elisions such as "l'été"
TOKEN_PATTERN = r"(?:[^\W_]|['’])+"
TOKEN_RE = re.compile(TOKEN_PATTERN)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    if lowercase:
        text = text.lower()
    return TOKEN_RE.findall(text)


class StwvConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    lowercase: bool = True
    counts: Literal["binary", "term_frequency"] = "term_frequency"
    min_doc_freq: PositiveInt = 1


class FeatureSpec(BaseModel):
    """One row of the feature axis: STWV, optional stop list, optional ranker threshold."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str
    stwv: StwvConfig = StwvConfig()
    stopwords: bool = False
    threshold: float | None = None


DEFAULT_FEATURE_SPECS = (
    FeatureSpec(name="stwv"),
    FeatureSpec(name="stwv+stop", stopwords=True),
    FeatureSpec(name="select-0", threshold=0.0),
    FeatureSpec(name="select-0.05", threshold=0.05),
    FeatureSpec(name="select-0.1", threshold=0.1),
    FeatureSpec(name="select-0+stop", stopwords=True, threshold=0.0),
)


@dataclass(frozen=True)
class Vocabulary:
    words: tuple[str, ...]
    index: dict[str, int] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        words = tuple(self.words)
        object.__setattr__(self, "words", words)
        if any(not w for w in words):
            raise FeatureError("vocabulary tokens must be non-empty")
        index = {w: i for i, w in enumerate(words)}
        if len(index) != len(words):
            raise FeatureError("vocabulary tokens must be unique")
        object.__setattr__(self, "index", index)

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def subset(self, indices: Iterable[int]) -> "Vocabulary":
        return Vocabulary(tuple(self.words[i] for i in indices))


@dataclass(frozen=True)
class Stoplist:
    words: frozenset[str]

    def __post_init__(self):
        words = frozenset(self.words)
        object.__setattr__(self, "words", words)
        for w in words:
            if not w or w != w.lower():
                raise FeatureError(f"stop words must be lowercase and non-empty, got {w!r}")

    def __contains__(self, word: str) -> bool:
        return word in self.words

    def __len__(self) -> int:
        return len(self.words)


def _read_stop_lines(lines: Iterable[str]) -> Stoplist:
    entries = (line.split("#", 1)[0].strip() for line in lines)
    return Stoplist(frozenset(e for e in entries if e))


@lru_cache(maxsize=None)
def _bundled_stoplist() -> Stoplist:
    text = resources.files("dialecto").joinpath("resources", "french_stopwords.txt").read_text("utf-8")
    return _read_stop_lines(text.splitlines())


def load_stoplist(path: Path | str | None = None) -> Stoplist:
    """The bundled French stop list, or a UTF-8 word-per-line file."""
    if path is None:
        return _bundled_stoplist()
    return _read_stop_lines(Path(path).read_text("utf-8").splitlines())


@dataclass(frozen=True)
class RankedAttribute:
    index: int
    info_gain: float


# ---------------------------------------------------------------------------
# matrix-level building blocks
# ---------------------------------------------------------------------------

def _vectorizer(cfg: StwvConfig) -> CountVectorizer:
    return CountVectorizer(lowercase=cfg.lowercase, token_pattern=TOKEN_PATTERN,
                           binary=cfg.counts == "binary", dtype=np.float64)


def _fit_counts(texts: Sequence[str], cfg: StwvConfig):
    """Fit a word counter; returns (vectorizer or None, matrix, kept columns, vocabulary)."""
    vectorizer = _vectorizer(cfg)
    try:
        X = vectorizer.fit_transform(texts)
    except ValueError:
        # every text tokenizes to nothing
        return None, sparse.csr_matrix((len(texts), 0)), np.zeros(0, dtype=np.int64), Vocabulary(())
    words = vectorizer.get_feature_names_out()
    doc_freq = np.diff(X.tocsc().indptr)
    keep = np.flatnonzero(doc_freq >= cfg.min_doc_freq)
    return vectorizer, X[:, keep].tocsr(), keep, Vocabulary(tuple(words[keep].tolist()))


def count_words(texts: Sequence[str], cfg: StwvConfig) -> tuple[sparse.csr_matrix, Vocabulary]:
    _, X, _, vocab = _fit_counts(texts, cfg)
    return X, vocab


def _entropy_bits(counts: np.ndarray) -> np.ndarray:
    """Row-wise base-2 entropy of count vectors; all-zero rows give 0."""
    with np.errstate(invalid="ignore", divide="ignore"):
        h = stats.entropy(counts, base=2, axis=-1)
    return np.nan_to_num(h, nan=0.0)


def one_hot(y: np.ndarray, n_classes: int) -> np.ndarray:
    Y = np.zeros((len(y), n_classes))
    Y[np.arange(len(y)), y] = 1.0
    return Y


def info_gains(X, y: np.ndarray, n_classes: int) -> np.ndarray:
    """Information gain (bits) of every column, binarized as zero vs nonzero."""
    X = sparse.csr_matrix(X)
    n, d = X.shape
    if n <= 1 or d == 0:
        return np.zeros(d)
    Y = one_hot(np.asarray(y), n_classes)
    present = (X != 0).astype(np.float64)
    present_counts = np.asarray(present.T @ Y)
    class_counts = Y.sum(axis=0)
    absent_counts = class_counts - present_counts
    n_present = present_counts.sum(axis=1)
    h_class = _entropy_bits(class_counts[np.newaxis, :])[0]
    h_cond = (n_present / n) * _entropy_bits(present_counts) \
        + ((n - n_present) / n) * _entropy_bits(absent_counts)
    return np.maximum(h_class - h_cond, 0.0)


def rank_order(gains: np.ndarray) -> np.ndarray:
    """Indices by gain descending, ties by ascending index."""
    gains = np.asarray(gains)
    return np.lexsort((np.arange(len(gains)), -gains))


class FeaturePipeline:
    """STWV → stop list → ranker selection, fitted on training texts only."""

    def __init__(self, spec: FeatureSpec, stoplist: Stoplist | None = None):
        self.spec = spec
        self.stoplist = stoplist if stoplist is not None else load_stoplist()

    def fit(self, texts: Sequence[str], y: np.ndarray, n_classes: int) -> "FeaturePipeline":
        vectorizer, X, keep, vocab = _fit_counts(texts, self.spec.stwv)
        columns = np.arange(len(vocab))
        if self.spec.stopwords:
            columns = np.array([i for i in columns if vocab.words[i] not in self.stoplist], dtype=np.int64)
        gains = None
        if self.spec.threshold is not None:
            column_gains = info_gains(X[:, columns], y, n_classes)
            order = rank_order(column_gains)
            chosen = order[column_gains[order] > self.spec.threshold]
            if not chosen.size:
                raise FeatureError(f"threshold {self.spec.threshold} removes every attribute; "
                                   f"try a lower threshold")
            columns, gains = columns[chosen], column_gains[chosen]
        self.vectorizer_ = vectorizer
        self.columns_ = keep[columns]
        self.vocabulary_ = vocab.subset(columns)
        self.gains_ = gains
        logger.debug("%s: %d of %d words kept", self.spec.name, len(columns), len(vocab))
        return self

    def transform(self, texts: Sequence[str]) -> sparse.csr_matrix:
        if self.vectorizer_ is None:
            return sparse.csr_matrix((len(texts), 0))
        return self.vectorizer_.transform(texts)[:, self.columns_].tocsr()

    def fit_transform(self, texts: Sequence[str], y: np.ndarray, n_classes: int) -> sparse.csr_matrix:
        return self.fit(texts, y, n_classes).transform(texts)


# ---------------------------------------------------------------------------
# Dataset-level filters
# ---------------------------------------------------------------------------

def text_and_class(ds: Dataset) -> tuple[list[str], np.ndarray]:
    kinds = [a.kind for a in ds.attributes[:-1]]
    if kinds != [AttributeKind.STRING]:
        raise FeatureError("expected exactly one string attribute followed by the class attribute")
    texts = ds.column(0)
    if any(t is None for t in texts):
        raise FeatureError("dataset has missing string values")
    return texts, ds.class_values()


def _word_attributes(words: Sequence[str], class_name: str) -> list[AttributeSpec]:
    attributes = []
    for word in words:
        name = word
        while name == class_name:
            name += "_"
        attributes.append(AttributeSpec.numeric(name))
    return attributes


def string_to_word_vector(ds: Dataset, cfg: StwvConfig | None = None) -> tuple[Dataset, Vocabulary]:
    cfg = cfg or StwvConfig()
    texts, y = text_and_class(ds)
    X, vocab = count_words(texts, cfg)
    class_attr = ds.class_attribute
    attributes = _word_attributes(vocab.words, class_attr.name) + [class_attr]
    return Dataset.from_matrix(ds.relation, attributes, X, y), vocab


def remove_stopwords(ds: Dataset, vocab: Vocabulary, stop: Stoplist) -> tuple[Dataset, Vocabulary]:
    keep = [i for i, w in enumerate(vocab.words) if w not in stop]
    X, y = ds.numeric_matrix()
    attributes = [ds.attributes[i] for i in keep] + [ds.class_attribute]
    return Dataset.from_matrix(ds.relation, attributes, X[:, keep], y), vocab.subset(keep)


def info_gain(ds: Dataset, attr: int) -> float:
    if attr == ds.class_index or ds.attributes[attr].kind is not AttributeKind.NUMERIC:
        raise FeatureError(f"attribute {attr} is not a numeric feature")
    column = ds.column(attr)
    if any(v is None for v in column):
        raise FeatureError("missing values are not supported")
    X = np.asarray(column, dtype=np.float64).reshape(-1, 1)
    return float(info_gains(X, ds.class_values(), len(ds.labels))[0])


def _ranked(gains: np.ndarray) -> list[RankedAttribute]:
    return [RankedAttribute(int(i), float(gains[i])) for i in rank_order(gains)]


def rank_attributes(ds: Dataset) -> list[RankedAttribute]:
    X, y = ds.numeric_matrix()
    return _ranked(info_gains(X, y, len(ds.labels)))


def rank_words(texts: Sequence[str], y: np.ndarray, n_classes: int,
               cfg: StwvConfig | None = None) -> tuple[list[RankedAttribute], Vocabulary]:
    """Rank the words of raw texts without building a word-vector Dataset."""
    X, vocab = count_words(texts, cfg or StwvConfig())
    return _ranked(info_gains(X, y, n_classes)), vocab


def select_by_threshold(ds: Dataset, ranking: Sequence[RankedAttribute], threshold: float) -> Dataset:
    """Keep attributes whose gain is strictly above ``threshold``, in ranking order."""
    chosen = [r.index for r in ranking if r.info_gain > threshold]
    if not chosen:
        raise FeatureError(f"threshold {threshold} removes every attribute; try a lower threshold")
    X, y = ds.numeric_matrix()
    attributes = [ds.attributes[i] for i in chosen] + [ds.class_attribute]
    return Dataset.from_matrix(ds.relation, attributes, X[:, chosen], y)


def ranking_to_json(ranking: Sequence[RankedAttribute], vocab: Vocabulary) -> str:
    rows = [{"word": vocab.words[r.index], "gain": r.info_gain} for r in ranking]
    return json.dumps(rows, ensure_ascii=False, indent=2)
