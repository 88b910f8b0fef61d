import numpy as np
import pytest

from dialecto.arff_io import AttributeSpec, Dataset, Instance
from dialecto.corpus_prep import CleanDocument, Subcorpus, clean_document, parse_dump


def make_subcorpus(tld: str, texts: list[str]) -> Subcorpus:
    docs = tuple(CleanDocument(f"{tld}-{i}", tld, " ".join(t.split()), len(t.split()))
                 for i, t in enumerate(texts))
    return Subcorpus(tld, docs)


def text_dataset(texts: list[str], classes: list[int], labels=("a", "b")) -> Dataset:
    attributes = (AttributeSpec.string("text"), AttributeSpec.nominal("class", labels))
    return Dataset("french", attributes, tuple(Instance((t, c)) for t, c in zip(texts, classes)))


def numeric_dataset(X: np.ndarray, y: np.ndarray, labels=("a", "b")) -> Dataset:
    attributes = [AttributeSpec.numeric(f"f{j}") for j in range(X.shape[1])]
    attributes.append(AttributeSpec.nominal("class", labels))
    return Dataset.from_matrix("toy", attributes, X, y)


def subcorpora_from_dumps(dumps: dict[str, str]) -> list[Subcorpus]:
    return [Subcorpus(tld, tuple(clean_document(d) for d in parse_dump(text, tld)))
            for tld, text in dumps.items()]


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture
def marker_dataset() -> Dataset:
    """Two small classes, each with its own marker word plus shared function words."""
    texts = [
        "dakar le marché de la ville",
        "la plage de dakar et le port",
        "le riz de dakar pour la famille",
        "dakar la capitale et le fleuve",
        "paris le marché de la ville",
        "la gare de paris et le port",
        "le pain de paris pour la famille",
        "paris la capitale et le fleuve",
    ]
    return text_dataset(texts, [1, 1, 1, 1, 0, 0, 0, 0], labels=("fr", "sn"))
