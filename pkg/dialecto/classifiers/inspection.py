"""Reading distinguishing words back out of trained trees and naive Bayes models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from dialecto.classifiers.base import TrainedModel
from dialecto.classifiers.naive_bayes import NaiveBayesModel
from dialecto.classifiers.tree import LEAF, TreeModel
from dialecto.errors import ModelError


def _word(vocabulary: Sequence[str] | None, index: int) -> str:
    return vocabulary[index] if vocabulary is not None else f"attr{index}"


@dataclass(frozen=True)
class TreeNodeEntry:
    depth: int
    support: int
    word: str | None = None        # split nodes
    threshold: float | None = None
    label: str | None = None       # leaves
    branch: str | None = None      # test leading here from the parent, e.g. "kivu > 0.5"


@dataclass(frozen=True)
class TreeSummary:
    node_count: int
    split_count: int
    leaf_count: int
    nodes: tuple[TreeNodeEntry, ...]   # pre-order

    @property
    def split_words(self) -> list[str]:
        return [n.word for n in self.nodes if n.word is not None]

    @property
    def root_word(self) -> str | None:
        return self.nodes[0].word

    def render(self) -> str:
        """Indented branch listing: ``word <= t`` / ``word > t``, leaves as ``: label (support)``."""
        lines = [f"Tree: {self.node_count} nodes ({self.split_count} splits, {self.leaf_count} leaves)"]
        for node in self.nodes:
            leaf = f": {node.label} ({node.support})" if node.label is not None else ""
            if node.branch is None:
                if leaf:
                    lines.append(leaf)
                continue
            lines.append("|   " * (node.depth - 1) + node.branch + leaf)
        return "\n".join(lines)


def inspect_tree(model: TrainedModel, vocabulary: Sequence[str] | None = None) -> TreeSummary:
    if not isinstance(model, TreeModel):
        raise ModelError(f"{model.variant} model is not a decision tree")
    entries = []
    stack = [(0, 0, None)]
    while stack:
        node, depth, branch = stack.pop()
        attribute = int(model.attribute[node])
        support = int(model.support[node])
        if attribute == LEAF:
            label = model.labels[int(np.argmax(model.distribution[node]))]
            entries.append(TreeNodeEntry(depth, support, label=label, branch=branch))
        else:
            word, threshold = _word(vocabulary, attribute), float(model.threshold[node])
            entries.append(TreeNodeEntry(depth, support, word=word, threshold=threshold, branch=branch))
            stack.append((int(model.right[node]), depth + 1, f"{word} > {threshold:g}"))
            stack.append((int(model.left[node]), depth + 1, f"{word} <= {threshold:g}"))
    splits = sum(1 for e in entries if e.word is not None)
    return TreeSummary(len(entries), splits, len(entries) - splits, tuple(entries))


@dataclass(frozen=True)
class WordProbability:
    word: str
    probability: float
    label: str


@dataclass(frozen=True)
class MnbSummary:
    per_class: dict[str, tuple[WordProbability, ...]]
    overall: tuple[WordProbability, ...]

    def render(self) -> str:
        lines = ["Top words overall:"]
        lines += [f"  {w.word:<20} {w.probability:.6f}  ({w.label})" for w in self.overall]
        for label, words in self.per_class.items():
            lines.append(f"Top words for {label}:")
            lines += [f"  {w.word:<20} {w.probability:.6f}" for w in words]
        return "\n".join(lines)


def inspect_mnb(model: TrainedModel, top_n: int = 10,
                vocabulary: Sequence[str] | None = None) -> MnbSummary:
    """Highest-likelihood words per class and over all classes; ties keep vocabulary order."""
    if not isinstance(model, NaiveBayesModel):
        raise ModelError(f"{model.variant} model is not multinomial naive Bayes")
    loglik = model.log_likelihoods
    positions = np.arange(loglik.shape[1])
    per_class = {}
    for c, label in enumerate(model.labels):
        order = np.lexsort((positions, -loglik[c]))[:top_n]
        per_class[label] = tuple(WordProbability(_word(vocabulary, int(j)), float(np.exp(loglik[c, j])), label)
                                 for j in order)
    best_class = np.argmax(loglik, axis=0) if loglik.shape[1] else np.zeros(0, dtype=np.int64)
    best = loglik[best_class, positions]
    order = np.lexsort((positions, -best))[:top_n]
    overall = tuple(WordProbability(_word(vocabulary, int(j)), float(np.exp(best[j])),
                                    model.labels[int(best_class[j])]) for j in order)
    return MnbSummary(per_class, overall)
