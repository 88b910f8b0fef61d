"""Versioned JSON documents for trained models.

A document carries the variant tag, the label set, the attribute count,
optionally the vocabulary the attributes stand for, and the variant's
parameters. Floats are written with ``repr`` precision, so a reloaded model
predicts bit-identically.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from dialecto.classifiers.base import MODEL_TYPES, TrainedModel
from dialecto.errors import ModelError

FORMAT = "dialecto-model"
VERSION = 1


@dataclass(frozen=True, eq=False)
class SavedModel:
    model: TrainedModel
    vocabulary: tuple[str, ...] | None = None


def model_to_json(model: TrainedModel, vocabulary: Sequence[str] | None = None) -> str:
    if vocabulary is not None and len(vocabulary) != model.n_features:
        raise ModelError(f"vocabulary has {len(vocabulary)} words for {model.n_features} attributes")
    document = {
        "format": FORMAT,
        "version": VERSION,
        "variant": model.variant,
        "labels": list(model.labels),
        "n_features": model.n_features,
        "vocabulary": None if vocabulary is None else list(vocabulary),
        "params": model.to_params(),
    }
    return json.dumps(document, ensure_ascii=False, allow_nan=False)


def model_from_json(text: str) -> SavedModel:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not JSON: {exc}") from exc
    if not isinstance(document, dict) or document.get("format") != FORMAT:
        raise ModelError("not a dialecto model document")
    if document.get("version") != VERSION:
        raise ModelError(f"unsupported model version {document.get('version')!r}")
    model_type = MODEL_TYPES.get(document.get("variant"))
    if model_type is None:
        raise ModelError(f"unknown model variant {document.get('variant')!r}")
    try:
        model = model_type.from_params(tuple(document["labels"]), int(document["n_features"]),
                                       document["params"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"malformed {document['variant']} parameters: {exc}") from exc
    vocabulary = document.get("vocabulary")
    return SavedModel(model, None if vocabulary is None else tuple(vocabulary))
