"""Exception hierarchy shared by every dialecto stage."""

from __future__ import annotations


class DialectoError(Exception):
    """Base class for every error raised by dialecto."""


class CorpusError(DialectoError):
    """Corpus documents or subcorpora violate their invariants."""


class CorpusParseError(CorpusError):
    """A raw dump could not be parsed."""

    def __init__(self, message: str, offset: int | None = None):
        if offset is not None:
            message = f"{message} (byte offset {offset})"
        super().__init__(message)
        self.offset = offset


class DatasetError(DialectoError):
    """A dataset violates its structural invariants."""


class ArffError(DatasetError):
    """An ARFF document could not be read."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FeatureError(DialectoError):
    """Featurization or attribute selection failed."""


class ModelError(DialectoError):
    """A classifier could not be trained, applied or (de)serialized."""


class EvaluationError(DialectoError):
    """A test protocol could not be run."""


class AnalysisError(DialectoError):
    """Corpus analytics were given unusable input."""


class ConfigError(DialectoError):
    """The experiment configuration refers to something unusable."""
