"""Experiment configuration: a flat JSON document validated by pydantic."""

from __future__ import annotations

import logging
import os
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, PositiveInt, model_validator

from dialecto.classifiers import DEFAULT_CLASSIFIER_SPECS, ClassifierSpec
from dialecto.corpus_prep import Granularity, SizePolicy
from dialecto.errors import ConfigError
from dialecto.evaluation import DEFAULT_PROTOCOLS, Protocol
from dialecto.features import DEFAULT_FEATURE_SPECS, FeatureSpec

logger = logging.getLogger(__name__)

THREADS_ENV = "DIALECTO_THREADS"


class CorpusEntry(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    tld: str = Field(min_length=1)
    path: Path


def _unique(kind: str, names: list[str]):
    duplicates = sorted({n for n in names if names.count(n) > 1})
    if duplicates:
        raise ValueError(f"duplicate {kind}: {duplicates}")


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    corpora: list[CorpusEntry] = Field(min_length=2)
    reference_corpora: list[CorpusEntry] = []
    granularities: list[Granularity] = Field(default=[Granularity.DOCUMENT], min_length=1)
    size_policy: SizePolicy = SizePolicy()
    trim_to_budget: bool = False

    features: list[FeatureSpec] = Field(default_factory=lambda: list(DEFAULT_FEATURE_SPECS), min_length=1)
    classifiers: list[ClassifierSpec] = Field(default_factory=lambda: list(DEFAULT_CLASSIFIER_SPECS),
                                              min_length=1)
    protocols: list[Protocol] = Field(default_factory=lambda: list(DEFAULT_PROTOCOLS), min_length=1)
    seed: NonNegativeInt = 0
    paper_mode: bool = False

    output_dir: Path = Path("out")
    stoplist: Path | None = None
    abbreviations: Path | None = None

    similarity_top_n: int = Field(default=500, ge=10)
    mwe_n: int = Field(default=2, ge=2, le=4)
    mwe_top_k: PositiveInt = 20
    inspect_top_n: PositiveInt = 20

    @model_validator(mode="after")
    def _check_axes(self):
        _unique("corpus labels", [c.tld for c in self.corpora + self.reference_corpora])
        _unique("feature names", [f.name for f in self.features])
        _unique("classifier names", [c.name for c in self.classifiers])
        _unique("protocol names", [p.name for p in self.protocols])
        _unique("granularities", [g.value for g in self.granularities])
        return self

    def resolved(self, base_dir: Path) -> "ExperimentConfig":
        """Copy with every relative path anchored at ``base_dir``."""
        def anchor(path: Path | None) -> Path | None:
            return None if path is None else (base_dir / path).resolve()

        def entries(items: list[CorpusEntry]) -> list[CorpusEntry]:
            return [c.model_copy(update={"path": anchor(c.path)}) for c in items]

        return self.model_copy(update={
            "corpora": entries(self.corpora),
            "reference_corpora": entries(self.reference_corpora),
            "output_dir": anchor(self.output_dir),
            "stoplist": anchor(self.stoplist),
            "abbreviations": anchor(self.abbreviations),
        })

    def check_inputs(self):
        """Fail on the first input file that does not exist."""
        paths = [c.path for c in self.corpora + self.reference_corpora] + \
            [p for p in (self.stoplist, self.abbreviations) if p is not None]
        for path in paths:
            if not Path(path).is_file():
                raise ConfigError(f"input file not found: {path}")

    def corpus_paths(self) -> list[tuple[str, Path]]:
        return [(c.tld, c.path) for c in self.corpora]

    def reference_paths(self) -> list[tuple[str, Path]]:
        return [(c.tld, c.path) for c in self.reference_corpora]


def load_config(path: Path | str) -> ExperimentConfig:
    """Parse and validate a config file; relative paths resolve against its directory."""
    path = Path(path)
    try:
        text = path.read_text("utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    config = ExperimentConfig.model_validate_json(text)
    return config.resolved(path.resolve().parent)


def worker_count() -> int:
    """joblib ``n_jobs`` from ``DIALECTO_THREADS``; unset or 0 means every core."""
    raw = os.environ.get(THREADS_ENV, "0").strip() or "0"
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if threads < 0:
        raise ConfigError(f"{THREADS_ENV} must be >= 0, got {threads}")
    return -1 if threads == 0 else threads
