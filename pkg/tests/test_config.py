"""Experiment config parsing, path resolution and the thread variable."""

import json

import pytest
from pydantic import ValidationError

from dialecto.classifiers import SvmSpec, TreeSpec
from dialecto.config import ExperimentConfig, load_config, worker_count
from dialecto.corpus_prep import Granularity
from dialecto.errors import ConfigError
from dialecto.evaluation import CrossValidationProtocol

CORPORA = [{"tld": "dz", "path": "raw/dz.txt"}, {"tld": "sn", "path": "raw/sn.txt"}]


def _write(path, document):
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


class TestExperimentConfig:

    def test_defaults(self):
        config = ExperimentConfig.model_validate({"corpora": CORPORA})
        assert config.granularities == [Granularity.DOCUMENT]
        assert len(config.features) == 6
        assert [c.name for c in config.classifiers] == ["MultinomialNB", "Logistic", "SMO", "Bagging", "J48"]
        assert [p.name for p in config.protocols] == ["Training set", "10-fold CV", "60/40 split"]
        assert config.size_policy.max_corpus_words == 70_000

    def test_tagged_axes(self):
        config = ExperimentConfig.model_validate({
            "corpora": CORPORA,
            "classifiers": [{"variant": "LinearSVM", "C": 2.0}, {"variant": "DecisionTree", "min_leaf": 3}],
            "protocols": [{"kind": "cross_validation", "folds": 5}],
        })
        assert config.classifiers == [SvmSpec(C=2.0), TreeSpec(min_leaf=3)]
        assert config.protocols == [CrossValidationProtocol(folds=5)]

    @pytest.mark.parametrize("update", [
        {"corpora": CORPORA[:1]},
        {"corpora": [CORPORA[0], CORPORA[0]]},
        {"reference_corpora": [{"tld": "dz", "path": "ref.txt"}]},
        {"features": [{"name": "x"}, {"name": "x", "stopwords": True}]},
        {"classifiers": [{"variant": "Bogus"}]},
        {"similarity_top_n": 9},
        {"mwe_n": 5},
        {"unknown_key": 1},
    ])
    def test_invalid(self, update):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({"corpora": CORPORA, **update})


class TestLoadConfig:

    def test_paths_relative_to_file(self, tmp_path):
        (tmp_path / "cfg").mkdir()
        path = _write(tmp_path / "cfg" / "experiment.json", {"corpora": CORPORA, "output_dir": "../out"})
        config = load_config(path)
        assert config.corpora[0].path == (tmp_path / "cfg" / "raw" / "dz.txt").resolve()
        assert config.output_dir == (tmp_path / "out").resolve()
        assert config.stoplist is None

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read config"):
            load_config(tmp_path / "absent.json")

    def test_check_inputs(self, tmp_path):
        config = load_config(_write(tmp_path / "experiment.json", {"corpora": CORPORA}))
        with pytest.raises(ConfigError, match="input file not found"):
            config.check_inputs()
        (tmp_path / "raw").mkdir()
        for entry in CORPORA:
            (tmp_path / entry["path"]).write_text("", encoding="utf-8")
        config.check_inputs()


class TestWorkerCount:

    @pytest.mark.parametrize("raw, expected", [(None, -1), ("0", -1), ("", -1), ("3", 3)])
    def test_values(self, monkeypatch, raw, expected):
        if raw is None:
            monkeypatch.delenv("DIALECTO_THREADS", raising=False)
        else:
            monkeypatch.setenv("DIALECTO_THREADS", raw)
        assert worker_count() == expected

    @pytest.mark.parametrize("raw", ["-1", "many"])
    def test_invalid(self, monkeypatch, raw):
        monkeypatch.setenv("DIALECTO_THREADS", raw)
        with pytest.raises(ConfigError, match="DIALECTO_THREADS"):
            worker_count()
