"""Command-line front end: prepare → train/evaluate → analyze.

Exit codes: 0 on success, 1 on usage, input or pipeline errors, 2 when
``prepare --strict`` finds a subcorpus outside the word budget.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Sequence

from pydantic import ValidationError

from dialecto.analysis import similarity_matrix, top_mwe
from dialecto.arff_io import write_arff
from dialecto.classifiers import (
    NaiveBayesModel,
    TreeModel,
    fit_classifier,
    inspect_mnb,
    inspect_tree,
    model_from_json,
    model_to_json,
)
from dialecto.config import ExperimentConfig, load_config, worker_count
from dialecto.corpus_prep import (
    BudgetStatus,
    Granularity,
    Subcorpus,
    build_dataset,
    load_abbreviations,
    load_subcorpora,
    trim_to_budget,
    validate_subcorpus,
)
from dialecto.errors import ConfigError, DialectoError
from dialecto.evaluation import run_grid
from dialecto.features import FeaturePipeline, load_stoplist, rank_words, ranking_to_json, text_and_class

logger = logging.getLogger("dialecto")

EXIT_OK, EXIT_ERROR, EXIT_STRICT = 0, 1, 2


def write_atomic(path: Path, text: str) -> Path:
    """Write ``text`` next to ``path`` first, then rename over it."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with tempfile.NamedTemporaryFile("w", encoding="utf-8", dir=path.parent, prefix=f".{path.name}.",
                                     suffix=".tmp", delete=False, newline="\n") as handle:
        handle.write(text)
        temp = Path(handle.name)
    os.replace(temp, path)
    return path


def _save(path: Path, text: str, what: str):
    write_atomic(path, text)
    logger.info("Saved %s → %s", what, path)


def _load_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    config.check_inputs()
    updates = {}
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "paper_mode", False):
        updates["paper_mode"] = True
    if not updates:
        return config
    return ExperimentConfig.model_validate({**config.model_dump(), **updates})


def _load_corpora(config: ExperimentConfig, paths) -> list[Subcorpus]:
    subcorpora = load_subcorpora(paths, config.size_policy, n_jobs=worker_count())
    if config.trim_to_budget:
        subcorpora = [trim_to_budget(sc, config.size_policy) for sc in subcorpora]
    return subcorpora


def _document_texts(config: ExperimentConfig, subcorpora: list[Subcorpus]):
    ds = build_dataset(subcorpora, Granularity.DOCUMENT, load_abbreviations(config.abbreviations))
    texts, y = text_and_class(ds)
    return ds, texts, y


def _save_ranking(config: ExperimentConfig, texts, y, n_classes: int):
    ranking, vocab = rank_words(texts, y, n_classes, config.features[0].stwv)
    _save(config.output_dir / "ranking.json", ranking_to_json(ranking, vocab) + "\n", "ranking")


def cmd_prepare(args) -> int:
    config = _load_config(args)
    subcorpora = _load_corpora(config, config.corpus_paths())
    reports = [validate_subcorpus(sc, config.size_policy) for sc in subcorpora]
    for report in reports:
        log = logger.info if report.status is BudgetStatus.OK else logger.warning
        log("%s: %d words (%s)", report.tld, report.total_words, report.status.value)
    _save(config.output_dir / "validation.json",
          json.dumps([r.to_dict() for r in reports], indent=2) + "\n", "validation report")

    abbreviations = load_abbreviations(config.abbreviations)
    granularities = [Granularity.DOCUMENT] + [g for g in config.granularities if g is not Granularity.DOCUMENT]
    for granularity in granularities:
        ds = build_dataset(subcorpora, granularity, abbreviations)
        _save(config.output_dir / f"french-{granularity.value}.arff", write_arff(ds),
              f"ARFF ({len(ds)} instances)")

    violations = [r for r in reports if r.status is not BudgetStatus.OK]
    if args.strict and violations:
        logger.error("%d subcorpora outside %d-%d words: %s", len(violations),
                     config.size_policy.min_corpus_words, config.size_policy.max_corpus_words,
                     ", ".join(r.tld for r in violations))
        return EXIT_STRICT
    return EXIT_OK


def cmd_evaluate(args) -> int:
    config = _load_config(args)
    subcorpora = _load_corpora(config, config.corpus_paths())
    abbreviations = load_abbreviations(config.abbreviations)
    stoplist = load_stoplist(config.stoplist)
    progress = logger.getEffectiveLevel() <= logging.INFO

    grids = {}
    for granularity in config.granularities:
        ds = build_dataset(subcorpora, granularity, abbreviations)
        grids[granularity.value] = run_grid(
            ds, config.features, config.classifiers, config.protocols,
            seed=config.seed, paper_mode=config.paper_mode, stoplist=stoplist,
            n_jobs=worker_count(), progress=progress, title=f"{granularity.value} dataset",
        )
    tables = "\n\n".join(grid.render_tables() for grid in grids.values())
    document = {"granularities": {name: grid.to_dict() for name, grid in grids.items()}}
    _save(config.output_dir / "grid.json", json.dumps(document, ensure_ascii=False, indent=2) + "\n", "grid")
    _save(config.output_dir / "tables.txt", tables, "tables")
    print(tables)

    ds, texts, y = _document_texts(config, subcorpora)
    _save_ranking(config, texts, y, len(ds.labels))
    return EXIT_OK


def _pick(axis: list, name: str | None, what: str):
    if name is None:
        return axis[0]
    for spec in axis:
        if spec.name == name:
            return spec
    raise ConfigError(f"no {what} named {name!r}; choose from {[s.name for s in axis]}")


def cmd_train(args) -> int:
    config = _load_config(args)
    classifier = _pick(config.classifiers, args.classifier, "classifier")
    features = _pick(config.features, args.features, "feature set")
    subcorpora = _load_corpora(config, config.corpus_paths())
    ds, texts, y = _document_texts(config, subcorpora)

    pipeline = FeaturePipeline(features, load_stoplist(config.stoplist))
    X = pipeline.fit_transform(texts, y, len(ds.labels))
    model = fit_classifier(classifier, X, y, ds.labels, config.seed)
    logger.info("Trained %s on %d documents x %d words (%s)", classifier.name, X.shape[0], X.shape[1],
                features.name)
    output = Path(args.output) if args.output else \
        config.output_dir / f"model-{classifier.name}-{features.name}.json"
    _save(output, model_to_json(model, pipeline.vocabulary_.words) + "\n", "model")
    _save_ranking(config, texts, y, len(ds.labels))
    return EXIT_OK


def _inspect_model(config: ExperimentConfig, path: Path):
    saved = model_from_json(Path(path).read_text("utf-8"))
    if isinstance(saved.model, TreeModel):
        summary = inspect_tree(saved.model, saved.vocabulary).render()
    elif isinstance(saved.model, NaiveBayesModel):
        summary = inspect_mnb(saved.model, config.inspect_top_n, saved.vocabulary).render()
    else:
        raise ConfigError(f"cannot inspect a {saved.model.variant} model; use a tree or naive Bayes model")
    _save(config.output_dir / f"{Path(path).stem}-summary.txt", summary + "\n", "model summary")
    print(summary)


def cmd_analyze(args) -> int:
    config = _load_config(args)
    corpora = _load_corpora(config, config.corpus_paths() + config.reference_paths())

    matrix = similarity_matrix(corpora, config.similarity_top_n, n_jobs=worker_count())
    _save(config.output_dir / "similarity.txt", matrix.render(), "similarity matrix")
    _save(config.output_dir / "similarity.json", matrix.to_json() + "\n", "similarity matrix")
    print(matrix.render())

    abbreviations = load_abbreviations(config.abbreviations)
    national = corpora[:len(config.corpora)]
    mwes = {sc.tld: top_mwe(sc, config.mwe_n, config.mwe_top_k, abbreviations) for sc in national}
    document = {tld: [e.to_dict() for e in entries] for tld, entries in mwes.items()}
    _save(config.output_dir / "mwe.json", json.dumps(document, ensure_ascii=False, indent=2) + "\n", "MWE lists")
    for tld, entries in mwes.items():
        if entries:
            logger.info("%s: top MWE %r (%d)", tld, " ".join(entries[0].ngram), entries[0].count)

    if args.model:
        _inspect_model(config, args.model)
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """Usage errors exit 1; exit 2 is reserved for budget violations."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dialecto", description="Country-of-origin classification of French web text")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    commands = parser.add_subparsers(dest="command", required=True)

    prepare = commands.add_parser("prepare", help="clean dumps, check word budgets, write ARFF files")
    prepare.add_argument("--config", required=True, help="experiment JSON file")
    prepare.add_argument("--strict", action="store_true", help="exit 2 when a subcorpus is outside the budget")
    prepare.set_defaults(handler=cmd_prepare)

    evaluate = commands.add_parser("evaluate", help="run the feature × classifier × protocol grid")
    evaluate.add_argument("--config", required=True, help="experiment JSON file")
    evaluate.add_argument("--paper-mode", action="store_true",
                          help="fit feature filters on the whole dataset before splitting")
    evaluate.add_argument("--seed", type=int, help="master seed (overrides the config)")
    evaluate.set_defaults(handler=cmd_evaluate)

    train = commands.add_parser("train", help="fit one classifier on the document dataset and save it")
    train.add_argument("--config", required=True, help="experiment JSON file")
    train.add_argument("--classifier", help="classifier name from the config (default: the first)")
    train.add_argument("--features", help="feature set name from the config (default: the first)")
    train.add_argument("--output", help="model path (default: <output_dir>/model-<classifier>-<features>.json)")
    train.set_defaults(handler=cmd_train)

    analyze = commands.add_parser("analyze", help="corpus similarity, MWEs and model introspection")
    analyze.add_argument("--config", required=True, help="experiment JSON file")
    analyze.add_argument("--model", help="saved tree or naive Bayes model to summarise")
    analyze.set_defaults(handler=cmd_analyze)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(format="%(message)s", level=level, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        return args.handler(args)
    except (DialectoError, ValidationError, OSError) as exc:
        logger.error("error: %s", exc)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
