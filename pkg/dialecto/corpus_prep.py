"""Raw dump parsing, cleaning, size rules and instance-set construction."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from joblib import Parallel, delayed
from pydantic import BaseModel, ConfigDict, PositiveInt, model_validator

from dialecto.arff_io import AttributeSpec, Dataset, Instance
from dialecto.errors import CorpusError, CorpusParseError, DatasetError

logger = logging.getLogger(__name__)

RELATION = "french"

DOC_OPEN_RE = re.compile(r"<doc(?=[\s>])")
DOC_ID_RE = re.compile(r"""(?:^|\s)id\s*=\s*(?:"([^"]*)"|'([^']*)'|([^\s>]+))""")
TAG_RE = re.compile(r"<doc(?:\s[^<>]*)?>|</doc\s*>|</?p(?:\s[^<>]*)?>")
STRAY_TAG_RE = re.compile(r"</?doc")

SENTENCE_END_RE = re.compile(r"[.!?…]+[\"'»”’)\]]*(?=\s)")
SENTENCE_OPENERS = "«\"'“‘(["
NEXT_CHAR_RE = re.compile(r"\s+(\S)")


@dataclass(frozen=True)
class RawDocument:
    source_id: str
    tld: str
    body: str

    def __post_init__(self):
        if not self.tld:
            raise CorpusError(f"document {self.source_id!r} has no tld")


@dataclass(frozen=True)
class CleanDocument:
    source_id: str
    tld: str
    text: str
    word_count: int


@dataclass(frozen=True)
class Subcorpus:
    tld: str
    documents: tuple[CleanDocument, ...]
    total_words: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        strays = {d.tld for d in self.documents} - {self.tld}
        if strays:
            raise CorpusError(f"subcorpus {self.tld!r} holds documents labelled {sorted(strays)}")
        object.__setattr__(self, "total_words", sum(d.word_count for d in self.documents))

    def __len__(self) -> int:
        return len(self.documents)


class SizePolicy(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_doc_words: PositiveInt = 3000
    min_corpus_words: PositiveInt = 50_000
    max_corpus_words: PositiveInt = 70_000

    @model_validator(mode="after")
    def _check_bounds(self):
        if self.min_corpus_words > self.max_corpus_words:
            raise ValueError("min_corpus_words must not exceed max_corpus_words")
        return self


class BudgetStatus(str, Enum):
    OK = "ok"
    UNDER = "under"
    OVER = "over"


@dataclass(frozen=True)
class ValidationReport:
    tld: str
    status: BudgetStatus
    total_words: int

    def to_dict(self) -> dict:
        return {"tld": self.tld, "status": self.status.value, "total_words": self.total_words}


class Granularity(str, Enum):
    DOCUMENT = "document"
    SENTENCE = "sentence"


def _byte_offset(text: str, index: int) -> int:
    return len(text[:index].encode("utf-8"))


def parse_dump(raw_text: str, tld: str) -> list[RawDocument]:
    """Split a ``<doc ...>...</doc>`` dump into documents, in file order."""
    documents = []
    pos = 0
    while (match := DOC_OPEN_RE.search(raw_text, pos)) is not None:
        tag_end = raw_text.find(">", match.end())
        close = raw_text.find("</doc>", tag_end + 1) if tag_end != -1 else -1
        if close == -1:
            raise CorpusParseError(f"unterminated <doc> block in {tld!r} dump",
                                   offset=_byte_offset(raw_text, match.start()))
        id_match = DOC_ID_RE.search(raw_text[match.end():tag_end])
        if id_match:
            source_id = next(g for g in id_match.groups() if g is not None)
        else:
            source_id = f"doc{len(documents)}"
        documents.append(RawDocument(source_id, tld, raw_text[tag_end + 1:close]))
        pos = close + len("</doc>")
    return documents


def read_dump(path: Path | str, tld: str | None = None) -> list[RawDocument]:
    """Read ``<tld>.txt``; the tld defaults to the file stem."""
    path = Path(path)
    data = path.read_bytes()
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CorpusParseError(f"{path} is not UTF-8", offset=exc.start) from exc
    return parse_dump(text, tld or path.stem)


def clean_document(doc: RawDocument) -> CleanDocument:
    text = TAG_RE.sub(" ", doc.body)
    text = STRAY_TAG_RE.sub(" ", text)
    words = text.split()
    return CleanDocument(doc.source_id, doc.tld, " ".join(words), len(words))


def apply_doc_limit(docs: Sequence[CleanDocument],
                    policy: SizePolicy) -> tuple[list[CleanDocument], list[CleanDocument]]:
    kept, dropped = [], []
    for doc in docs:
        (kept if doc.word_count <= policy.max_doc_words else dropped).append(doc)
    return kept, dropped


def validate_subcorpus(sc: Subcorpus, policy: SizePolicy) -> ValidationReport:
    if sc.total_words < policy.min_corpus_words:
        status = BudgetStatus.UNDER
    elif sc.total_words > policy.max_corpus_words:
        status = BudgetStatus.OVER
    else:
        status = BudgetStatus.OK
    return ValidationReport(sc.tld, status, sc.total_words)


def trim_to_budget(sc: Subcorpus, policy: SizePolicy) -> Subcorpus:
    """Drop trailing documents until the subcorpus fits ``max_corpus_words``."""
    documents = list(sc.documents)
    total = sc.total_words
    while documents and total > policy.max_corpus_words:
        total -= documents.pop().word_count
    if len(documents) < len(sc.documents):
        logger.info("%s: trimmed %d trailing documents to fit %d words",
                    sc.tld, len(sc.documents) - len(documents), policy.max_corpus_words)
    return Subcorpus(sc.tld, tuple(documents))


@lru_cache(maxsize=None)
def _bundled_abbreviations() -> frozenset[str]:
    text = resources.files("dialecto").joinpath("resources", "french_abbreviations.txt").read_text("utf-8")
    return _parse_word_list(text.splitlines())


def _parse_word_list(lines: Iterable[str]) -> frozenset[str]:
    entries = (line.split("#", 1)[0].strip() for line in lines)
    return frozenset(entry.lower() for entry in entries if entry)


def load_abbreviations(path: Path | str | None = None) -> frozenset[str]:
    """Abbreviations (lowercased, trailing period kept) that never end a sentence."""
    if path is None:
        return _bundled_abbreviations()
    return _parse_word_list(Path(path).read_text("utf-8").splitlines())


def _is_abbreviation(text: str, period: int, abbreviations: frozenset[str]) -> bool:
    start = period
    while start > 0 and not text[start - 1].isspace():
        start -= 1
    word = text[start:period + 1].lstrip(SENTENCE_OPENERS)
    return word.lower() in abbreviations


def sentence_tokenize(text: str, abbreviations: frozenset[str] | None = None) -> list[str]:
    """Rule-based French sentence splitter.

    A boundary is a run of ``.!?`` (plus closing quotes or brackets) followed
    by whitespace and then an uppercase letter or an opening quote. A lone
    period after a listed abbreviation is not a boundary.
    """
    if abbreviations is None:
        abbreviations = _bundled_abbreviations()
    cuts = [0]
    for match in SENTENCE_END_RE.finditer(text):
        following = NEXT_CHAR_RE.match(text, match.end())
        if following is None:
            continue
        nxt = following.group(1)
        if not (nxt.isupper() or nxt in SENTENCE_OPENERS):
            continue
        punct = match.group().rstrip("\"'»”’)]")
        if punct == "." and _is_abbreviation(text, match.start(), abbreviations):
            continue
        cuts.append(match.end())
    cuts.append(len(text))
    pieces = (text[a:b].strip() for a, b in zip(cuts, cuts[1:]))
    return [piece for piece in pieces if piece]


def load_subcorpus(path: Path | str, policy: SizePolicy,
                   tld: str | None = None) -> tuple[Subcorpus, list[CleanDocument]]:
    """Read, clean and cap one dump; returns the subcorpus and the dropped documents."""
    raw = read_dump(path, tld)
    cleaned = [clean_document(doc) for doc in raw]
    kept, dropped = apply_doc_limit(cleaned, policy)
    label = tld or Path(path).stem
    if dropped:
        logger.info("%s: dropped %d documents over %d words", label, len(dropped), policy.max_doc_words)
    return Subcorpus(label, tuple(kept)), dropped


def load_subcorpora(paths: Sequence[tuple[str, Path]], policy: SizePolicy,
                    n_jobs: int = 1) -> list[Subcorpus]:
    """Load several dumps in parallel; results keep the declared order."""
    results = Parallel(n_jobs=n_jobs)(
        delayed(load_subcorpus)(path, policy, tld) for tld, path in paths
    )
    return [sc for sc, _ in results]


def build_dataset(subcorpora: Sequence[Subcorpus], granularity: Granularity | str,
                  abbreviations: frozenset[str] | None = None) -> Dataset:
    """One instance per document or per sentence, labelled with its tld."""
    granularity = Granularity(granularity)
    if len(subcorpora) < 2:
        raise DatasetError("at least two subcorpora are needed to build a dataset")
    tlds = [sc.tld for sc in subcorpora]
    if len(set(tlds)) != len(tlds):
        raise DatasetError(f"duplicate subcorpus labels in {tlds}")
    for sc in subcorpora:
        if not sc.documents:
            raise DatasetError(f"subcorpus {sc.tld!r} is empty")
    labels = tuple(sorted(tlds))
    index = {label: i for i, label in enumerate(labels)}
    instances = []
    for sc in subcorpora:
        for doc in sc.documents:
            if granularity is Granularity.DOCUMENT:
                instances.append(Instance((doc.text, index[sc.tld])))
            else:
                instances.extend(Instance((sentence, index[sc.tld]))
                                 for sentence in sentence_tokenize(doc.text, abbreviations))
    attributes = (AttributeSpec.string("text"), AttributeSpec.nominal("class", labels))
    return Dataset(RELATION, attributes, tuple(instances))
