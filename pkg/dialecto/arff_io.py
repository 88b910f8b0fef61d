"""Dataset model and the Attribute-Relation File Format codec.

The writer emits a fixed dialect (lowercase keywords, single-quoted strings
with backslash escapes, shortest round-trip numbers); the reader accepts that
dialect plus ``%`` comments, blank lines, case-insensitive keywords, double
quotes and sparse ``{index value, ...}`` rows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence, Union

import numpy as np
from scipy import sparse

from dialecto.errors import ArffError, DatasetError

Value = Union[str, int, float, None]


class AttributeKind(str, Enum):
    STRING = "string"
    NOMINAL = "nominal"
    NUMERIC = "numeric"


@dataclass(frozen=True)
class AttributeSpec:
    name: str
    kind: AttributeKind
    labels: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.kind is AttributeKind.NOMINAL:
            if not self.labels:
                raise DatasetError(f"nominal attribute {self.name!r} has no labels")
            if len(set(self.labels)) != len(self.labels):
                raise DatasetError(f"nominal attribute {self.name!r} has duplicate labels")
        elif self.labels:
            raise DatasetError(f"only nominal attributes carry labels ({self.name!r})")

    @classmethod
    def string(cls, name: str) -> "AttributeSpec":
        return cls(name, AttributeKind.STRING)

    @classmethod
    def nominal(cls, name: str, labels: Sequence[str]) -> "AttributeSpec":
        return cls(name, AttributeKind.NOMINAL, tuple(labels))

    @classmethod
    def numeric(cls, name: str) -> "AttributeSpec":
        return cls(name, AttributeKind.NUMERIC)

    def check(self, value: Value) -> None:
        if value is None:
            return
        if self.kind is AttributeKind.STRING:
            ok = isinstance(value, str)
        elif self.kind is AttributeKind.NOMINAL:
            ok = (isinstance(value, (int, np.integer)) and not isinstance(value, bool)
                  and 0 <= value < len(self.labels))
        else:
            ok = (isinstance(value, (int, float, np.integer, np.floating))
                  and not isinstance(value, bool) and math.isfinite(value))
        if not ok:
            raise DatasetError(f"invalid {self.kind.value} value {value!r} for {self.name!r}")


@dataclass(frozen=True)
class Instance:
    """One data row; nominal values are label indices, ``None`` is missing."""

    values: tuple[Value, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))

    def sparse_pairs(self, attributes: Sequence[AttributeSpec]) -> tuple[tuple[int, Value], ...]:
        """Index/value pairs with numeric zeros left implicit."""
        pairs = []
        for i, (attr, value) in enumerate(zip(attributes, self.values)):
            if attr.kind is AttributeKind.NUMERIC and value is not None and _is_plain_zero(value):
                continue
            pairs.append((i, value))
        return tuple(pairs)


@dataclass(frozen=True)
class Dataset:
    """Ordered attributes plus instances; the class attribute is the last one."""

    relation: str
    attributes: tuple[AttributeSpec, ...]
    instances: tuple[Instance, ...] = ()
    sparse: bool = field(default=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        object.__setattr__(self, "instances", tuple(
            inst if isinstance(inst, Instance) else Instance(tuple(inst)) for inst in self.instances
        ))
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            raise DatasetError("attribute names must be unique")
        width = len(self.attributes)
        for row, inst in enumerate(self.instances):
            if len(inst.values) != width:
                raise DatasetError(f"instance {row} has {len(inst.values)} values, expected {width}")
            for attr, value in zip(self.attributes, inst.values):
                attr.check(value)

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def class_index(self) -> int:
        if not self.attributes:
            raise DatasetError("dataset has no attributes")
        return len(self.attributes) - 1

    @property
    def class_attribute(self) -> AttributeSpec:
        attr = self.attributes[self.class_index]
        if attr.kind is not AttributeKind.NOMINAL:
            raise DatasetError(f"class attribute {attr.name!r} is not nominal")
        return attr

    @property
    def labels(self) -> tuple[str, ...]:
        return self.class_attribute.labels

    def class_values(self) -> np.ndarray:
        """Class label indices, one per instance."""
        ci = self.class_index
        if self.attributes[ci].kind is not AttributeKind.NOMINAL:
            raise DatasetError(f"class attribute {self.attributes[ci].name!r} is not nominal")
        values = [inst.values[ci] for inst in self.instances]
        if any(v is None for v in values):
            raise DatasetError("class value missing")
        return np.asarray(values, dtype=np.int64)

    def column(self, index: int) -> list[Value]:
        return [inst.values[index] for inst in self.instances]

    def numeric_matrix(self) -> tuple[sparse.csr_matrix, np.ndarray]:
        """Feature matrix over every non-class attribute plus class indices."""
        features = self.attributes[:self.class_index]
        if any(a.kind is not AttributeKind.NUMERIC for a in features):
            raise DatasetError("every non-class attribute must be numeric")
        rows = [inst.values[:self.class_index] for inst in self.instances]
        if any(v is None for row in rows for v in row):
            raise DatasetError("missing numeric values are not supported")
        dense = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(features))
        return sparse.csr_matrix(dense), self.class_values()

    @classmethod
    def from_matrix(cls, relation: str, attributes: Sequence[AttributeSpec],
                    X, y: Sequence[int]) -> "Dataset":
        """Build a sparse-flagged dataset from a feature matrix and class indices."""
        dense = X.toarray() if sparse.issparse(X) else np.asarray(X, dtype=np.float64)
        rows = dense.tolist()
        instances = tuple(Instance(tuple(row) + (int(label),)) for row, label in zip(rows, y))
        return cls(relation, tuple(attributes), instances, sparse=True)


# ---------------------------------------------------------------------------
# writing
# ---------------------------------------------------------------------------

_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\r": "\\r", "\t": "\\t"}
_UNESCAPES = {"n": "\n", "r": "\r", "t": "\t"}
_NEEDS_QUOTES = set(",{}%'\"\\")


def _is_plain_zero(value) -> bool:
    return value == 0 and math.copysign(1.0, value) > 0


def _quote(text: str) -> str:
    return "'" + "".join(_ESCAPES.get(ch, ch) for ch in text) + "'"


def _quote_name(text: str) -> str:
    if (not text or text == "?" or text.startswith("@")
            or any(ch.isspace() or ch in _NEEDS_QUOTES for ch in text)):
        return _quote(text)
    return text


def _format_number(value) -> str:
    text = repr(float(value))
    if text.endswith(".0") and "e" not in text:
        text = text[:-2]
    return text


def _format_value(attr: AttributeSpec, value: Value) -> str:
    if value is None:
        return "?"
    if attr.kind is AttributeKind.STRING:
        return _quote(value)
    if attr.kind is AttributeKind.NOMINAL:
        return _quote_name(attr.labels[value])
    return _format_number(value)


def _type_declaration(attr: AttributeSpec) -> str:
    if attr.kind is AttributeKind.NOMINAL:
        return "{" + ",".join(_quote_name(label) for label in attr.labels) + "}"
    return attr.kind.value


def write_arff(ds: Dataset) -> str:
    lines = [f"@relation {_quote_name(ds.relation)}", ""]
    for attr in ds.attributes:
        lines.append(f"@attribute {_quote_name(attr.name)} {_type_declaration(attr)}")
    lines += ["", "@data"]
    for inst in ds.instances:
        if ds.sparse:
            pairs = inst.sparse_pairs(ds.attributes)
            body = ", ".join(f"{i} {_format_value(ds.attributes[i], v)}" for i, v in pairs)
            lines.append("{" + body + "}")
        else:
            lines.append(",".join(_format_value(a, v) for a, v in zip(ds.attributes, inst.values)))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# reading
# ---------------------------------------------------------------------------

class _Scanner:
    """Cursor over one line of ARFF text."""

    def __init__(self, text: str, line: int):
        self.text = text
        self.pos = 0
        self.line = line

    def at_end(self) -> bool:
        return self.pos >= len(self.text)

    def skip_space(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t":
            self.pos += 1

    def quoted(self) -> str:
        quote = self.text[self.pos]
        self.pos += 1
        buf = []
        while self.pos < len(self.text):
            ch = self.text[self.pos]
            if ch == "\\" and self.pos + 1 < len(self.text):
                nxt = self.text[self.pos + 1]
                buf.append(_UNESCAPES.get(nxt, nxt))
                self.pos += 2
            elif ch == quote:
                self.pos += 1
                return "".join(buf)
            else:
                buf.append(ch)
                self.pos += 1
        raise ArffError("unterminated quoted value", self.line)

    def token(self, stops: str) -> tuple[str, bool]:
        """Read a quoted token, or a bare token up to any char in ``stops``."""
        self.skip_space()
        if not self.at_end() and self.text[self.pos] in "'\"":
            return self.quoted(), True
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in stops:
            self.pos += 1
        return self.text[start:self.pos].strip(), False

    def expect_separator(self) -> bool:
        """Consume a comma; return False at end of line."""
        self.skip_space()
        if self.at_end():
            return False
        if self.text[self.pos] != ",":
            raise ArffError(f"expected ',' at column {self.pos + 1}", self.line)
        self.pos += 1
        return True


def _split_values(text: str, line: int) -> list[tuple[str, bool]]:
    scanner = _Scanner(text, line)
    values = [scanner.token(",")]
    while scanner.expect_separator():
        values.append(scanner.token(","))
    return values


def _split_pairs(text: str, line: int) -> list[tuple[str, str, bool]]:
    scanner = _Scanner(text, line)
    scanner.skip_space()
    if scanner.at_end():
        return []
    pairs = []
    while True:
        index, _ = scanner.token(" \t,")
        value, quoted = scanner.token(",")
        pairs.append((index, value, quoted))
        if not scanner.expect_separator():
            return pairs


def _keyword(line: str, word: str) -> str | None:
    """Remainder of ``line`` if it starts with ``word`` (case-insensitive)."""
    head = line[:len(word)]
    if head.lower() != word:
        return None
    rest = line[len(word):]
    if rest and not rest[0].isspace():
        return None
    return rest.strip()


def _parse_attribute(rest: str, line: int) -> AttributeSpec:
    scanner = _Scanner(rest, line)
    name, _ = scanner.token(" \t")
    if not name and not rest.startswith(("'", '"')):
        raise ArffError("attribute without a name", line)
    kind = rest[scanner.pos:].strip()
    lowered = kind.lower()
    if kind.startswith("{"):
        if not kind.endswith("}"):
            raise ArffError(f"unterminated nominal declaration for {name!r}", line)
        inner = kind[1:-1]
        if not inner.strip():
            raise ArffError(f"nominal attribute {name!r} has no labels", line)
        labels = tuple(value for value, _ in _split_values(inner, line))
        return AttributeSpec.nominal(name, labels)
    if lowered == "string":
        return AttributeSpec.string(name)
    if lowered in ("numeric", "real", "integer"):
        return AttributeSpec.numeric(name)
    raise ArffError(f"unsupported attribute type {kind!r} for {name!r}", line)


def _convert(attr: AttributeSpec, token: str, quoted: bool, line: int) -> Value:
    if token == "?" and not quoted:
        return None
    if attr.kind is AttributeKind.STRING:
        return token
    if attr.kind is AttributeKind.NOMINAL:
        try:
            return attr.labels.index(token)
        except ValueError:
            raise ArffError(f"unknown label {token!r} for attribute {attr.name!r}", line) from None
    try:
        number = float(token)
    except ValueError:
        raise ArffError(f"bad numeric value {token!r} for attribute {attr.name!r}", line) from None
    if not math.isfinite(number):
        raise ArffError(f"non-finite value {token!r} for attribute {attr.name!r}", line)
    return number


def _implicit(attr: AttributeSpec) -> Value:
    if attr.kind is AttributeKind.NUMERIC:
        return 0.0
    if attr.kind is AttributeKind.NOMINAL:
        return 0
    return ""


def _parse_sparse(body: str, attributes: Sequence[AttributeSpec], line: int) -> Instance:
    values: list[Value] = [_implicit(a) for a in attributes]
    last = -1
    for index_text, token, quoted in _split_pairs(body, line):
        try:
            index = int(index_text)
        except ValueError:
            raise ArffError(f"bad sparse index {index_text!r}", line) from None
        if index <= last or index >= len(attributes):
            raise ArffError(f"sparse index {index} out of order or range", line)
        values[index] = _convert(attributes[index], token, quoted, line)
        last = index
    return Instance(tuple(values))


def read_arff(text: str) -> Dataset:
    relation: str | None = None
    attributes: list[AttributeSpec] = []
    instances: list[Instance] = []
    in_data = False
    sparse_rows = False
    for number, raw in enumerate(text.split("\n"), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        try:
            if in_data:
                if line.startswith("{"):
                    if not line.endswith("}"):
                        raise ArffError("unterminated sparse row", number)
                    if not instances:
                        sparse_rows = True
                    instances.append(_parse_sparse(line[1:-1], attributes, number))
                    continue
                tokens = _split_values(line, number)
                if len(tokens) != len(attributes):
                    raise ArffError(f"expected {len(attributes)} values, found {len(tokens)}", number)
                instances.append(Instance(tuple(
                    _convert(a, tok, quoted, number) for a, (tok, quoted) in zip(attributes, tokens)
                )))
                continue
            if (rest := _keyword(line, "@relation")) is not None:
                if relation is not None:
                    raise ArffError("duplicate @relation", number)
                if not rest:
                    raise ArffError("missing relation name", number)
                relation, _ = _Scanner(rest, number).token("")
            elif (rest := _keyword(line, "@attribute")) is not None:
                if relation is None:
                    raise ArffError("@attribute before @relation", number)
                attributes.append(_parse_attribute(rest, number))
            elif _keyword(line, "@data") is not None:
                if relation is None:
                    raise ArffError("@data before @relation", number)
                in_data = True
            else:
                raise ArffError(f"unexpected header line {line[:40]!r}", number)
        except DatasetError as exc:
            if isinstance(exc, ArffError):
                raise
            raise ArffError(str(exc), number) from exc
    if not in_data:
        raise ArffError("missing @data section")
    try:
        return Dataset(relation, tuple(attributes), tuple(instances), sparse=sparse_rows)
    except DatasetError as exc:
        raise ArffError(str(exc)) from exc


def read_arff_bytes(data: bytes) -> Dataset:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ArffError(f"input is not UTF-8 ({exc.reason} at byte {exc.start})") from exc
    return read_arff(text)
