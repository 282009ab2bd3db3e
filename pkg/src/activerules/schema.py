"""Input-space schema, dataset parsing, instance validation, and distances.

An input space is an ordered list of attributes, each either continuous
(a bounded real interval) or categorical (a finite set of string values).
Instances are stored publicly as value tuples and internally as float64
rows: continuous attributes keep their raw value, categorical attributes
carry the integer code of their value within the declared domain.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DatasetError, SchemaError, ValidationError

CONTINUOUS = "continuous"
CATEGORICAL = "categorical"


@dataclass(frozen=True)
class AttributeSpec:
    """One attribute: a bounded real range or a finite value domain."""

    name: str
    kind: str
    lo: float = math.nan
    hi: float = math.nan
    values: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.name:
            raise SchemaError("attribute name must be non-empty")
        if self.kind == CONTINUOUS:
            if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
                raise SchemaError(f"attribute {self.name!r}: bounds must be finite")
            if not self.lo < self.hi:
                raise SchemaError(
                    f"attribute {self.name!r}: min must be strictly below max "
                    f"(got [{self.lo}, {self.hi}])"
                )
        elif self.kind == CATEGORICAL:
            if not self.values:
                raise SchemaError(f"attribute {self.name!r}: empty value domain")
            if len(set(self.values)) != len(self.values):
                raise SchemaError(f"attribute {self.name!r}: duplicate domain values")
        else:
            raise SchemaError(f"attribute {self.name!r}: unknown kind {self.kind!r}")

    @staticmethod
    def continuous(name: str, lo: float, hi: float) -> "AttributeSpec":
        return AttributeSpec(name=name, kind=CONTINUOUS, lo=float(lo), hi=float(hi))

    @staticmethod
    def categorical(name: str, values) -> "AttributeSpec":
        return AttributeSpec(name=name, kind=CATEGORICAL, values=tuple(values))

    @property
    def is_continuous(self) -> bool:
        return self.kind == CONTINUOUS

    @property
    def span(self) -> float:
        return self.hi - self.lo


@dataclass(frozen=True)
class Instance:
    """An attribute-value vector in schema order."""

    values: tuple

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i):
        return self.values[i]


@dataclass(frozen=True)
class LabeledInstance:
    """An instance together with its oracle label and provenance."""

    instance: Instance
    label: int
    origin: str = "real"  # "real" or "synthetic"

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValidationError(f"label must be 0 or 1, got {self.label!r}")
        if self.origin not in ("real", "synthetic"):
            raise ValidationError(f"unknown origin {self.origin!r}")


@dataclass(frozen=True)
class InputSpace:
    """Ordered attribute schema defining the domain of all instances."""

    attributes: tuple[AttributeSpec, ...]

    def __post_init__(self):
        if not self.attributes:
            raise SchemaError("schema must declare at least one attribute")
        names = [a.name for a in self.attributes]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise SchemaError(f"duplicate attribute names: {', '.join(dup)}")

    @property
    def m(self) -> int:
        return len(self.attributes)

    @cached_property
    def kinds(self) -> np.ndarray:
        """uint8 per attribute: 0 continuous, 1 categorical."""
        return np.array(
            [0 if a.is_continuous else 1 for a in self.attributes], dtype=np.uint8
        )

    @cached_property
    def lows(self) -> np.ndarray:
        return np.array(
            [a.lo if a.is_continuous else 0.0 for a in self.attributes], dtype=np.float64
        )

    @cached_property
    def ranges(self) -> np.ndarray:
        """Per attribute: hi - lo for continuous, 1.0 placeholder otherwise."""
        return np.array(
            [a.span if a.is_continuous else 1.0 for a in self.attributes],
            dtype=np.float64,
        )

    @cached_property
    def domain_sizes(self) -> np.ndarray:
        return np.array(
            [1 if a.is_continuous else len(a.values) for a in self.attributes],
            dtype=np.int64,
        )

    @cached_property
    def max_domain(self) -> int:
        return int(self.domain_sizes.max())

    @cached_property
    def _codes(self) -> tuple[dict, ...]:
        return tuple(
            {} if a.is_continuous else {v: i for i, v in enumerate(a.values)}
            for a in self.attributes
        )

    def index_of(self, name: str) -> int:
        for i, a in enumerate(self.attributes):
            if a.name == name:
                return i
        raise SchemaError(f"unknown attribute {name!r}")

    def code_of(self, attr_index: int, value: str) -> int:
        return self._codes[attr_index][value]

    def validate_instance(self, x: Instance) -> None:
        """Raise ValidationError unless every value fits its attribute."""
        if len(x.values) != self.m:
            raise ValidationError(
                f"expected {self.m} values, got {len(x.values)}"
            )
        for i, (a, v) in enumerate(zip(self.attributes, x.values)):
            if a.is_continuous:
                if not isinstance(v, (int, float)) or isinstance(v, bool):
                    raise ValidationError(
                        f"attribute {a.name!r}: expected a number, got {v!r}"
                    )
                if not (a.lo <= float(v) <= a.hi):
                    raise ValidationError(
                        f"attribute {a.name!r}: value {v} outside [{a.lo}, {a.hi}]"
                    )
            else:
                if v not in self._codes[i]:
                    raise ValidationError(
                        f"attribute {a.name!r}: value {v!r} not in domain"
                    )

    # ---- encoding -------------------------------------------------------

    def encode(self, x: Instance) -> np.ndarray:
        """Encode one instance as a float64 row (categorical values as codes)."""
        row = np.empty(self.m, dtype=np.float64)
        for i, (a, v) in enumerate(zip(self.attributes, x.values)):
            row[i] = float(v) if a.is_continuous else self._codes[i][v]
        return row

    def encode_many(self, xs) -> np.ndarray:
        out = np.empty((len(xs), self.m), dtype=np.float64)
        for i, x in enumerate(xs):
            out[i] = self.encode(x)
        return out

    def decode(self, row) -> Instance:
        vals = []
        for a, v in zip(self.attributes, row):
            vals.append(float(v) if a.is_continuous else a.values[int(v)])
        return Instance(tuple(vals))


def load_schema(schema_text: str) -> InputSpace:
    """Parse a JSON schema document into an InputSpace.

    The document is ``{"attributes": [...]}`` where each entry is either
    ``{"name", "type": "continuous", "min", "max"}`` or
    ``{"name", "type": "categorical", "values": [...]}``.
    """
    try:
        doc = json.loads(schema_text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"schema is not valid JSON: {e}") from e
    if not isinstance(doc, dict) or "attributes" not in doc:
        raise SchemaError('schema must be an object with an "attributes" list')
    entries = doc["attributes"]
    if not isinstance(entries, list) or not entries:
        raise SchemaError('"attributes" must be a non-empty list')

    attrs = []
    for i, entry in enumerate(entries):
        if not isinstance(entry, dict):
            raise SchemaError(f"attribute #{i}: expected an object")
        name = entry.get("name")
        if not isinstance(name, str) or not name:
            raise SchemaError(f"attribute #{i}: missing or invalid name")
        typ = entry.get("type")
        if typ == CONTINUOUS:
            if "min" not in entry or "max" not in entry:
                raise SchemaError(f"attribute {name!r}: continuous needs min and max")
            try:
                lo, hi = float(entry["min"]), float(entry["max"])
            except (TypeError, ValueError) as e:
                raise SchemaError(f"attribute {name!r}: non-numeric bound") from e
            attrs.append(AttributeSpec.continuous(name, lo, hi))
        elif typ == CATEGORICAL:
            values = entry.get("values")
            if not isinstance(values, list) or not all(
                isinstance(v, str) for v in values
            ):
                raise SchemaError(f"attribute {name!r}: values must be a string list")
            attrs.append(AttributeSpec.categorical(name, values))
        else:
            raise SchemaError(f"attribute {name!r}: unknown type {typ!r}")
    return InputSpace(tuple(attrs))


def load_schema_file(path) -> InputSpace:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return load_schema(fh.read())
    except OSError as e:
        raise SchemaError(f"cannot read schema file {path}: {e}") from e


def parse_dataset(csv_text: str, space: InputSpace) -> list[Instance]:
    """Parse an RFC-4180 CSV with header into instances in schema order.

    Columns may appear in any order but must match the schema names
    exactly. Every malformed cell is reported with its row number
    (1-based, counting the header as row 1).
    """
    reader = csv.reader(io.StringIO(csv_text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetError("dataset is empty (no header row)")

    names = [a.name for a in space.attributes]
    col_for = {}
    for j, col in enumerate(header):
        if col not in names:
            raise DatasetError(f"unknown column {col!r} in header")
        if col in col_for:
            raise DatasetError(f"duplicate column {col!r} in header")
        col_for[col] = j
    missing = [n for n in names if n not in col_for]
    if missing:
        raise DatasetError(f"missing columns: {', '.join(missing)}")

    instances = []
    for rownum, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise DatasetError(
                f"row {rownum}: expected {len(header)} fields, got {len(row)}"
            )
        vals = []
        for a in space.attributes:
            raw = row[col_for[a.name]]
            if a.is_continuous:
                try:
                    v = float(raw)
                except ValueError:
                    raise DatasetError(
                        f"row {rownum}: attribute {a.name!r}: "
                        f"cannot parse {raw!r} as a number"
                    )
                if not math.isfinite(v):
                    raise DatasetError(
                        f"row {rownum}: attribute {a.name!r}: non-finite value {raw!r}"
                    )
                if not (a.lo <= v <= a.hi):
                    raise DatasetError(
                        f"row {rownum}: attribute {a.name!r}: "
                        f"value {v} outside [{a.lo}, {a.hi}]"
                    )
                vals.append(v)
            else:
                if raw not in a.values:
                    raise DatasetError(
                        f"row {rownum}: attribute {a.name!r}: "
                        f"value {raw!r} not in domain"
                    )
                vals.append(raw)
        instances.append(Instance(tuple(vals)))
    if not instances:
        raise DatasetError("dataset has a header but no data rows")
    return instances


def serialize_dataset(instances, space: InputSpace) -> str:
    """Inverse of parse_dataset: write instances as CSV in schema order."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([a.name for a in space.attributes])
    for x in instances:
        writer.writerow(
            [repr(float(v)) if a.is_continuous else v
             for a, v in zip(space.attributes, x.values)]
        )
    return buf.getvalue()


def instance_distance(a: Instance, b: Instance, space: InputSpace) -> float:
    """Mean per-attribute distance in [0, 1].

    Continuous attributes contribute |a - b| / (hi - lo); categorical
    attributes contribute 0 for equal values and 1 otherwise.
    """
    acc = 0.0
    for spec, va, vb in zip(space.attributes, a.values, b.values):
        if spec.is_continuous:
            acc += abs(float(va) - float(vb)) / spec.span
        elif va != vb:
            acc += 1.0
    return acc / space.m
