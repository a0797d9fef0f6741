"""Core domain types: tables, tuples, candidate pairs, votes, and labels.

Two delimited-text files become a :class:`TablePair` with an aligned
schema (union of both headers, missing columns filled with empty text).
Everything downstream -- blocking, labeling functions, the labeling
model -- works against these types.
"""

from __future__ import annotations

import csv
import io
import os
from dataclasses import dataclass, field

# Vote values cast by labeling functions.
MATCH = 1
ABSTAIN = 0
NONMATCH = -1
VOTE_VALUES = (NONMATCH, ABSTAIN, MATCH)


class IngestError(ValueError):
    """Raised when a table file cannot be turned into a valid Table."""


@dataclass(frozen=True)
class Tuple:
    """One record: a stable id plus text values keyed by attribute name."""

    id: str
    attributes: dict[str, str]

    def text(self, attrs: list[str] | tuple[str, ...]) -> str:
        """Concatenate the given attribute values with single spaces."""
        return " ".join(self.attributes.get(a, "") for a in attrs)


class Table:
    """An ordered collection of Tuples sharing one schema.

    Tuple ids are unique; lookup by id is O(1).
    """

    def __init__(self, schema: list[str], tuples: list[Tuple]):
        self.schema = list(schema)
        self.tuples = list(tuples)
        self._by_id = {t.id: t for t in self.tuples}
        if len(self._by_id) != len(self.tuples):
            raise IngestError("duplicate tuple id in table")

    def __len__(self) -> int:
        return len(self.tuples)

    def __contains__(self, tuple_id: str) -> bool:
        return tuple_id in self._by_id

    def get(self, tuple_id: str) -> Tuple:
        try:
            return self._by_id[tuple_id]
        except KeyError:
            raise KeyError(f"unknown tuple id {tuple_id!r}") from None

    def ids(self) -> list[str]:
        return [t.id for t in self.tuples]


@dataclass
class TablePair:
    """The two input relations with a shared, aligned schema."""

    left: Table
    right: Table
    schema: list[str]

    def __post_init__(self):
        if not self.left.tuples or not self.right.tuples:
            raise IngestError("both tables must be nonempty")


@dataclass(frozen=True)
class CandidatePair:
    """A (left_id, right_id) pair that survived blocking.

    similarity_hint is the blocking-time score in [0, 1]; the smart
    sampler ranks by it.
    """

    left_id: str
    right_id: str
    block_key: str = ""
    similarity_hint: float = 0.0

    @property
    def key(self) -> tuple[str, str]:
        return (self.left_id, self.right_id)


@dataclass(frozen=True)
class PairView:
    """Side-by-side attribute values for one candidate pair."""

    left_id: str
    right_id: str
    schema: tuple[str, ...]
    left_values: tuple[str, ...]
    right_values: tuple[str, ...]


# Ground truth label values and sources.
GT_MATCH = "match"
GT_NONMATCH = "non-match"
SOURCE_USER = "user-click"
SOURCE_FIXTURE = "fixture"


@dataclass
class GroundTruthStore:
    """Per-pair match/non-match labels; user clicks override fixtures."""

    _labels: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)

    def set(self, pair_key: tuple[str, str], value: str, source: str = SOURCE_USER) -> None:
        if value not in (GT_MATCH, GT_NONMATCH):
            raise ValueError(f"bad label value {value!r}")
        if source not in (SOURCE_USER, SOURCE_FIXTURE):
            raise ValueError(f"bad label source {source!r}")
        existing = self._labels.get(pair_key)
        if existing is not None and existing[1] == SOURCE_USER and source == SOURCE_FIXTURE:
            return  # user labels win
        self._labels[pair_key] = (value, source)

    def clear(self, pair_key: tuple[str, str]) -> None:
        self._labels.pop(pair_key, None)

    def get(self, pair_key: tuple[str, str]) -> tuple[str, str] | None:
        """Return (value, source) or None."""
        return self._labels.get(pair_key)

    def items(self):
        return self._labels.items()

    def __len__(self) -> int:
        return len(self._labels)


def _read_table(path: str, id_column: str) -> tuple[list[str], list[Tuple]]:
    if not os.path.exists(path):
        raise IngestError(f"file not found: {path}")
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestError(f"{path}: empty file, expected a header row") from None
        if id_column not in header:
            raise IngestError(f"{path}: id column {id_column!r} not in header {header}")
        id_idx = header.index(id_column)
        columns = [c for c in header if c != id_column]
        tuples = []
        seen: set[str] = set()
        for row in reader:
            if len(row) != len(header):
                raise IngestError(
                    f"{path}: line {reader.line_num}: expected {len(header)} fields, got {len(row)}"
                )
            tid = row[id_idx]
            if tid in seen:
                raise IngestError(f"{path}: line {reader.line_num}: duplicate id {tid!r}")
            seen.add(tid)
            attrs = {c: v for c, v in zip(header, row) if c != id_column}
            tuples.append(Tuple(id=tid, attributes=attrs))
    return columns, tuples


def ingest_table_pair(left_path: str, right_path: str, id_column: str) -> TablePair:
    """Read two delimited-text files into an aligned TablePair.

    The shared schema is the union of both headers (id column excluded,
    left columns first); attributes absent on one side are filled with
    empty text for every tuple of that side.

    Raises IngestError on missing file, wrong-arity row (reported with
    its line number), duplicate id, or missing id column.
    """
    left_cols, left_tuples = _read_table(left_path, id_column)
    right_cols, right_tuples = _read_table(right_path, id_column)
    schema = list(left_cols) + [c for c in right_cols if c not in left_cols]

    def align(tuples: list[Tuple]) -> list[Tuple]:
        return [
            Tuple(id=t.id, attributes={c: t.attributes.get(c, "") for c in schema})
            for t in tuples
        ]

    return TablePair(
        left=Table(schema, align(left_tuples)),
        right=Table(schema, align(right_tuples)),
        schema=schema,
    )


def write_table(table: Table, path: str, id_column: str) -> None:
    """Serialize a table back to delimited text (inverse of ingestion)."""
    buf = io.StringIO()
    writer = csv.writer(buf, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")
    writer.writerow([id_column] + table.schema)
    for t in table.tuples:
        writer.writerow([t.id] + [t.attributes.get(c, "") for c in table.schema])
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(buf.getvalue())


def pair_view(pair: CandidatePair, tables: TablePair) -> PairView:
    """Project a candidate pair onto the schema, tagged left/right.

    A dangling id signals a corrupted candidate set and raises KeyError.
    """
    lt = tables.left.get(pair.left_id)
    rt = tables.right.get(pair.right_id)
    schema = tuple(tables.schema)
    return PairView(
        left_id=pair.left_id,
        right_id=pair.right_id,
        schema=schema,
        left_values=tuple(lt.attributes.get(a, "") for a in schema),
        right_values=tuple(rt.attributes.get(a, "") for a in schema),
    )


def check_candidate_integrity(candidates: list[CandidatePair], tables: TablePair) -> None:
    """Verify every candidate id resolves and no pair repeats."""
    seen = set()
    for p in candidates:
        if p.key in seen:
            raise ValueError(f"duplicate candidate pair {p.key}")
        seen.add(p.key)
        if p.left_id not in tables.left:
            raise ValueError(f"candidate pair {p.key}: dangling left id")
        if p.right_id not in tables.right:
            raise ValueError(f"candidate pair {p.key}: dangling right id")
