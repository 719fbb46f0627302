"""Annotation ingestion.

Parses column-oriented annotation dumps (phenotype-gene association lists)
into an in-memory association list plus a dense node index. The canonical
on-disk form is a UTF-8 edge list, one ``source<TAB>target`` association
per line, ``#`` comment lines ignored, optional single header line.

Parsing is lossless: duplicate associations and self-associations survive
parsing and are only reported by :func:`validate_associations`; the graph
builder is where they get collapsed or dropped.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable

from . import PhenolinkError


class AnnotationParseError(PhenolinkError):
    """A malformed annotation line. Carries the 1-based line number."""

    def __init__(self, line_number: int, message: str):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


@dataclass(frozen=True)
class ColumnSpec:
    """Which columns of a delimited file hold the two node labels.

    The default matches the canonical edge-list format (tab-delimited,
    source in column 0, target in column 1, no header). Public annotation
    dumps such as the HPO ``genes_to_phenotype`` export ship a header line
    and different column positions; those are configured per file.
    """

    delimiter: str = "\t"
    source_column: int = 0
    target_column: int = 1
    has_header: bool = False
    comment_prefix: str = "#"

    def __post_init__(self) -> None:
        if len(self.delimiter) != 1:
            raise ValueError("delimiter must be a single character")
        if self.source_column == self.target_column:
            raise ValueError("source_column and target_column must differ")
        if self.source_column < 0 or self.target_column < 0:
            raise ValueError("column indices must be non-negative")
        if not self.comment_prefix:
            raise ValueError("comment_prefix must be non-empty")
        if self.delimiter == self.comment_prefix:
            raise ValueError("delimiter must differ from comment_prefix")


@dataclass
class AssociationList:
    """Raw (source_label, target_label) records in file order."""

    records: list[tuple[str, str]] = field(default_factory=list)
    source_kind: str = "HPO"
    target_kind: str = "GENE"

    def __len__(self) -> int:
        return len(self.records)


@dataclass
class ValidationReport:
    """Counts of suspicious records; computing it never mutates the input.

    ``duplicate_count`` counts record occurrences beyond the first of each
    unordered pair, matching the deduplication the graph builder applies.
    """

    record_count: int
    duplicate_count: int
    self_loop_count: int
    distinct_source_labels: int
    distinct_target_labels: int

    def to_dict(self) -> dict:
        return {
            "record_count": self.record_count,
            "duplicate_count": self.duplicate_count,
            "self_loop_count": self.self_loop_count,
            "distinct_source_labels": self.distinct_source_labels,
            "distinct_target_labels": self.distinct_target_labels,
        }


@dataclass
class NodeIndex:
    """Bijective label <-> dense-id map, ids in first-appearance order."""

    label_to_id: dict[str, int] = field(default_factory=dict)
    id_to_label: list[str] = field(default_factory=list)
    kind_of: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.id_to_label)

    @classmethod
    def from_labels(cls, labels: list[str], kind: str = "") -> "NodeIndex":
        index = cls()
        for label in labels:
            index._add(label, kind)
        if len(index) != len(labels):
            raise ValueError("labels are not unique")
        return index

    def id_for(self, label: str) -> int:
        try:
            return self.label_to_id[label]
        except KeyError:
            raise KeyError(f"label not in index: {label!r}") from None

    def _add(self, label: str, kind: str) -> int:
        node_id = self.label_to_id.get(label)
        if node_id is None:
            node_id = len(self.id_to_label)
            self.label_to_id[label] = node_id
            self.id_to_label.append(label)
            self.kind_of.append(kind)
        return node_id


def _iter_decoded_lines(stream: BinaryIO | io.TextIOBase) -> Iterable[tuple[int, str]]:
    """Yield (1-based line number, decoded line without EOL)."""
    if isinstance(stream, (bytes, bytearray)):
        stream = io.BytesIO(stream)
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise AnnotationParseError(lineno, f"not valid UTF-8: {exc}") from exc
        else:
            line = raw
        yield lineno, line.rstrip("\r\n")


def parse_annotations(stream, spec: ColumnSpec = ColumnSpec()) -> AssociationList:
    """Parse a delimited annotation stream into an :class:`AssociationList`.

    ``stream`` may be a binary file object, a text file object, or raw
    bytes. Comment lines and blank lines are skipped; when
    ``spec.has_header`` is set the first remaining line is skipped too.
    Every other line must yield exactly one record.

    Raises :class:`AnnotationParseError` (with the offending line number)
    on short lines, empty label fields, or undecodable bytes.
    """
    records: list[tuple[str, str]] = []
    max_col = max(spec.source_column, spec.target_column)
    header_pending = spec.has_header
    for lineno, line in _iter_decoded_lines(stream):
        if line.startswith(spec.comment_prefix):
            continue
        if not line.strip():
            continue
        if header_pending:
            header_pending = False
            continue
        fields = line.split(spec.delimiter)
        if len(fields) <= max_col:
            raise AnnotationParseError(
                lineno,
                f"expected at least {max_col + 1} columns, found {len(fields)}",
            )
        source = fields[spec.source_column].strip()
        target = fields[spec.target_column].strip()
        if not source or not target:
            raise AnnotationParseError(lineno, "empty label field")
        records.append((source, target))
    return AssociationList(records=records)


def read_annotations(path: str | Path, spec: ColumnSpec = ColumnSpec()) -> AssociationList:
    with open(path, "rb") as fh:
        return parse_annotations(fh, spec)


def validate_associations(assoc: AssociationList) -> ValidationReport:
    """Report duplicates, self-associations and distinct labels per side."""
    seen: set[tuple[str, str]] = set()
    duplicates = 0
    self_loops = 0
    sources: set[str] = set()
    targets: set[str] = set()
    for source, target in assoc.records:
        sources.add(source)
        targets.add(target)
        if source == target:
            self_loops += 1
            continue
        key = (source, target) if source <= target else (target, source)
        if key in seen:
            duplicates += 1
        else:
            seen.add(key)
    return ValidationReport(
        record_count=len(assoc.records),
        duplicate_count=duplicates,
        self_loop_count=self_loops,
        distinct_source_labels=len(sources),
        distinct_target_labels=len(targets),
    )


def build_node_index(assoc: AssociationList) -> NodeIndex:
    """Assign dense ids in first-appearance order (source before target)."""
    index = NodeIndex()
    for source, target in assoc.records:
        index._add(source, assoc.source_kind)
        index._add(target, assoc.target_kind)
    return index


def write_edge_list(assoc: AssociationList, path: str | Path) -> None:
    """Serialize to the canonical edge-list format (re-parseable as-is)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for source, target in assoc.records:
            fh.write(f"{source}\t{target}\n")


def write_node_index(index: NodeIndex, path: str | Path) -> None:
    """Write ``id<TAB>label<TAB>kind`` rows, one per node."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for node_id, label in enumerate(index.id_to_label):
            fh.write(f"{node_id}\t{label}\t{index.kind_of[node_id]}\n")
