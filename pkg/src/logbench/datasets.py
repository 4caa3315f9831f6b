"""Load and validate labelled log datasets (LogPai-style structured CSV).

Benchmark files carry 2,000 labelled messages each, but any positive row
count is accepted. Required columns are ``Content`` and ``EventTemplate``;
``LineId`` is honored when present. Ground-truth templates are
canonicalized on load so predictions and truth share one wildcard syntax.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

from .errors import EmptyDataset, EmptyTemplate, MalformedRow, MissingColumn
from .extraction import canonicalize
from .templates import LogRecord

REQUIRED_COLUMNS = ("Content", "EventTemplate")


@dataclass(frozen=True)
class Dataset:
    """An ordered, immutable collection of labelled log records."""

    name: str
    records: tuple[LogRecord, ...]
    # canonical truth-template text -> line_ids carrying it, first-seen order
    template_index: dict[str, frozenset[int]]

    def __len__(self) -> int:
        return len(self.records)

    def record_by_line(self, line_id: int) -> LogRecord:
        return self._by_line[line_id]

    @cached_property
    def _by_line(self) -> dict[int, LogRecord]:
        return {rec.line_id: rec for rec in self.records}


def load_dataset(path: str | Path, name: str) -> Dataset:
    """Read a structured CSV into a Dataset, in file order.

    Raises MissingColumn, EmptyDataset, or MalformedRow (with the 1-based
    CSV record number, the header counting as record 1).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyDataset(f"{path}: file is empty") from None
        for column in REQUIRED_COLUMNS:
            if column not in header:
                raise MissingColumn(f"{path}: required column {column!r} not in header {header}")
        content_idx = header.index("Content")
        template_idx = header.index("EventTemplate")
        line_idx = header.index("LineId") if "LineId" in header else None

        records: list[LogRecord] = []
        seen_ids: set[int] = set()
        groups: dict[str, set[int]] = {}
        for ordinal, row in enumerate(reader, start=2):
            if len(row) != len(header):
                raise MalformedRow(ordinal, f"expected {len(header)} fields, found {len(row)}")
            content = row[content_idx].strip()
            if not content:
                raise MalformedRow(ordinal, "empty Content field")
            if line_idx is not None:
                try:
                    line_id = int(row[line_idx])
                except ValueError:
                    raise MalformedRow(ordinal, f"non-integer LineId {row[line_idx]!r}") from None
            else:
                line_id = ordinal - 1
            if line_id in seen_ids:
                raise MalformedRow(ordinal, f"duplicate LineId {line_id}")
            seen_ids.add(line_id)
            try:
                truth = canonicalize(row[template_idx])
            except EmptyTemplate:
                raise MalformedRow(ordinal, "empty EventTemplate field") from None
            records.append(LogRecord(line_id=line_id, content=content, truth_template=truth))
            groups.setdefault(truth.raw, set()).add(line_id)

    if not records:
        raise EmptyDataset(f"{path}: no data rows")
    index = {template: frozenset(ids) for template, ids in groups.items()}
    return Dataset(name=name, records=tuple(records), template_index=index)


def truth_grouping(dataset: Dataset) -> dict[str, set[int]]:
    """Ground-truth grouping: template text -> line_ids (a stable copy)."""
    return {template: set(ids) for template, ids in dataset.template_index.items()}
