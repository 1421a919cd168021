"""Frequency-table data model for combined bilateral/unilateral counts.

One group holds the bilateral counts (m0, m1, m2): subjects with 0, 1 or 2
responding organs among those contributing both organs, and the unilateral
counts (n0, n1) among those contributing a single organ.
"""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Iterator, Literal

from pydantic import ValidationError

from paired_gof.core.schema import TableFile
from paired_gof.errors import DataValidationError, ParseError

logger = logging.getLogger(__name__)

TableFormat = Literal["json", "csv"]


@dataclass(frozen=True)
class GroupCounts:
    m0: int
    m1: int
    m2: int
    n0: int = 0
    n1: int = 0
    label: str = ""

    @property
    def m_plus(self) -> int:
        return self.m0 + self.m1 + self.m2

    @property
    def n_plus(self) -> int:
        return self.n0 + self.n1

    @property
    def bilateral(self) -> tuple[int, int, int]:
        return (self.m0, self.m1, self.m2)

    @property
    def unilateral(self) -> tuple[int, int]:
        return (self.n0, self.n1)

    @property
    def is_degenerate(self) -> bool:
        return self.m_plus == 0 and self.n_plus == 0

    def counts(self) -> tuple[int, int, int, int, int]:
        """Cell counts in the fixed order (m0, m1, m2, n0, n1)."""
        return (self.m0, self.m1, self.m2, self.n0, self.n1)


@dataclass(frozen=True)
class FrequencyTable:
    """Ordered groups of a combined bilateral/unilateral study.

    Construction does not validate; call :func:`validate` (the parsers do).
    """

    groups: tuple[GroupCounts, ...] = field(default_factory=tuple)

    @classmethod
    def from_counts(
        cls,
        rows: list[tuple[int, int, int, int, int]] | list[tuple[int, int, int]],
        labels: list[str] | None = None,
    ) -> FrequencyTable:
        """Build a table from (m0, m1, m2[, n0, n1]) tuples, labelling 1..g."""
        groups = []
        for i, row in enumerate(rows):
            m0, m1, m2, *rest = row
            n0, n1 = (rest + [0, 0])[:2]
            label = labels[i] if labels else str(i + 1)
            groups.append(GroupCounts(m0, m1, m2, n0, n1, label=label))
        return cls(groups=tuple(groups))

    @property
    def g(self) -> int:
        return len(self.groups)

    def __iter__(self) -> Iterator[GroupCounts]:
        return iter(self.groups)

    def __len__(self) -> int:
        return len(self.groups)

    def __getitem__(self, index: int) -> GroupCounts:
        return self.groups[index]

    @property
    def labels(self) -> list[str]:
        return [grp.label or str(i + 1) for i, grp in enumerate(self.groups)]

    # ── Margins ────────────────────────────────────────────────────

    def m_margin(self, r: int) -> int:
        """m_{r+}: bilateral subjects with r responses over all groups."""
        return sum(grp.bilateral[r] for grp in self.groups)

    def n_margin(self, r: int) -> int:
        """n_{r+}: unilateral subjects with r responses over all groups."""
        return sum(grp.unilateral[r] for grp in self.groups)

    @property
    def m_total(self) -> int:
        return sum(grp.m_plus for grp in self.groups)

    @property
    def n_total(self) -> int:
        return sum(grp.n_plus for grp in self.groups)

    @property
    def is_bilateral_only(self) -> bool:
        return self.n_total == 0

    def sample_vector(self) -> tuple[int, ...]:
        """The combined sample (m, n): all bilateral cells by group, then unilateral."""
        bilateral = [c for grp in self.groups for c in grp.bilateral]
        unilateral = [c for grp in self.groups for c in grp.unilateral]
        return tuple(bilateral + unilateral)

    def reordered(self, order: list[int]) -> FrequencyTable:
        return FrequencyTable(groups=tuple(self.groups[i] for i in order))


def validate(table: FrequencyTable) -> None:
    """Raise DataValidationError for the first violated invariant."""
    if table.g < 1:
        raise DataValidationError("zero groups")
    for index, grp in enumerate(table.groups):
        for name, value in zip(("m0", "m1", "m2", "n0", "n1"), grp.counts()):
            if isinstance(value, bool) or not isinstance(value, int):
                raise DataValidationError(f"count {name} is not an integer", index)
            if value < 0:
                raise DataValidationError(f"negative count {name}={value}", index)
        if grp.is_degenerate:
            raise DataValidationError("degenerate group", index)


# ── Parsing ───────────────────────────────────────────────────────


def parse_frequency_table(text: str, format: TableFormat = "json") -> FrequencyTable:
    """Parse a JSON or CSV document into a validated FrequencyTable."""
    if format == "json":
        table = _parse_json(text)
    elif format == "csv":
        table = _parse_csv(text)
    else:
        raise ParseError(f"unknown table format: {format!r}")
    validate(table)
    logger.debug("Parsed table with %d groups", table.g)
    return table


def _parse_json(text: str) -> FrequencyTable:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from exc
    try:
        doc = TableFile.model_validate(raw)
    except ValidationError as exc:
        raise ParseError(_describe_validation_error(exc)) from exc

    groups = []
    for i, entry in enumerate(doc.groups):
        m0, m1, m2 = entry.bilateral
        n0, n1 = entry.unilateral
        groups.append(GroupCounts(m0, m1, m2, n0, n1, label=entry.label or str(i + 1)))
    return FrequencyTable(groups=tuple(groups))


def _parse_csv(text: str) -> FrequencyTable:
    groups = []
    reader = csv.reader(io.StringIO(text))
    for line_no, row in enumerate(reader, start=1):
        cells = [c.strip() for c in row]
        if not cells or all(not c for c in cells) or cells[0].startswith("#"):
            continue
        if len(cells) != 6:
            raise ParseError(
                f"line {line_no}: expected 6 fields label,m0,m1,m2,n0,n1, got {len(cells)}"
            )
        label, *numbers = cells
        if line_no == 1 and not all(_is_int(n) for n in numbers):
            # header row
            continue
        try:
            m0, m1, m2, n0, n1 = (int(n) for n in numbers)
        except ValueError as exc:
            raise ParseError(f"line {line_no}: non-integer count") from exc
        groups.append(GroupCounts(m0, m1, m2, n0, n1, label=label or str(len(groups) + 1)))
    return FrequencyTable(groups=tuple(groups))


def _is_int(text: str) -> bool:
    try:
        int(text)
    except ValueError:
        return False
    return True


def _describe_validation_error(exc: ValidationError) -> str:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    message = first["msg"]
    if first["type"] == "missing":
        return f"missing field: {location}"
    if "greater than or equal to 0" in message:
        return f"negative count at {location}"
    return f"{location}: {message}"


# ── Serialization ─────────────────────────────────────────────────


def serialize_frequency_table(table: FrequencyTable, format: TableFormat = "json") -> str:
    """Inverse of :func:`parse_frequency_table`."""
    if format == "json":
        doc = {
            "groups": [
                {
                    "label": label,
                    "bilateral": list(grp.bilateral),
                    "unilateral": list(grp.unilateral),
                }
                for label, grp in zip(table.labels, table.groups)
            ]
        }
        return json.dumps(doc, indent=2) + "\n"
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for label, grp in zip(table.labels, table.groups):
            writer.writerow([label, *grp.counts()])
        return buf.getvalue()
    raise ParseError(f"unknown table format: {format!r}")
