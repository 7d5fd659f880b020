"""Table-to-text encoders: array, linear, triplet and aligned layout."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .canvas import render_canvas
from .ingest import UnitSize, build_canvas, synthesize_table_bboxes


@dataclass
class Table:
    header: list[str]
    rows: list[list[str]] = field(default_factory=list)

    def __post_init__(self):
        self.header = list(self.header)
        self.rows = [list(r) for r in self.rows]
        if not self.header:
            raise ValueError("table header must be non-empty")
        for i, row in enumerate(self.rows):
            if len(row) != len(self.header):
                raise ValueError(
                    f"row {i} has {len(row)} cells, header has {len(self.header)}"
                )
        for cell in (*self.header, *(c for r in self.rows for c in r)):
            if not isinstance(cell, str):
                raise TypeError(f"table cells must be strings, got {type(cell).__name__}")

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.header)

    @classmethod
    def from_dict(cls, data: dict) -> Table:
        try:
            return cls(data["header"], data.get("rows", []))
        except (KeyError, TypeError, AttributeError) as e:
            raise ValueError(f"not a table object: {e}") from e

    @classmethod
    def from_array(cls, array: list[list[str]]) -> Table:
        """First row is the header (the FeTaQA ``table_array`` convention)."""
        if not array:
            raise ValueError("empty table array")
        return cls(array[0], array[1:])

    def to_dict(self) -> dict:
        return {"header": list(self.header), "rows": [list(r) for r in self.rows]}


def load_table(path: str | Path) -> Table:
    with open(path, encoding="utf-8") as f:
        data = json.load(f)
    if isinstance(data, list):
        return Table.from_array(data)
    return Table.from_dict(data)


def _quote(cell: str) -> str:
    # only the delimiter is escaped; other characters, backslashes included,
    # stay verbatim
    return "'" + cell.replace("'", "\\'") + "'"


def encode_array(table: Table) -> str:
    """Python-style list of lists, one row per line."""
    rows = [table.header, *table.rows]
    return "[" + ",\n".join("[" + ", ".join(map(_quote, r)) + "]" for r in rows) + "]"


def encode_linear(table: Table) -> str:
    lines = ["[HEAD] " + " | ".join(table.header)]
    lines += [f"[ROW] {k} " + " | ".join(row) for k, row in enumerate(table.rows, 1)]
    return "\n".join(lines)


def decode_linear(text: str) -> Table:
    """Inverse of :func:`encode_linear`."""
    lines = text.split("\n")
    if not lines[0].startswith("[HEAD] "):
        raise ValueError("missing [HEAD] line")
    header = lines[0][len("[HEAD] "):].split(" | ")
    rows = []
    for k, line in enumerate(lines[1:], 1):
        prefix = f"[ROW] {k} "
        if not line.startswith(prefix):
            raise ValueError(f"line {k}: expected {prefix!r}")
        rows.append(line[len(prefix):].split(" | "))
    return Table(header, rows)


def encode_triplet(table: Table) -> str:
    return "\n".join(
        f"Row{k} | {col} | {value}"
        for k, row in enumerate(table.rows, 1)
        for col, value in zip(table.header, row)
    )


def encode_layout(table: Table) -> str:
    """Columns first-letter aligned, at least two spaces apart, header first."""
    canvas = build_canvas(synthesize_table_bboxes(table), unit=UnitSize(1, 1))
    return render_canvas(canvas)


ENCODERS: dict[str, Callable[[Table], str]] = {
    "array": encode_array,
    "linear": encode_linear,
    "triplet": encode_triplet,
    "layout": encode_layout,
}


def encode_table(table: Table, format: str = "layout") -> str:
    try:
        encoder = ENCODERS[format]
    except KeyError:
        raise ValueError(f"unknown table format {format!r}; choose from {sorted(ENCODERS)}") from None
    return encoder(table)
