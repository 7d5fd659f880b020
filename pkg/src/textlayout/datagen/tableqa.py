"""Per-cell QA over aligned tables."""
from __future__ import annotations

import warnings
from collections import Counter

from ..ingest import LayoutWarning
from ..tables import Table, encode_layout
from .records import QASample


def cell_question(column: str, key_column: str, key_value: str) -> str:
    return f"What is the {column} of {key_column} {key_value}?"


def gen_table_qa(table: Table, key_column: int = 0, table_id: str = "table") -> list[QASample]:
    """One question per non-key cell, asking for its value given the row key.

    Rows whose key value is not unique are skipped with a :class:`LayoutWarning`.
    """
    if not 0 <= key_column < table.n_cols:
        raise ValueError(f"key column {key_column} out of range for {table.n_cols} columns")
    keys = Counter(row[key_column] for row in table.rows)
    context = encode_layout(table)
    key_name = table.header[key_column]
    out = []
    for i, row in enumerate(table.rows, 1):
        key = row[key_column]
        if keys[key] > 1:
            warnings.warn(f"row {i}: duplicate key {key!r} skipped", LayoutWarning, stacklevel=2)
            continue
        for j, (col, value) in enumerate(zip(table.header, row)):
            if j == key_column or not value.strip():
                continue
            out.append(QASample(
                context=context,
                question=cell_question(col, key_name, key),
                gold=value,
                source="tableqa",
                id=f"{table_id}-r{i}-c{j}",
                meta={"table": table_id, "row": i, "column": col},
            ))
    if not out:
        raise ValueError(f"table {table_id!r} yields no questions (all rows skipped or empty)")
    return out
