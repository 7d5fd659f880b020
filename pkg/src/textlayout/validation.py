"""Input coercion shared by the estimators and the CLI."""
from __future__ import annotations

from typing import Any

from .canvas import CARON, SPACE, TAB, VANILLA
from .ingest import TextFragment, UnitSize, parse_ocr_fragments
from .tables import Table

MARKERS = {"space": SPACE, "tab": TAB, "caron": CARON, "vanilla": VANILLA}


def resolve_marker(marker: str) -> str:
    """Accept a marker name (``space``, ``tab``, ``caron``, ``vanilla``) or a single character."""
    if marker in MARKERS:
        return MARKERS[marker]
    if not isinstance(marker, str) or len(marker) != 1 or marker in "\n\r":
        raise ValueError(f"marker must be one of {sorted(MARKERS)} or a single character, got {marker!r}")
    return marker


def check_table(table: Any) -> Table:
    if isinstance(table, Table):
        return table
    if isinstance(table, dict):
        return Table.from_dict(table)
    if isinstance(table, (list, tuple)) and table and all(isinstance(r, (list, tuple)) for r in table):
        return Table.from_array([list(r) for r in table])
    raise TypeError(f"cannot interpret {type(table).__name__} as a table")


def check_fragments(doc: Any) -> list[TextFragment]:
    """A document is a list of fragments or of OCR records."""
    if isinstance(doc, (str, bytes, dict)):
        raise TypeError("a document must be a sequence of fragments or OCR records")
    doc = list(doc)
    if all(isinstance(f, TextFragment) for f in doc):
        return doc
    return parse_ocr_fragments(doc)


def check_documents(X: Any) -> list:
    """Normalize a collection of documents; each becomes fragments or a Table."""
    if isinstance(X, (str, bytes, dict, Table)):
        raise TypeError("X must be a collection of documents, not a single document")
    docs = []
    for doc in X:
        if isinstance(doc, (Table, dict)):
            docs.append(check_table(doc))
        else:
            docs.append(check_fragments(doc))
    return docs


def check_unit_size(unit: Any) -> UnitSize | None:
    if unit is None or isinstance(unit, UnitSize):
        return unit
    x0, y0 = unit
    return UnitSize(float(x0), float(y0))
