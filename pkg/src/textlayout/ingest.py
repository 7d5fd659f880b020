"""Coordinate-annotated text to 2D plain-text layout."""
from __future__ import annotations

import json
import math
import statistics
import warnings
from dataclasses import dataclass
from numbers import Real
from pathlib import Path
from typing import TYPE_CHECKING, Any, Iterable, Sequence

from .canvas import SPACE, CharCanvas, GridSpan, place_fragment, render_canvas, substitute_marker

if TYPE_CHECKING:
    from .tables import Table

DEFAULT_SUBUNIT_THRESHOLD = 0.5
COLUMN_GAP = 2


class LayoutWarning(UserWarning):
    """Input was dropped or skipped while building a layout."""


class OcrParseError(ValueError):
    pass


@dataclass(frozen=True)
class BBox:
    x1: float
    y1: float
    x2: float
    y2: float

    def __post_init__(self):
        if not (self.x2 > self.x1 and self.y2 > self.y1):
            raise ValueError(f"degenerate bbox {self.as_list()}")

    def as_list(self) -> list[float]:
        return [self.x1, self.y1, self.x2, self.y2]

    def scaled(self, factor: float) -> BBox:
        return BBox(self.x1 * factor, self.y1 * factor, self.x2 * factor, self.y2 * factor)


@dataclass(frozen=True)
class TextFragment:
    text: str
    bbox: BBox

    def __post_init__(self):
        if not self.text:
            raise ValueError("fragment text must be non-empty")
        if "\n" in self.text or "\r" in self.text:
            raise ValueError(f"fragment text must not contain newlines: {self.text!r}")

    @property
    def n(self) -> int:
        return len(self.text)

    @property
    def char_width(self) -> float:
        return (self.bbox.x2 - self.bbox.x1) / self.n

    @property
    def char_height(self) -> float:
        return self.bbox.y2 - self.bbox.y1

    @classmethod
    def from_record(cls, record: dict) -> TextFragment:
        return cls(record["text"], BBox(*record["bbox"]))

    def to_record(self) -> dict:
        return {"text": self.text, "bbox": self.bbox.as_list()}


@dataclass(frozen=True)
class UnitSize:
    x0: float
    y0: float

    def __post_init__(self):
        if not (self.x0 > 0 and self.y0 > 0):
            raise ValueError(f"unit size must be positive, got ({self.x0}, {self.y0})")


def _is_number(v: Any) -> bool:
    return isinstance(v, Real) and not isinstance(v, bool) and math.isfinite(v)


def parse_ocr_fragments(records: Iterable[Any]) -> list[TextFragment]:
    """Turn OCR records ``{"text": str, "bbox": [x1, y1, x2, y2]}`` into fragments.

    Records with empty text or a zero-area bbox are dropped; each drop emits a
    :class:`LayoutWarning`. Structurally malformed records raise
    :class:`OcrParseError` naming the record index.
    """
    if isinstance(records, (str, bytes, dict)):
        raise OcrParseError("OCR input must be an array of records")
    fragments = []
    for i, rec in enumerate(records):
        if not isinstance(rec, dict) or "text" not in rec or "bbox" not in rec:
            raise OcrParseError(f"record {i}: expected an object with 'text' and 'bbox'")
        text, bbox = rec["text"], rec["bbox"]
        if not isinstance(text, str):
            raise OcrParseError(f"record {i}: 'text' must be a string")
        if not isinstance(bbox, (list, tuple)) or len(bbox) != 4 or not all(map(_is_number, bbox)):
            raise OcrParseError(f"record {i}: 'bbox' must be 4 numbers, got {bbox!r}")
        # multi-line OCR boxes are flattened onto one grid row
        text = " ".join(text.splitlines()).strip()
        if not text:
            warnings.warn(f"record {i}: empty text dropped", LayoutWarning, stacklevel=2)
            continue
        x1, y1, x2, y2 = bbox
        if not (x2 > x1 and y2 > y1):
            warnings.warn(f"record {i}: degenerate bbox {list(bbox)} dropped", LayoutWarning, stacklevel=2)
            continue
        fragments.append(TextFragment(text, BBox(x1, y1, x2, y2)))
    return fragments


def load_ocr_json(path: str | Path) -> list[TextFragment]:
    with open(path, encoding="utf-8") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise OcrParseError(f"{path}: invalid JSON ({e})") from e
    return parse_ocr_fragments(data)


def synthesize_grid_bboxes(rows: Sequence[Sequence[str]], gap: int = COLUMN_GAP) -> list[TextFragment]:
    """Grid-unit bboxes for a rectangular block of cells.

    Row ``i`` occupies ``[i, i+1]``; column ``j`` starts at
    ``c_j = c_{j-1} + l_{j-1} + gap`` where ``l_j`` is the longest cell in that
    column. Empty cells get no fragment but still reserve their column.
    """
    if not rows:
        return []
    width = len(rows[0])
    if width < 1:
        raise ValueError("grid must have at least one column")
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValueError(f"ragged row {i}: {len(row)} cells, expected {width}")
    lengths = [max(len(row[j]) for row in rows) for j in range(width)]
    starts = [0]
    for j in range(1, width):
        starts.append(starts[-1] + lengths[j - 1] + gap)
    out = []
    for i, row in enumerate(rows):
        for j, cell in enumerate(row):
            if cell:
                out.append(TextFragment(cell, BBox(starts[j], i, starts[j] + lengths[j], i + 1)))
    return out


def synthesize_table_bboxes(table: Table) -> list[TextFragment]:
    """Header is row 0, data row ``k`` is row ``k``; coordinates are grid units."""
    return synthesize_grid_bboxes([list(table.header), *map(list, table.rows)])


def estimate_unit_size(fragments: Sequence[TextFragment]) -> UnitSize:
    """Median per-character width and median fragment height."""
    if not fragments:
        raise ValueError("cannot estimate a unit size from zero fragments")
    x0 = statistics.median(f.char_width for f in fragments)
    y0 = statistics.median(f.char_height for f in fragments)
    return UnitSize(x0, y0)


def is_subunit(fragment: TextFragment, unit: UnitSize, threshold: float = DEFAULT_SUBUNIT_THRESHOLD) -> bool:
    return fragment.char_width < threshold * unit.x0 or fragment.char_height < threshold * unit.y0


def round_half_away(v: float) -> int:
    return int(math.copysign(math.floor(abs(v) + 0.5), v))


def convert_coordinates(fragment: TextFragment, unit: UnitSize) -> GridSpan:
    return GridSpan(
        x=round_half_away(fragment.bbox.x1 / unit.x0),
        y=round_half_away(fragment.bbox.y1 / unit.y0),
        len=fragment.n,
    )


def build_canvas(
    fragments: Sequence[TextFragment],
    unit: UnitSize | None = None,
    subunit_threshold: float = DEFAULT_SUBUNIT_THRESHOLD,
) -> CharCanvas:
    """Place fragments on a fresh space-filled canvas in reading order."""
    if not fragments:
        raise ValueError("layout needs at least one fragment")
    if unit is None:
        unit = estimate_unit_size(fragments)
        fragments = [f for f in fragments if not is_subunit(f, unit, subunit_threshold)]
    xs = [round_half_away(f.bbox.x1 / unit.x0) for f in fragments]
    ys = [round_half_away(f.bbox.y1 / unit.y0) for f in fragments]
    # negative source coordinates are shifted onto the grid
    dx, dy = -min([0, *xs]), -min([0, *ys])
    placed = [(GridSpan(x + dx, y + dy, f.n), f.text) for f, x, y in zip(fragments, xs, ys)]
    placed.sort(key=lambda p: (p[0].y, p[0].x, p[1]))
    canvas = CharCanvas(fill_char=SPACE)
    if placed:
        canvas.grow(max(s.y for s, _ in placed) + 1, max(s.x + s.len for s, _ in placed))
    for span, text in placed:
        place_fragment(canvas, text, span)
    return canvas


def layout_parse(
    fragments: Sequence[TextFragment],
    cleanup: bool = True,
    fill: str = SPACE,
    unit: UnitSize | None = None,
    subunit_threshold: float = DEFAULT_SUBUNIT_THRESHOLD,
) -> str:
    """Render fragments as layout text.

    ``unit=None`` estimates the unit character size from the fragments and
    drops sub-unit fragments; pass ``UnitSize(1, 1)`` for input already in
    grid units (e.g. synthesized table bboxes).
    """
    canvas = build_canvas(fragments, unit, subunit_threshold)
    if fill != SPACE:
        canvas = substitute_marker(canvas, fill)
    return render_canvas(canvas, apply_cleanup=cleanup)
