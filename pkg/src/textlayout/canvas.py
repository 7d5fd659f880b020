"""Monospace character canvas and the plain-text transforms built on it."""
from __future__ import annotations

import copy
import re
import unicodedata
from dataclasses import dataclass, field

SPACE = " "
TAB = "\t"
CARON = "ˇ"
VANILLA = "a"

_NEWLINE_RUN = re.compile(r"\n{3,}")


@dataclass(frozen=True)
class GridSpan:
    """Horizontal run of cells: column ``x``, row ``y``, ``len`` characters."""

    x: int
    y: int
    len: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0:
            raise ValueError(f"grid coordinates must be non-negative, got ({self.x}, {self.y})")
        if self.len < 1:
            raise ValueError(f"span length must be >= 1, got {self.len}")


@dataclass(frozen=True)
class PlacementResult:
    final_span: GridSpan


@dataclass
class CharCanvas:
    """Row-major character grid.

    ``written`` mirrors ``cells`` and marks the cells that hold placed text, so
    padding can be told apart from a placed character equal to ``fill_char``
    (e.g. the space inside ``"jet skis"``).
    """

    rows: int = 0
    cols: int = 0
    fill_char: str = SPACE
    cells: list[list[str]] = field(default_factory=list, repr=False)
    written: list[list[bool]] = field(default_factory=list, repr=False)

    def __post_init__(self):
        _check_marker(self.fill_char)
        if not self.cells:
            self.cells = [[self.fill_char] * self.cols for _ in range(self.rows)]
            self.written = [[False] * self.cols for _ in range(self.rows)]
        elif not self.written:
            self.written = [[c != self.fill_char for c in row] for row in self.cells]

    def grow(self, rows: int, cols: int) -> None:
        """Enlarge the grid to at least ``rows`` x ``cols``; never shrinks."""
        if cols > self.cols:
            extra = cols - self.cols
            for row, mask in zip(self.cells, self.written):
                row.extend([self.fill_char] * extra)
                mask.extend([False] * extra)
            self.cols = cols
        if rows > self.rows:
            for _ in range(rows - self.rows):
                self.cells.append([self.fill_char] * self.cols)
                self.written.append([False] * self.cols)
            self.rows = rows

    def is_free(self, y: int, x: int, n: int) -> bool:
        if y >= self.rows:
            return True
        mask = self.written[y]
        return not any(mask[x:x + n])

    def lines(self) -> list[str]:
        """Every row as a full-width string (no trimming)."""
        return ["".join(row) for row in self.cells]

    def copy(self) -> CharCanvas:
        return copy.deepcopy(self)


def _check_marker(marker: str) -> None:
    if not isinstance(marker, str) or len(marker) != 1:
        raise ValueError(f"marker must be a single character, got {marker!r}")
    if marker in "\n\r":
        raise ValueError("newline is reserved as the row separator")


def _check_text(text: str) -> None:
    for ch in text:
        if ch == TAB:
            continue
        if ch in "\n\r" or unicodedata.category(ch) == "Cc":
            raise ValueError(f"fragment text contains control character {ch!r}: {text!r}")


def place_fragment(canvas: CharCanvas, text: str, span: GridSpan) -> PlacementResult:
    """Write ``text`` left to right starting at ``span``.

    If any target cell already holds placed text, the start column moves right
    to the first position where all ``span.len`` cells are free. The canvas
    grows as needed.
    """
    _check_text(text)
    if len(text) != span.len:
        raise ValueError(f"span length {span.len} does not match text length {len(text)}")
    x = span.x
    while not canvas.is_free(span.y, x, span.len):
        x += 1
    canvas.grow(span.y + 1, x + span.len)
    row, mask = canvas.cells[span.y], canvas.written[span.y]
    for i, ch in enumerate(text):
        row[x + i] = ch
        mask[x + i] = True
    return PlacementResult(GridSpan(x, span.y, span.len))


def _blank_mask(canvas: CharCanvas) -> list[list[bool]]:
    # Placed spaces count as blank, so a space-filled canvas renders exactly
    # like cleanup_text on its string, and swapping the marker before or
    # after rendering gives the same layout.
    return [
        [c == SPACE or not w for c, w in zip(row, mask)]
        for row, mask in zip(canvas.cells, canvas.written)
    ]


def _trimmed_rows(cells: list[list[str]], blank: list[list[bool]]) -> list[str]:
    out = []
    for row, b in zip(cells, blank):
        end = len(row)
        while end and b[end - 1]:
            end -= 1
        out.append("".join(row[:end]))
    return out


def _compactable_columns(blank: list[list[bool]], cols: int) -> set[int]:
    """Columns to drop so that no all-blank run is wider than two."""
    drop: set[int] = set()
    run: list[int] = []
    for j in range(cols + 1):
        if j < cols and all(b[j] for b in blank):
            run.append(j)
            continue
        if len(run) >= 3:
            drop.update(run[:-2])
        run = []
    return drop


def render_canvas(canvas: CharCanvas, apply_cleanup: bool = False) -> str:
    """Join rows with newlines, trimming trailing padding on each row.

    With ``apply_cleanup`` the dense whitespace is reduced first (see
    :func:`cleanup_text`); for a space-filled canvas the result equals
    ``cleanup_text("\\n".join(canvas.lines()))``.
    """
    blank = _blank_mask(canvas)
    cells = canvas.cells
    if apply_cleanup:
        drop = _compactable_columns(blank, canvas.cols)
        if drop:
            keep = [j for j in range(canvas.cols) if j not in drop]
            cells = [[row[j] for j in keep] for row in cells]
            blank = [[b[j] for j in keep] for b in blank]
    text = "\n".join(_trimmed_rows(cells, blank))
    if apply_cleanup:
        text = _NEWLINE_RUN.sub("\n\n", text)
    return text


def cleanup_text(text: str) -> str:
    """Reduce redundant spatial markers in a rendered layout.

    1. Lines are padded with spaces to the longest line; every run of three or
       more all-space columns is cut down to two columns.
    2. Trailing spaces are removed, so all-space lines become empty.
    3. Runs of three or more newlines collapse to exactly two.
    """
    if not text:
        return text
    lines = text.split("\n")
    width = max(len(line) for line in lines)
    padded = [line.ljust(width) for line in lines]
    blank = [[c == SPACE for c in line] for line in padded]
    drop = _compactable_columns(blank, width)
    if drop:
        padded = ["".join(c for j, c in enumerate(line) if j not in drop) for line in padded]
    out = "\n".join(line.rstrip(SPACE) for line in padded)
    return _NEWLINE_RUN.sub("\n\n", out)


def strip_layout(text: str) -> str:
    """Collapse every whitespace run (spaces, tabs, newlines) into a single space."""
    return " ".join(text.split())


def substitute_marker(canvas: CharCanvas, marker: str) -> CharCanvas:
    """Return a copy of ``canvas`` whose padding cells use ``marker``.

    Placed characters, including spaces inside fragments, are left alone.
    """
    _check_marker(marker)
    out = canvas.copy()
    out.fill_char = marker
    for row, mask in zip(out.cells, out.written):
        for j, w in enumerate(mask):
            if not w:
                row[j] = marker
    return out
