"""scikit-learn compatible wrappers around the layout parser and table encoders."""
from __future__ import annotations

import statistics

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .canvas import strip_layout
from .ingest import DEFAULT_SUBUNIT_THRESHOLD, UnitSize, layout_parse, synthesize_table_bboxes
from .tables import ENCODERS, Table, encode_table
from .validation import check_documents, check_table, check_unit_size, resolve_marker

GRID_UNIT = UnitSize(1, 1)


class LayoutParser(TransformerMixin, BaseEstimator):
    """Render documents (OCR fragments or tables) as layout text.

    Parameters
    ----------
    cleanup : bool, default=True
        Compact dense whitespace after rendering.
    marker : str, default="space"
        Padding marker: ``space``, ``tab``, ``caron``, ``vanilla`` or any
        single character.
    unit_size : None, "corpus" or (x0, y0), default=None
        ``None`` estimates the unit character size per document at transform
        time. ``"corpus"`` learns one unit from every fragment seen in
        ``fit``. A pair fixes the unit.
    subunit_threshold : float, default=0.5
        Fragments whose character width or height is below this fraction of
        the unit are dropped.
    strip : bool, default=False
        Emit the layout-free variant (whitespace runs collapsed).

    Attributes
    ----------
    unit_size_ : UnitSize or None
        Unit used for OCR documents; ``None`` means per-document estimation.
    n_documents_ : int
    """

    def __init__(self, cleanup=True, marker="space", unit_size=None,
                 subunit_threshold=DEFAULT_SUBUNIT_THRESHOLD, strip=False):
        self.cleanup = cleanup
        self.marker = marker
        self.unit_size = unit_size
        self.subunit_threshold = subunit_threshold
        self.strip = strip

    def fit(self, X, y=None):
        resolve_marker(self.marker)
        if not 0 <= self.subunit_threshold <= 1:
            raise ValueError(f"subunit_threshold must lie in [0, 1], got {self.subunit_threshold}")
        docs = check_documents(X)
        if self.unit_size == "corpus":
            frags = [f for d in docs if not isinstance(d, Table) for f in d]
            if not frags:
                raise ValueError("unit_size='corpus' needs at least one OCR fragment in X")
            self.unit_size_ = UnitSize(
                statistics.median(f.char_width for f in frags),
                statistics.median(f.char_height for f in frags),
            )
        else:
            self.unit_size_ = check_unit_size(self.unit_size)
        self.n_documents_ = len(docs)
        return self

    def _render(self, doc) -> str:
        fill = resolve_marker(self.marker)
        if isinstance(doc, Table):
            frags, unit = synthesize_table_bboxes(doc), GRID_UNIT
        else:
            frags, unit = doc, self.unit_size_
        text = layout_parse(frags, cleanup=self.cleanup, fill=fill, unit=unit,
                            subunit_threshold=self.subunit_threshold)
        return strip_layout(text) if self.strip else text

    def transform(self, X):
        check_is_fitted(self, "n_documents_")
        return [self._render(doc) for doc in check_documents(X)]


class TableEncoder(TransformerMixin, BaseEstimator):
    """Serialize tables with one of the four encodings.

    Stateless: ``fit`` only validates parameters.
    """

    def __init__(self, format="layout"):
        self.format = format

    def fit(self, X=None, y=None):
        if self.format not in ENCODERS:
            raise ValueError(f"unknown table format {self.format!r}; choose from {sorted(ENCODERS)}")
        self.format_ = self.format
        return self

    def transform(self, X):
        check_is_fitted(self, "format_")
        return [encode_table(check_table(t), self.format_) for t in X]

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.requires_fit = False
        return tags
