"""Layout-preserving plain text from OCR boxes and tables, with QA generators,
metrics and an evaluation harness for layout-vs-strip comparisons."""
from .canvas import CharCanvas, GridSpan, cleanup_text, place_fragment, render_canvas, strip_layout, substitute_marker
from .estimators import LayoutParser, TableEncoder
from .ingest import (
    BBox,
    LayoutWarning,
    OcrParseError,
    TextFragment,
    UnitSize,
    build_canvas,
    estimate_unit_size,
    layout_parse,
    load_ocr_json,
    parse_ocr_fragments,
    synthesize_table_bboxes,
)
from .tables import Table, encode_array, encode_layout, encode_linear, encode_table, encode_triplet, load_table

__version__ = "0.1.0"

__all__ = [
    "BBox",
    "CharCanvas",
    "GridSpan",
    "LayoutParser",
    "LayoutWarning",
    "OcrParseError",
    "Table",
    "TableEncoder",
    "TextFragment",
    "UnitSize",
    "build_canvas",
    "cleanup_text",
    "encode_array",
    "encode_layout",
    "encode_linear",
    "encode_table",
    "encode_triplet",
    "estimate_unit_size",
    "layout_parse",
    "load_ocr_json",
    "load_table",
    "parse_ocr_fragments",
    "place_fragment",
    "render_canvas",
    "strip_layout",
    "substitute_marker",
    "synthesize_table_bboxes",
]
