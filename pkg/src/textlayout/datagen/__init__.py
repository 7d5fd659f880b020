"""Seeded generators for layout-sensitive QA data."""
from .puzzle import (
    Placement,
    PuzzleConfig,
    PuzzleError,
    PuzzleSample,
    gen_puzzles,
    gen_sentence_search,
    puzzle_prompt,
    render_grid,
    scan_puzzle,
)
from .records import QASample, load_wordlist, read_jsonl, write_jsonl
from .tableqa import gen_table_qa
from .textlayoutqa import QUADRANTS, QAPair, TextLayoutQAConfig, gen_textlayoutqa, textlayoutqa_samples
from .xfund import FormEntry, resolve_checkbox, xfund_document_to_qa, xfund_form_entries, xfund_to_qa

__all__ = [
    "FormEntry",
    "Placement",
    "PuzzleConfig",
    "PuzzleError",
    "PuzzleSample",
    "QAPair",
    "QASample",
    "QUADRANTS",
    "TextLayoutQAConfig",
    "gen_puzzles",
    "gen_sentence_search",
    "gen_table_qa",
    "gen_textlayoutqa",
    "load_wordlist",
    "puzzle_prompt",
    "read_jsonl",
    "render_grid",
    "resolve_checkbox",
    "scan_puzzle",
    "textlayoutqa_samples",
    "write_jsonl",
    "xfund_document_to_qa",
    "xfund_form_entries",
    "xfund_to_qa",
]
