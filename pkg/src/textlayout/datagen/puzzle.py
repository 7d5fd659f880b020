"""Sentence search puzzles: grids of words hiding horizontal and vertical sentences."""
from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import NamedTuple

from ..canvas import render_canvas
from ..ingest import UnitSize, build_canvas, synthesize_grid_bboxes
from .records import QASample, load_wordlist

HORIZONTAL = "horizontal"
VERTICAL = "vertical"

GAME_INTRO = (
    "The sentence search puzzle is a game that involves a grid of words, where players are tasked "
    "with finding meaningful sentences hidden within the grid.\n"
    "The challenge lies in locating continuous words that make up meaningful sentences horizontally "
    "and vertically.\n"
    "The unused spaces in the grid are usually filled with random words to add complexity to the puzzle.\n"
    "Note: answer in the form of a list, for example: ['a', 'b']. If you do not know the answer, "
    "reply with the empty list [].\n"
    "Here is a toy example:\n"
)
SOLVE_LEAD = "Let's solve the following sentence search puzzle step by step:\n"

TOY_GRID = [
    ["sun", "good", "morning", "get"],
    ["tree", "open", "blue", "some"],
    ["cat", "river", "happy", "food"],
]


class PuzzleError(RuntimeError):
    pass


class Placement(NamedTuple):
    sentence: str
    orientation: str
    row: int
    col: int


def render_grid(grid: list[list[str]]) -> str:
    """Words aligned on their first letters, columns at least two spaces apart."""
    return render_canvas(build_canvas(synthesize_grid_bboxes(grid), unit=UnitSize(1, 1)))


def solution_text(horizontal: list[str], vertical: list[str]) -> str:
    """Step-by-step answer in the style of the toy example."""
    def found(items):
        return " and ".join(f'"{s}"' for s in items)

    steps = []
    if horizontal:
        steps.append(f"First, search horizontally and find {found(horizontal)}.")
    if vertical:
        lead = "Then, search" if horizontal else "First, search"
        steps.append(f"{lead} vertically and find {found(vertical)}.")
    steps.append(
        "So all the sentences hidden in this puzzle are: "
        + json.dumps(horizontal + vertical, ensure_ascii=False) + "."
    )
    return "\n".join(steps)


def toy_example() -> str:
    return render_grid(TOY_GRID) + "\n" + solution_text(["good morning"], ["get some food"])


def puzzle_prompt(grid_text: str) -> str:
    return GAME_INTRO + toy_example() + "\n" + SOLVE_LEAD + grid_text


@dataclass
class PuzzleSample:
    grid: list[list[str]]
    gold: list[str]
    placements: list[Placement] = field(default_factory=list)

    def __post_init__(self):
        widths = {len(r) for r in self.grid}
        if len(widths) > 1:
            raise ValueError("every row of a puzzle grid must have the same number of words")

    @property
    def grid_text(self) -> str:
        return render_grid(self.grid)

    @property
    def prompt(self) -> str:
        return puzzle_prompt(self.grid_text)

    @property
    def answer(self) -> str:
        h = [p.sentence for p in self.placements if p.orientation == HORIZONTAL]
        v = [p.sentence for p in self.placements if p.orientation == VERTICAL]
        return solution_text(h, v)

    def to_sample(self, sample_id: str) -> QASample:
        return QASample(
            context=self.grid_text,
            question=self.prompt,
            gold=list(self.gold),
            source="puzzle",
            id=sample_id,
            meta={"placements": [p._asdict() for p in self.placements], "answer": self.answer},
        )


def _runs(grid: list[list[str]]):
    rows = len(grid)
    cols = len(grid[0]) if rows else 0
    for r in range(rows):
        line = grid[r]
        for a in range(cols):
            for b in range(a + 1, cols + 1):
                yield " ".join(line[a:b])
    for c in range(cols):
        line = [grid[r][c] for r in range(rows)]
        for a in range(rows):
            for b in range(a + 1, rows + 1):
                yield " ".join(line[a:b])


def scan_puzzle(sample: PuzzleSample) -> list[str]:
    """Every contiguous row or column word run equal to a gold sentence.

    Rows are scanned top to bottom, then columns left to right; repeated
    occurrences are all reported.
    """
    targets = set(sample.gold)
    return [run for run in _runs(sample.grid) if run in targets]


@dataclass
class PuzzleConfig:
    rows: int = 6
    cols: int = 6
    n_horizontal: int = 1
    n_vertical: int = 1
    sentences: list[str] | None = None
    fillers: list[str] | None = None
    max_retries: int = 200


def _scan_key(p: Placement):
    return (0, p.row, p.col) if p.orientation == HORIZONTAL else (1, p.col, p.row)


def _attempt(rng: random.Random, cfg: PuzzleConfig, h_pool: list[str], v_pool: list[str],
             fillers: list[str]) -> PuzzleSample | None:
    chosen_h = rng.sample(h_pool, cfg.n_horizontal)
    rest = [s for s in v_pool if s not in chosen_h]
    if len(rest) < cfg.n_vertical:
        return None
    chosen_v = rng.sample(rest, cfg.n_vertical)
    grid: list[list[str | None]] = [[None] * cfg.cols for _ in range(cfg.rows)]
    placements = []
    for sentence, orient in [(s, HORIZONTAL) for s in chosen_h] + [(s, VERTICAL) for s in chosen_v]:
        words = sentence.split()
        n = len(words)
        if orient == HORIZONTAL:
            spots = [(r, c) for r in range(cfg.rows) for c in range(cfg.cols - n + 1)
                     if all(grid[r][c + i] is None for i in range(n))]
        else:
            spots = [(r, c) for r in range(cfg.rows - n + 1) for c in range(cfg.cols)
                     if all(grid[r + i][c] is None for i in range(n))]
        if not spots:
            return None
        r, c = rng.choice(spots)
        for i, word in enumerate(words):
            if orient == HORIZONTAL:
                grid[r][c + i] = word
            else:
                grid[r + i][c] = word
        placements.append(Placement(sentence, orient, r, c))
    for row in grid:
        for j, cell in enumerate(row):
            if cell is None:
                if not fillers:
                    raise PuzzleError("grid has free cells but the filler pool is empty")
                row[j] = rng.choice(fillers)
    placements.sort(key=_scan_key)
    sample = PuzzleSample(grid=grid, gold=[p.sentence for p in placements], placements=placements)
    # fillers or neighbouring sentences can complete a second copy of a gold sentence
    counts = Counter(scan_puzzle(sample))
    if any(counts[s] != 1 for s in sample.gold):
        return None
    return sample


def gen_sentence_search(seed: int, config: PuzzleConfig | None = None) -> PuzzleSample:
    """One puzzle whose hidden sentences each occur exactly once in the grid."""
    return _generate(f"puzzle/{seed}", seed, config or PuzzleConfig())


def gen_puzzles(seed: int, n: int, config: PuzzleConfig | None = None) -> list[PuzzleSample]:
    """``n`` independent puzzles drawn from one base seed."""
    cfg = config or PuzzleConfig()
    return [_generate(f"puzzle/{seed}/{i}", seed, cfg) for i in range(n)]


def _generate(key: str, seed: int, cfg: PuzzleConfig) -> PuzzleSample:
    if cfg.rows < 1 or cfg.cols < 1:
        raise ValueError("puzzle grid needs at least one row and one column")
    if cfg.n_horizontal < 0 or cfg.n_vertical < 0 or cfg.n_horizontal + cfg.n_vertical == 0:
        raise ValueError("request at least one hidden sentence")
    sentences = cfg.sentences if cfg.sentences is not None else load_wordlist("sentences")
    sentences = [s for s in dict.fromkeys(" ".join(s.split()) for s in sentences) if len(s.split()) >= 2]
    if cfg.fillers is not None:
        fillers = list(cfg.fillers)
    else:
        used = {w for s in sentences for w in s.split()}
        fillers = [w for w in load_wordlist("fillers") if w not in used]
    h_pool = [s for s in sentences if len(s.split()) <= cfg.cols]
    v_pool = [s for s in sentences if len(s.split()) <= cfg.rows]
    if len(h_pool) < cfg.n_horizontal or len(v_pool) < cfg.n_vertical:
        raise PuzzleError(f"a {cfg.rows}x{cfg.cols} grid cannot hold the requested sentences (seed={seed})")
    rng = random.Random(key)
    for _ in range(cfg.max_retries):
        sample = _attempt(rng, cfg, h_pool, v_pool, fillers)
        if sample is not None:
            return sample
    raise PuzzleError(f"no valid placement after {cfg.max_retries} attempts (seed={seed})")
