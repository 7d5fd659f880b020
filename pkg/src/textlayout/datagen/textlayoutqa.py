"""Shopping-list layout QA pairs."""
from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..canvas import SPACE, CharCanvas, GridSpan, place_fragment, render_canvas, strip_layout, substitute_marker
from .records import QASample, load_wordlist

QUADRANTS = ("top-left", "top-right", "bottom-left", "bottom-right")
LIST_NAMES = "ABCD"
MIN_GAP = 2
_FORBIDDEN = set(",[]'\"\n\r\t")


@dataclass
class TextLayoutQAConfig:
    list_count: tuple[int, int] = (2, 4)
    items_per_list: tuple[int, int] = (1, 5)
    wordlist: list[str] | None = None
    # horizontal gap between left and right lists is drawn from
    # [MIN_GAP, MIN_GAP + extra_gap]; rows between halves from [1, 1 + extra_rows]
    extra_gap: int = 3
    extra_rows: int = 1
    marker: str = SPACE

    def validate(self) -> list[str]:
        lo, hi = self.list_count
        if not 2 <= lo <= hi <= len(LIST_NAMES):
            raise ValueError(f"list_count must satisfy 2 <= lo <= hi <= 4, got {self.list_count}")
        ilo, ihi = self.items_per_list
        if not 1 <= ilo <= ihi:
            raise ValueError(f"items_per_list must satisfy 1 <= lo <= hi, got {self.items_per_list}")
        if self.extra_gap < 0 or self.extra_rows < 0:
            raise ValueError("extra_gap and extra_rows must be non-negative")
        words = list(self.wordlist) if self.wordlist is not None else load_wordlist("products")
        if not words:
            raise ValueError("wordlist is empty")
        for w in words:
            if not w.strip() or _FORBIDDEN & set(w):
                raise ValueError(f"wordlist entry {w!r} is empty or contains list punctuation")
        words = list(dict.fromkeys(words))
        if len(words) < hi * ihi:
            raise ValueError(f"wordlist has {len(words)} distinct items, need at least {hi * ihi}")
        return words


@dataclass
class QAPair:
    context_layout: str
    context_strip: str
    questions: list[str]
    answers: list[list[str]]
    positions: dict[str, str]
    lists: dict[str, list[str]] = field(default_factory=dict)
    preamble: str = ""
    boxes: dict[str, tuple[int, int, int, int]] = field(default_factory=dict)

    def samples(self, pair_id: str) -> list[QASample]:
        kinds = ("single", "pair", "corner")
        return [
            QASample(
                context=self.context_layout,
                context_strip=self.context_strip,
                question=q,
                gold=list(a),
                source="textlayoutqa",
                id=f"{pair_id}-q{j}",
                meta={"pair": pair_id, "question_type": kind, "positions": dict(self.positions),
                      "preamble": self.preamble},
            )
            for j, (q, a, kind) in enumerate(zip(self.questions, self.answers, kinds))
        ]


def _question(names: str) -> str:
    return f"What products do shopping list {names} contain?"


def _corner_question(quadrant: str) -> str:
    return f"What products do shopping list in the {quadrant} corner contain?"


def _layout(rng: random.Random, lists: dict[str, list[str]], positions: dict[str, str],
            cfg: TextLayoutQAConfig) -> tuple[CharCanvas, dict[str, tuple[int, int, int, int]]]:
    """Place each list as a first-letter aligned block; returns canvas and (x, y, w, h) boxes."""
    by_quad = {q: n for n, q in positions.items()}
    size = {n: (max(len(n), *map(len, items)), 1 + len(items)) for n, items in lists.items()}

    def w(q):
        return size[by_quad[q]][0] if q in by_quad else None

    def h(q):
        return size[by_quad[q]][1] if q in by_quad else None

    present = [size[n] for n in lists]
    # an empty quadrant still reserves room so that the others keep their side
    left_widths = [v for v in (w("top-left"), w("bottom-left")) if v is not None]
    left_w = max(left_widths) if left_widths else max(s[0] for s in present)
    top_heights = [v for v in (h("top-left"), h("top-right")) if v is not None]
    top_h = max(top_heights) if top_heights else max(s[1] for s in present)

    origin = {"top-left": (0, 0), "bottom-left": (0, top_h + 1 + rng.randint(0, cfg.extra_rows))}
    for half in ("top", "bottom"):
        own = w(f"{half}-left")
        x = (own if own is not None else left_w) + MIN_GAP + rng.randint(0, cfg.extra_gap)
        origin[f"{half}-right"] = (x, origin[f"{half}-left"][1])

    canvas = CharCanvas()
    boxes = {}
    for name, items in lists.items():
        x, y = origin[positions[name]]
        for dy, text in enumerate([name, *items]):
            place_fragment(canvas, text, GridSpan(x, y + dy, len(text)))
        boxes[name] = (x, y, *size[name])
    return canvas, boxes


def make_pair(rng: random.Random, cfg: TextLayoutQAConfig, words: list[str]) -> QAPair:
    k = rng.randint(*cfg.list_count)
    names = LIST_NAMES[:k]
    positions = dict(zip(names, rng.sample(QUADRANTS, k)))
    counts = [rng.randint(*cfg.items_per_list) for _ in names]
    pool = rng.sample(words, sum(counts))
    lists, start = {}, 0
    for name, c in zip(names, counts):
        lists[name] = pool[start:start + c]
        start += c

    canvas, boxes = _layout(rng, lists, positions, cfg)
    layout = render_canvas(canvas)
    strip = strip_layout(layout)
    if cfg.marker != SPACE:
        layout = render_canvas(substitute_marker(canvas, cfg.marker))

    one = rng.choice(names)
    first, second = rng.sample(names, 2)
    corner_name = rng.choice(names)
    corner = positions[corner_name]
    return QAPair(
        context_layout=layout,
        context_strip=strip,
        questions=[_question(one), _question(f"{first} and {second}"), _corner_question(corner)],
        answers=[list(lists[one]), lists[first] + lists[second], list(lists[corner_name])],
        positions=positions,
        lists=lists,
        preamble=f"Here are {k} shopping lists ({', '.join(names)}) with different products:",
        boxes=boxes,
    )


def gen_textlayoutqa(seed: int, n_pairs: int = 300, config: TextLayoutQAConfig | None = None) -> list[QAPair]:
    """Generate ``n_pairs`` layout/strip pairs with three questions each.

    Pair ``i`` draws from its own generator seeded by ``(seed, i)``, so any
    pair can be regenerated alone.
    """
    cfg = config or TextLayoutQAConfig()
    words = cfg.validate()
    return [make_pair(random.Random(f"textlayoutqa/{seed}/{i}"), cfg, words) for i in range(n_pairs)]


def textlayoutqa_samples(pairs: list[QAPair], prefix: str = "textlayoutqa") -> list[QASample]:
    return [s for i, p in enumerate(pairs) for s in p.samples(f"{prefix}-{i:04d}")]
