"""Answer-scoring protocols for layout QA evaluation."""
from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

ANLS_THRESHOLD = 0.5
BLEU_EPSILON = 1e-9

_BRACKETED = re.compile(r"\[([^\[\]]*)\]")
_QUOTES_AND_SPACE = " \t\r\n'\"“”‘’"
# CJK ideographs, kana and hangul tokenize one character at a time
_CJK = r"\u3040-\u30ff\u3400-\u4dbf\u4e00-\u9fff\uac00-\ud7af\uf900-\ufaff"
_TOKEN = re.compile(rf"[{_CJK}]|(?:(?![{_CJK}])[^\W_])+")


@dataclass
class ScoreReport:
    metric: str
    scores: list[float] = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.scores)

    @property
    def aggregate(self) -> float:
        return sum(self.scores) / len(self.scores) if self.scores else 0.0

    def to_dict(self) -> dict:
        return {"metric": self.metric, "count": self.count, "aggregate": self.aggregate,
                "scores": list(self.scores)}


def tokenize(text: str) -> list[str]:
    """Lowercased letter/digit runs; CJK characters become single tokens."""
    return _TOKEN.findall(text.lower())


def extract_list(output: str) -> list[str] | None:
    """Elements of the last ``[...]`` group in ``output``, or None if there is none."""
    groups = _BRACKETED.findall(output)
    if not groups:
        return None
    items = (part.strip(_QUOTES_AND_SPACE) for part in groups[-1].split(","))
    return [item for item in items if item]


def _multiset_f1(pred: Sequence[str], gold: Sequence[str]) -> float:
    overlap = sum((Counter(pred) & Counter(gold)).values())
    if overlap == 0:
        return 0.0
    p = overlap / len(pred)
    r = overlap / len(gold)
    return 2 * p * r / (p + r)


def _normalize_item(item: str) -> str:
    return " ".join(item.strip(_QUOTES_AND_SPACE).lower().split())


def f_score_list(prediction: str, gold: Sequence[str]) -> float:
    """F-score with list elements as tokens, or words when no list is found."""
    if not gold:
        raise ValueError("gold list must be non-empty")
    items = extract_list(prediction)
    if items is not None:
        return _multiset_f1([_normalize_item(i) for i in items], [_normalize_item(g) for g in gold])
    gold_words = [w for g in gold for w in tokenize(g)]
    return _multiset_f1(tokenize(prediction), gold_words)


def levenshtein(a: str, b: str) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def nls(prediction: str, gold: str) -> float:
    """Normalized Levenshtein similarity, case-insensitive, ends trimmed."""
    p, g = prediction.strip().lower(), gold.strip().lower()
    longest = max(len(p), len(g))
    if longest == 0:
        return 1.0
    return 1 - levenshtein(p, g) / longest


def anls_sample(prediction: str, golds: str | Sequence[str], threshold: float = ANLS_THRESHOLD) -> float:
    if isinstance(golds, str):
        golds = [golds]
    if not golds:
        raise ValueError("gold set must be non-empty")
    best = max(nls(prediction, g) for g in golds)
    return best if best >= threshold else 0.0


def anls(predictions: Sequence[str], golds: Sequence[str | Sequence[str]],
         threshold: float = ANLS_THRESHOLD) -> float:
    if len(predictions) != len(golds):
        raise ValueError(f"{len(predictions)} predictions but {len(golds)} gold sets")
    if not predictions:
        return 0.0
    return sum(anls_sample(p, g, threshold) for p, g in zip(predictions, golds)) / len(predictions)


def lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge_l(prediction: str, reference: str) -> float:
    pred, ref = tokenize(prediction), tokenize(reference)
    if not pred or not ref:
        return 0.0
    lcs = lcs_length(pred, ref)
    if lcs == 0:
        return 0.0
    p, r = lcs / len(pred), lcs / len(ref)
    return 2 * p * r / (p + r)


def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu4(prediction: str, reference: str) -> float:
    """Sentence-level BLEU-4; zero n-gram matches count as ``BLEU_EPSILON``."""
    pred, ref = tokenize(prediction), tokenize(reference)
    if not pred or not ref:
        return 0.0
    log_p = 0.0
    for n in range(1, 5):
        pred_ng = _ngrams(pred, n)
        clipped = sum((pred_ng & _ngrams(ref, n)).values())
        total = max(sum(pred_ng.values()), 1)
        log_p += math.log(max(clipped, BLEU_EPSILON) / total) / 4
    bp = 1.0 if len(pred) > len(ref) else math.exp(1 - len(ref) / len(pred))
    return min(1.0, bp * math.exp(log_p))


def _squash(text: str) -> str:
    return "".join(text.split())


def recall_contains(prediction: str, gold: str) -> int:
    """1 if ``gold`` occurs in ``prediction`` once whitespace is ignored."""
    g = _squash(gold)
    if not g:
        raise ValueError("gold must be non-empty")
    return int(g in _squash(prediction))


def _as_text(gold) -> str:
    return gold if isinstance(gold, str) else " ".join(gold)


def _score_fscore(pred: str, gold) -> float:
    return f_score_list(pred, [gold] if isinstance(gold, str) else list(gold))


def _score_recall(pred: str, gold) -> float:
    if isinstance(gold, str):
        return float(recall_contains(pred, gold))
    return float(max(recall_contains(pred, g) for g in gold))


METRICS = {
    "fscore": _score_fscore,
    "anls": lambda pred, gold: anls_sample(pred, gold),
    "rouge": lambda pred, gold: rouge_l(pred, _as_text(gold)),
    "bleu": lambda pred, gold: bleu4(pred, _as_text(gold)),
    "recall": _score_recall,
}


def score_sample(metric: str, prediction: str, gold) -> float:
    try:
        fn = METRICS[metric]
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}") from None
    return fn(prediction or "", gold)


def score_corpus(metric: str, predictions: Sequence[str], golds: Sequence) -> ScoreReport:
    if len(predictions) != len(golds):
        raise ValueError(f"{len(predictions)} predictions but {len(golds)} golds")
    return ScoreReport(metric, [score_sample(metric, p, g) for p, g in zip(predictions, golds)])
