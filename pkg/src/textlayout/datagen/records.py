from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Iterable

from ..canvas import strip_layout


@dataclass
class QASample:
    """One question over one context, in the shape the harness consumes."""

    context: str
    question: str
    gold: str | list[str]
    source: str
    id: str = ""
    context_strip: str | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.gold or (isinstance(self.gold, list) and not all(self.gold)):
            raise ValueError(f"sample {self.id!r}: gold must be non-empty")
        if self.context_strip is None:
            self.context_strip = strip_layout(self.context)

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "context_layout": self.context,
            "context_strip": self.context_strip,
            "question": self.question,
            "gold": self.gold,
            "meta": self.meta,
        }

    @classmethod
    def from_record(cls, rec: dict) -> QASample:
        return cls(
            context=rec["context_layout"],
            question=rec["question"],
            gold=rec["gold"],
            source=rec.get("source", ""),
            id=rec.get("id", ""),
            context_strip=rec.get("context_strip"),
            meta=rec.get("meta") or {},
        )


def dumps_record(rec: dict) -> str:
    return json.dumps(rec, ensure_ascii=False, sort_keys=True)


def write_jsonl(samples: Iterable[QASample | dict], path: str | Path) -> int:
    n = 0
    with open(path, "w", encoding="utf-8") as f:
        for s in samples:
            rec = s.to_record() if isinstance(s, QASample) else s
            f.write(dumps_record(rec) + "\n")
            n += 1
    return n


def read_jsonl(path: str | Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                out.append(json.loads(line))
            except json.JSONDecodeError as e:
                raise ValueError(f"{path}:{lineno}: invalid JSON ({e})") from e
    return out


def load_wordlist(name: str) -> list[str]:
    """Bundled vocabulary file ``data/<name>.txt``, one entry per line."""
    text = resources.files("textlayout.datagen").joinpath("data", f"{name}.txt").read_text(encoding="utf-8")
    return [line.strip() for line in text.splitlines() if line.strip()]
