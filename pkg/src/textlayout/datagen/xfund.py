"""Key-value forms (XFUND style) rewritten as extraction QA."""
from __future__ import annotations

import re
from typing import Iterable, NamedTuple

from ..ingest import BBox, TextFragment, layout_parse
from .records import QASample

CHECKED = "✓✔☑☒■√"
UNCHECKED = "☐□"
_OPTION = re.compile(rf"([{CHECKED}{UNCHECKED}])\s*([^{CHECKED}{UNCHECKED}]*)")
DROP_FLAGS = {"nested", "invalid"}


class FormEntry(NamedTuple):
    key: str
    value: str
    flags: frozenset = frozenset()


def key_question(key: str) -> str:
    return f"What is the value of the key '{key}'?"


def resolve_checkbox(value: str) -> str | None:
    """Reduce a multiple-option value to the ticked option(s).

    Values without checkbox glyphs come back unchanged; a checkbox group with
    nothing ticked yields None.
    """
    if not any(ch in value for ch in CHECKED + UNCHECKED):
        return value
    selected = [text.strip() for mark, text in _OPTION.findall(value) if mark in CHECKED and text.strip()]
    return ", ".join(selected) if selected else None


def _entry(item) -> FormEntry:
    if isinstance(item, FormEntry):
        return item
    key, value, *rest = item
    flags = rest[0] if rest else ()
    if isinstance(flags, dict):
        flags = [k for k, v in flags.items() if v]
    return FormEntry(key, value, frozenset(flags))


def xfund_to_qa(form: Iterable, context: str = "", form_id: str = "form") -> list[QASample]:
    """Turn ``(key, value[, flags])`` entries into QA samples.

    Entries are dropped when the key or value is empty, when flagged
    ``nested`` (key-key-value chains) or ``invalid``, or when a checkbox group
    has no ticked option.
    """
    out = []
    for i, item in enumerate(form):
        entry = _entry(item)
        key = " ".join(entry.key.split())
        value = " ".join(entry.value.split())
        if not key or not value or entry.flags & DROP_FLAGS:
            continue
        value = resolve_checkbox(value)
        if not value:
            continue
        out.append(QASample(
            context=context,
            question=key_question(key),
            gold=value,
            source="xfundqa",
            id=f"{form_id}-{i}",
            meta={"key": key},
        ))
    return out


def xfund_form_entries(document: list[dict]) -> list[FormEntry]:
    """Key-value entries from the entity list of one XFUND document.

    A link whose target is not an answer, or whose source key is itself the
    target of another key, is flagged so :func:`xfund_to_qa` drops it.
    """
    by_id = {e["id"]: e for e in document}
    links = {tuple(link) for e in document for link in e.get("linking", [])}
    key_targets = {b for a, b in links if by_id.get(a, {}).get("label") == "question"
                   and by_id.get(b, {}).get("label") == "question"}
    entries = []
    for a, b in sorted(links):
        src, dst = by_id.get(a), by_id.get(b)
        if src is None or dst is None or src.get("label") != "question":
            continue
        flags = set()
        if dst.get("label") != "answer":
            flags.add("invalid")
        if a in key_targets:
            flags.add("nested")
        entries.append(FormEntry(src.get("text", ""), dst.get("text", ""), frozenset(flags)))
    return entries


def xfund_fragments(document: list[dict]) -> list[TextFragment]:
    frags = []
    for e in document:
        text = " ".join(e.get("text", "").split())
        box = e.get("box")
        if text and box and box[2] > box[0] and box[3] > box[1]:
            frags.append(TextFragment(text, BBox(*box)))
    return frags


def xfund_document_to_qa(document: list[dict], form_id: str = "form") -> list[QASample]:
    """Layout context from the entity boxes plus one question per valid key."""
    frags = xfund_fragments(document)
    context = layout_parse(frags) if frags else ""
    return xfund_to_qa(xfund_form_entries(document), context=context, form_id=form_id)
