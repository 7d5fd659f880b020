"""Resumable evaluation runs, answer rephrasing, and run scoring."""
from __future__ import annotations

import json
import logging
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable, Iterable

from ..datagen.records import dumps_record, read_jsonl
from ..metrics import METRICS, ScoreReport, extract_list
from .client import Endpoint, HarnessError, InferenceParams, chat_complete
from .prompts import build_prompt

log = logging.getLogger(__name__)

MODES = ("layout", "strip")
LIST_KINDS = {"textlayoutqa"}

Completer = Callable[[Endpoint, list, InferenceParams], str]


@dataclass
class EvalRecord:
    id: str
    mode: str
    kind: str
    prompt: list[dict]
    output: str | None
    parsed: Any
    gold: Any
    model: str
    latency: float
    error: str | None = None
    rephrased: str | None = None
    score: float | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")

    def to_record(self) -> dict:
        rec = asdict(self)
        for k in ("rephrased", "score"):
            if rec[k] is None:
                del rec[k]
        return rec

    @classmethod
    def from_record(cls, rec: dict) -> EvalRecord:
        names = cls.__dataclass_fields__
        return cls(**{k: v for k, v in rec.items() if k in names})


@dataclass
class RunSummary:
    out: str
    total: int
    skipped: int
    completed: int
    errors: int

    def to_dict(self) -> dict:
        return asdict(self)


class PartialRunError(OSError):
    """Raised when the run file could not be written; a ``.partial`` marker is left behind."""


def _marker(out: Path) -> Path:
    return out.with_name(out.name + ".partial")


def _abort(out: Path, err: OSError, completed: int, pending: int) -> PartialRunError:
    try:
        _marker(out).write_text(json.dumps({"error": str(err), "completed": completed,
                                            "pending": pending}) + "\n", encoding="utf-8")
    except OSError:
        log.error("could not write partial-run marker for %s", out)
    return PartialRunError(f"run aborted on {out}: {err}")


def _load_done(out: Path) -> set[tuple[str, str]]:
    """Keys of complete records in ``out``, dropping a torn final line if present."""
    if not out.exists():
        return set()
    data = out.read_bytes()
    if data and not data.endswith(b"\n"):
        cut = data.rfind(b"\n") + 1
        log.warning("%s: dropping incomplete trailing line", out)
        with open(out, "r+b") as f:
            f.truncate(cut)
        data = data[:cut]
    done = set()
    for lineno, line in enumerate(data.decode("utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            done.add((rec["id"], rec["mode"]))
        except (json.JSONDecodeError, KeyError, TypeError):
            log.warning("%s:%d: unreadable record ignored", out, lineno)
    return done


def parse_answer(kind: str, output: str | None) -> Any:
    if output is None:
        return None
    return extract_list(output) if kind in LIST_KINDS else output.strip()


def record_prompt(rec: dict, kind: str, mode: str, *, llama_wrapper: bool = False,
                  system_prompt: str | None = None) -> list[dict]:
    """Messages for one dataset record in the given context mode."""
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    try:
        context = rec[f"context_{mode}"]
    except KeyError as e:
        raise ValueError(f"record {rec.get('id')!r} lacks {e.args[0]}") from None
    meta = rec.get("meta") or {}
    question = meta.get("key", rec["question"]) if kind == "xfundqa" else rec["question"]
    preamble = meta.get("preamble") if kind == "textlayoutqa" else None
    return build_prompt(kind, context, question, preamble=preamble,
                        llama_wrapper=llama_wrapper, system_prompt=system_prompt)


def run_eval(dataset: str | Path | Iterable[dict], kind: str, mode: str, endpoint: Endpoint,
             params: InferenceParams | None = None, out: str | Path = "run.jsonl", *,
             concurrency: int = 4, jitter: float = 0.05, llama_wrapper: bool = False,
             system_prompt: str | None = None, complete: Completer = chat_complete) -> RunSummary:
    """Query the endpoint for every dataset record not already in ``out``.

    Requests run on up to ``concurrency`` threads, each delayed by a random
    ``[0, jitter)`` seconds; records are appended by this thread only.
    Transport and protocol failures are stored on the record.  Failing to
    write ``out`` leaves ``out.partial`` and raises :class:`PartialRunError`.
    """
    if concurrency < 1:
        raise ValueError("concurrency must be >= 1")
    params = params or InferenceParams()
    records = read_jsonl(dataset) if isinstance(dataset, (str, Path)) else list(dataset)
    out = Path(out)
    try:
        done = _load_done(out)
    except OSError as e:
        raise _abort(out, e, 0, len(records)) from e
    todo = [r for r in records if (r["id"], mode) not in done]
    # build every prompt up front so bad records fail before any request
    jobs = [(r, record_prompt(r, kind, mode, llama_wrapper=llama_wrapper, system_prompt=system_prompt))
            for r in todo]

    def call(rec: dict, messages: list[dict]) -> EvalRecord:
        if jitter > 0:
            time.sleep(random.uniform(0, jitter))
        start = time.perf_counter()
        output, error = None, None
        try:
            output = complete(endpoint, messages, params)
        except HarnessError as e:
            error = f"{type(e).__name__}: {e}"
        return EvalRecord(
            id=rec["id"], mode=mode, kind=kind, prompt=messages, output=output,
            parsed=parse_answer(kind, output), gold=rec.get("gold"), model=endpoint.model,
            latency=round(time.perf_counter() - start, 6), error=error,
        )

    completed = errors = 0
    try:
        with open(out, "a", encoding="utf-8") as f, ThreadPoolExecutor(concurrency) as pool:
            futures = [pool.submit(call, r, m) for r, m in jobs]
            try:
                for fut in as_completed(futures):
                    ev = fut.result()
                    f.write(dumps_record(ev.to_record()) + "\n")
                    f.flush()
                    completed += 1
                    errors += ev.error is not None
            except BaseException:
                for fut in futures:
                    fut.cancel()
                raise
    except OSError as e:
        raise _abort(out, e, completed, len(jobs) - completed) from e
    _marker(out).unlink(missing_ok=True)
    return RunSummary(str(out), len(records), len(records) - len(jobs), completed, errors)


def _one_line(text: str) -> str:
    for line in text.strip().splitlines():
        line = line.strip()
        if line:
            return line
    return ""


def rephrase_answer(endpoint: Endpoint, question: str, answer: str,
                    params: InferenceParams | None = None, *,
                    complete: Completer = chat_complete) -> str:
    """Ask the model for a short form of ``answer``; returns its first non-empty line."""
    if not answer or not answer.strip():
        raise ValueError("answer to rephrase must be non-empty")
    messages = build_prompt("rephrase", "", question, answer)
    return _one_line(complete(endpoint, messages, params or InferenceParams()))


def _question_of(rec: dict) -> str:
    # the user turn ends with "Question: ...\nAnswer:"; recover the question text
    text = rec["prompt"][-1]["content"]
    head, sep, _ = text.rpartition("\nAnswer:")
    line = head.rsplit("\n", 1)[-1] if sep else ""
    return line.split(": ", 1)[1] if line.startswith(("Question: ", "Use few words")) else line


def rephrase_run(records: str | Path, endpoint: Endpoint, params: InferenceParams | None = None,
                 out: str | Path | None = None, *, questions: dict[str, str] | None = None,
                 complete: Completer = chat_complete) -> int:
    """Second pass over a run file: add ``rephrased`` to records that lack it.

    Raw outputs are kept.  ``questions`` maps sample id to the original
    question; without it the question is recovered from the stored prompt.
    Returns the number of records rephrased.
    """
    src = Path(records)
    rows = read_jsonl(src)
    n = 0
    for rec in rows:
        if rec.get("rephrased") is not None or not (rec.get("output") or "").strip():
            continue
        q = (questions or {}).get(rec["id"]) or _question_of(rec)
        try:
            rec["rephrased"] = rephrase_answer(endpoint, q, rec["output"], params, complete=complete)
            n += 1
        except HarnessError as e:
            log.warning("rephrase failed for %s: %s", rec["id"], e)
    _atomic_write(Path(out) if out else src, rows)
    return n


def _atomic_write(path: Path, rows: list[dict]) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as f:
        for r in rows:
            f.write(dumps_record(r) + "\n")
    os.replace(tmp, path)


@dataclass
class RunReport:
    metric: str
    overall: ScoreReport
    by_mode: dict[str, ScoreReport] = field(default_factory=dict)

    @property
    def difference(self) -> float | None:
        if set(MODES) <= self.by_mode.keys():
            return self.by_mode["layout"].aggregate - self.by_mode["strip"].aggregate
        return None

    def table(self) -> str:
        """Strip / Layout / Difference on a 0-100 scale."""
        cols = ["Metric", *(m.capitalize() for m in ("strip", "layout") if m in self.by_mode)]
        vals = [self.metric, *(f"{100 * self.by_mode[m].aggregate:.2f}" for m in ("strip", "layout")
                               if m in self.by_mode)]
        if self.difference is not None:
            cols.append("Difference")
            vals.append(f"{100 * self.difference:+.2f}")
        widths = [max(len(c), len(v)) for c, v in zip(cols, vals)]
        fmt = lambda row: "  ".join(s.ljust(w) for s, w in zip(row, widths)).rstrip()
        return fmt(cols) + "\n" + fmt(vals)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "overall": self.overall.to_dict(),
            "by_mode": {m: r.aggregate for m, r in self.by_mode.items()},
            "difference": self.difference,
        }


def _prediction(metric: str, rec: dict) -> str:
    if metric == "anls" and rec.get("rephrased") is not None:
        return rec["rephrased"]
    return rec.get("output") or ""


def score_run(records: str | Path | Iterable[dict], metric: str,
              golds: str | Path | dict[str, Any] | None = None, *,
              out: str | Path | None = None) -> RunReport:
    """Score every record with ``metric`` and summarise by mode.

    Gold comes from ``golds`` (a dataset JSONL or an id-to-gold mapping) or
    from each record's own ``gold`` field.  ANLS prefers the rephrased answer
    when one exists.  Failed requests score 0.  With ``out``, the scored
    records are written there.
    """
    if metric not in METRICS:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRICS)}")
    rows = read_jsonl(records) if isinstance(records, (str, Path)) else [dict(r) for r in records]
    if isinstance(golds, (str, Path)):
        golds = {r["id"]: r["gold"] for r in read_jsonl(golds)}
    fn = METRICS[metric]
    per_mode: dict[str, list[float]] = {}
    scores = []
    for rec in rows:
        gold = (golds or {}).get(rec["id"], rec.get("gold"))
        if gold is None or gold == "" or gold == []:
            raise ValueError(f"no gold for record {rec['id']!r}")
        s = 0.0 if rec.get("error") else float(fn(_prediction(metric, rec), gold))
        rec["score"] = s
        scores.append(s)
        per_mode.setdefault(rec.get("mode", "layout"), []).append(s)
    if out is not None:
        _atomic_write(Path(out), rows)
    return RunReport(
        metric=metric,
        overall=ScoreReport(metric, scores),
        by_mode={m: ScoreReport(metric, v) for m, v in per_mode.items()},
    )
