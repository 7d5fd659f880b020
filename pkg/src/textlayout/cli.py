"""Command line entry point: ``textlayout <command> ...``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .datagen import (
    PuzzleConfig,
    TextLayoutQAConfig,
    gen_puzzles,
    gen_table_qa,
    gen_textlayoutqa,
    read_jsonl,
    textlayoutqa_samples,
    write_jsonl,
)
from .harness import Endpoint, InferenceParams, KINDS, rephrase_run, run_eval, score_run
from .harness.runner import MODES
from .ingest import UnitSize, layout_parse, load_ocr_json
from .canvas import strip_layout
from .metrics import METRICS, score_corpus
from .tables import ENCODERS, encode_table, load_table
from .validation import resolve_marker

EVAL_DEFAULTS = {
    "endpoint": None,
    "model": "default",
    "concurrency": 4,
    "timeout": 120.0,
    "llama_wrapper": False,
    "system_prompt": None,
}


def _cmd_layout(args) -> int:
    frags = load_ocr_json(args.input)
    unit = UnitSize(*args.unit) if args.unit else None
    text = layout_parse(frags, cleanup=not args.no_cleanup, fill=resolve_marker(args.marker), unit=unit)
    print(strip_layout(text) if args.strip else text)
    return 0


def _cmd_encode_table(args) -> int:
    print(encode_table(load_table(args.input), args.format))
    return 0


def _cmd_gen(args) -> int:
    if args.dataset == "textlayoutqa":
        pairs = gen_textlayoutqa(args.seed, args.n or 300, TextLayoutQAConfig())
        samples = textlayoutqa_samples(pairs)
    elif args.dataset == "puzzle":
        puzzles = gen_puzzles(args.seed, args.n or 100, PuzzleConfig())
        samples = [p.to_sample(f"puzzle-{i:04d}") for i, p in enumerate(puzzles)]
    else:
        if not args.table:
            raise SystemExit("gen tableqa needs --table FILE")
        samples = gen_table_qa(load_table(args.table), key_column=args.key_column,
                               table_id=Path(args.table).stem)
    n = write_jsonl(samples, args.out)
    print(f"wrote {n} records to {args.out}", file=sys.stderr)
    return 0


def _pred_text(rec: dict, metric: str) -> str:
    if "prediction" in rec:
        return rec["prediction"] or ""
    if metric == "anls" and rec.get("rephrased") is not None:
        return rec["rephrased"]
    return rec.get("output") or ""


def _cmd_score(args) -> int:
    golds = {r["id"]: r["gold"] for r in read_jsonl(args.gold)}
    preds = {r["id"]: _pred_text(r, args.metric) for r in read_jsonl(args.pred)}
    missing = sorted(golds.keys() - preds.keys())
    if missing:
        print(f"warning: {len(missing)} gold ids have no prediction and score 0", file=sys.stderr)
    ids = sorted(golds)
    report = score_corpus(args.metric, [preds.get(i, "") for i in ids], [golds[i] for i in ids])
    print(json.dumps(report.to_dict() if args.per_sample else
                     {"metric": report.metric, "count": report.count, "aggregate": report.aggregate}))
    return 0


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path, encoding="utf-8") as f:
        cfg = json.load(f)
    if not isinstance(cfg, dict):
        raise SystemExit(f"{path}: config must be a JSON object")
    return cfg


def _resolve(args, cfg: dict) -> dict:
    out = {}
    for key, default in EVAL_DEFAULTS.items():
        val = getattr(args, key, None)
        out[key] = val if val is not None else cfg.get(key, default)
    if not out["endpoint"]:
        raise SystemExit("an endpoint is required (--endpoint or config file)")
    return out


def _params(cfg: dict) -> InferenceParams:
    return InferenceParams(**cfg.get("params", {}))


def _endpoint(opts: dict, cfg: dict) -> Endpoint:
    return Endpoint(opts["endpoint"], model=opts["model"], timeout=float(opts["timeout"]),
                    max_attempts=int(cfg.get("max_attempts", 3)), backoff=float(cfg.get("backoff", 1.0)))


def _cmd_eval_run(args) -> int:
    cfg = _load_config(args.config)
    opts = _resolve(args, cfg)
    modes = MODES if args.mode == "both" else (args.mode,)
    for mode in modes:
        summary = run_eval(args.dataset, args.kind, mode, _endpoint(opts, cfg), _params(cfg), args.out,
                           concurrency=int(opts["concurrency"]), llama_wrapper=bool(opts["llama_wrapper"]),
                           system_prompt=opts["system_prompt"])
        print(json.dumps({"mode": mode, **summary.to_dict()}))
    return 0


def _cmd_eval_rephrase(args) -> int:
    cfg = _load_config(args.config)
    opts = _resolve(args, cfg)
    questions = {r["id"]: r["question"] for r in read_jsonl(args.dataset)} if args.dataset else None
    n = rephrase_run(args.records, _endpoint(opts, cfg), _params(cfg), args.out, questions=questions)
    print(json.dumps({"rephrased": n, "out": args.out or args.records}))
    return 0


def _cmd_eval_score(args) -> int:
    report = score_run(args.records, args.metric, args.gold, out=args.out)
    print(report.table())
    if args.json:
        print(json.dumps(report.to_dict()))
    return 0


def _eval_endpoint_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--endpoint", help="base URL, e.g. http://localhost:8000/v1")
    p.add_argument("--model")
    p.add_argument("--timeout", type=float)
    p.add_argument("--config", help="JSON file with defaults (endpoint, model, params, ...)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="textlayout", description="layout-preserving text for LLM evaluation")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("layout", help="render OCR JSON as layout text")
    p.add_argument("input", help="JSON list of {text, bbox} records")
    p.add_argument("--marker", default="space", help="space, tab, caron, vanilla or one character")
    p.add_argument("--no-cleanup", action="store_true")
    p.add_argument("--strip", action="store_true", help="collapse all whitespace runs")
    p.add_argument("--unit", type=float, nargs=2, metavar=("X0", "Y0"), help="fixed unit character size")
    p.set_defaults(func=_cmd_layout)

    p = sub.add_parser("encode-table", help="serialize a JSON table")
    p.add_argument("input", help='{"header": [...], "rows": [[...]]} or a list of rows')
    p.add_argument("--format", choices=sorted(ENCODERS), default="layout")
    p.set_defaults(func=_cmd_encode_table)

    p = sub.add_parser("gen", help="generate a QA dataset as JSONL")
    p.add_argument("dataset", choices=["textlayoutqa", "puzzle", "tableqa"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, help="pairs (textlayoutqa, default 300) or puzzles (default 100)")
    p.add_argument("--table", help="table JSON (tableqa)")
    p.add_argument("--key-column", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("score", help="score predictions against gold records")
    p.add_argument("--metric", choices=sorted(METRICS), required=True)
    p.add_argument("--pred", required=True, help="JSONL with id and prediction (or output)")
    p.add_argument("--gold", required=True, help="JSONL with id and gold")
    p.add_argument("--per-sample", action="store_true")
    p.set_defaults(func=_cmd_score)

    ev = sub.add_parser("eval", help="run and score model evaluations").add_subparsers(dest="eval_command",
                                                                                      required=True)
    p = ev.add_parser("run", help="query an endpoint for every dataset record")
    p.add_argument("--dataset", required=True)
    p.add_argument("--kind", choices=list(KINDS), required=True)
    p.add_argument("--mode", choices=[*MODES, "both"], default="layout")
    p.add_argument("--out", required=True)
    p.add_argument("--concurrency", type=int)
    p.add_argument("--llama-wrapper", action="store_const", const=True, default=None)
    p.add_argument("--system-prompt")
    _eval_endpoint_args(p)
    p.set_defaults(func=_cmd_eval_run)

    p = ev.add_parser("rephrase", help="add short rephrased answers to a run file")
    p.add_argument("--records", required=True)
    p.add_argument("--dataset", help="dataset JSONL supplying the original questions")
    p.add_argument("--out", help="write here instead of rewriting --records")
    _eval_endpoint_args(p)
    p.set_defaults(func=_cmd_eval_rephrase)

    p = ev.add_parser("score", help="score a run file by mode")
    p.add_argument("--records", required=True)
    p.add_argument("--metric", choices=sorted(METRICS), required=True)
    p.add_argument("--gold", help="dataset JSONL; defaults to the gold stored on each record")
    p.add_argument("--out", help="write scored records here")
    p.add_argument("--json", action="store_true", help="also print the report as JSON")
    p.set_defaults(func=_cmd_eval_score)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
