import json

import pytest
import requests

from textlayout.datagen import gen_textlayoutqa, read_jsonl, textlayoutqa_samples, write_jsonl, xfund_to_qa
from textlayout.harness import (
    Endpoint,
    EvalRecord,
    InferenceParams,
    MockChatServer,
    PartialRunError,
    ProtocolError,
    TransportError,
    build_prompt,
    chat_complete,
    rephrase_answer,
    rephrase_run,
    run_eval,
    score_run,
)
from textlayout.harness.client import API_KEY_ENV
from textlayout.harness.runner import record_prompt

USER = [{"role": "user", "content": "hello there"}]


@pytest.fixture
def server():
    with MockChatServer() as srv:
        yield srv


def fast(url, **kw):
    return Endpoint(url, model="mock", backoff=0.0, **kw)


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "ds.jsonl"
    write_jsonl(textlayoutqa_samples(gen_textlayoutqa(0, n_pairs=10)), path)
    return path


class FakeResponse:
    def __init__(self, status=200, body=None, text=""):
        self.status_code, self._body, self.text = status, body, text

    def json(self):
        if self._body is None:
            raise ValueError("no json")
        return self._body


class FakeSession:
    def __init__(self, response):
        self.response, self.calls = response, []

    def post(self, url, **kw):
        self.calls.append((url, kw))
        return self.response


class TestParams:
    def test_defaults(self):
        assert InferenceParams().to_request() == {
            "temperature": 0.1, "top_p": 0.85, "max_tokens": 512, "repetition_penalty": 1.05}

    def test_endpoint(self, monkeypatch):
        assert Endpoint("http://h/v1/").url == "http://h/v1/chat/completions"
        assert Endpoint("http://h/v1/chat/completions").url == "http://h/v1/chat/completions"
        assert Endpoint("x").timeout == 120.0 and Endpoint("x").max_attempts == 3
        monkeypatch.setenv(API_KEY_ENV, "sek")
        assert Endpoint("x").headers()["Authorization"] == "Bearer sek"


class TestChatComplete:
    def test_echo(self, server):
        assert chat_complete(fast(server.url), USER) == "hello there"
        body = server.requests[0]
        assert body["model"] == "mock" and body["messages"] == USER
        assert body["temperature"] == 0.1 and body["max_tokens"] == 512

    def test_three_500s(self):
        with MockChatServer(fail_first=3) as srv:
            with pytest.raises(TransportError, match="3 attempts"):
                chat_complete(fast(srv.url), USER)
            assert srv.hits == 3

    def test_recovers(self):
        with MockChatServer(fail_first=2, fail_status=429) as srv:
            assert chat_complete(fast(srv.url), USER) == "hello there"
            assert srv.hits == 3

    def test_client_error_not_retried(self):
        with MockChatServer(fail_first=5, fail_status=400) as srv:
            with pytest.raises(TransportError, match="400"):
                chat_complete(fast(srv.url), USER)
            assert srv.hits == 1

    def test_unreachable(self):
        with pytest.raises(TransportError):
            chat_complete(fast("http://127.0.0.1:9/v1", timeout=1), USER)

    def test_malformed(self):
        with pytest.raises(ProtocolError):
            chat_complete(fast("http://x"), USER, session=FakeSession(FakeResponse(200, {"choices": []})))
        with pytest.raises(ProtocolError):
            chat_complete(fast("http://x"), USER, session=FakeSession(FakeResponse(200, None, "<html>")))
        with pytest.raises(ProtocolError):
            body = {"choices": [{"message": {"content": None}}]}
            chat_complete(fast("http://x"), USER, session=FakeSession(FakeResponse(200, body)))

    def test_timeout_forwarded(self):
        sess = FakeSession(FakeResponse(200, {"choices": [{"message": {"content": "ok"}}]}))
        chat_complete(Endpoint("http://x", timeout=7.5), USER, session=sess)
        assert sess.calls[0][1]["timeout"] == 7.5

    def test_empty_messages(self):
        with pytest.raises(ValueError):
            chat_complete(fast("http://x"), [])

    def test_timeout_retried(self, monkeypatch):
        calls = []

        def boom(*a, **kw):
            calls.append(1)
            raise requests.Timeout("slow")

        monkeypatch.setattr(requests, "post", boom)
        with pytest.raises(TransportError):
            chat_complete(fast("http://x"), USER)
        assert len(calls) == 3


class TestPrompts:
    def test_xfund(self):
        (text,) = [m["content"] for m in build_prompt("xfundqa", "姓名 张三", "姓名")]
        assert 'What is the value of the key "姓名"?' in text
        assert text.startswith('The following is a form composed of key-value pairs: "姓名 张三".')

    def test_rephrase(self):
        text = build_prompt("rephrase", "", "Q?", "long answer")[-1]["content"]
        assert text.endswith("Rephrased answer:")
        assert "Rephrased answer: Jo Spach" in text and "Rephrased answer: 80%" in text
        with pytest.raises(ValueError):
            build_prompt("rephrase", "", "Q?")

    def test_textlayoutqa_empty_context(self):
        text = build_prompt("textlayoutqa", "", "What?")[0]["content"]
        assert "reply with the list only!" in text
        assert text.count("apple") == 1 and "Now answer the question below:\n\n\nQuestion: What?" in text

    def test_docvqa_fetaqa(self):
        assert build_prompt("docvqa", "C", "Q")[0]["content"] == (
            "Given the context:\nC\nUse few words to answer the question: Q\nAnswer:")
        assert "Note: think step by step." in build_prompt("fetaqa", "T", "Q")[0]["content"]

    def test_unknown(self):
        with pytest.raises(ValueError, match="unknown prompt kind"):
            build_prompt("squad", "c", "q")

    def test_llama_wrapper(self):
        (msg,) = build_prompt("docvqa", "C", "Q", llama_wrapper=True, system_prompt="SYS")
        assert msg["content"].startswith("<s>[INST] <<SYS>>\nSYS\n<</SYS>>\nGiven the context:")
        assert msg["content"].endswith("Answer: [/INST]")

    def test_system_message(self):
        msgs = build_prompt("docvqa", "C", "Q", system_prompt="be brief")
        assert msgs[0] == {"role": "system", "content": "be brief"}

    def test_modes_differ_only_in_context(self, dataset):
        for rec in read_jsonl(dataset):
            lay = record_prompt(rec, "textlayoutqa", "layout")[-1]["content"]
            strip = record_prompt(rec, "textlayoutqa", "strip")[-1]["content"]
            assert lay.replace(rec["context_layout"], "<CTX>") == strip.replace(rec["context_strip"], "<CTX>")
            assert "\n" not in rec["context_strip"] and rec["context_strip"] in strip

    def test_xfund_uses_key(self):
        (s,) = xfund_to_qa([("姓名", "张三")], context="姓名  张三")
        text = record_prompt(s.to_record(), "xfundqa", "layout")[0]["content"]
        assert 'What is the value of the key "姓名"?' in text


class TestRunEval:
    def test_run_and_resume(self, server, dataset, tmp_path):
        out = tmp_path / "run.jsonl"
        summary = run_eval(dataset, "textlayoutqa", "layout", fast(server.url), out=out, jitter=0)
        assert (summary.total, summary.completed, summary.errors) == (30, 30, 0)
        lines = out.read_text().splitlines()
        assert len(lines) == 30
        recs = [EvalRecord.from_record(json.loads(line)) for line in lines]
        assert all(r.mode == "layout" and r.score is None and r.model == "mock" for r in recs)
        assert all(r.output == r.prompt[-1]["content"] for r in recs)
        out.write_text("\n".join(lines[:20]) + "\n")
        n = len(server.requests)
        summary = run_eval(dataset, "textlayoutqa", "layout", fast(server.url), out=out, jitter=0)
        assert len(server.requests) - n == 10 and summary.skipped == 20
        n = len(server.requests)
        run_eval(dataset, "textlayoutqa", "layout", fast(server.url), out=out, jitter=0)
        assert len(server.requests) == n
        keys = [(r["id"], r["mode"]) for r in read_jsonl(out)]
        assert len(keys) == len(set(keys)) == 30

    def test_torn_line(self, server, dataset, tmp_path):
        out = tmp_path / "run.jsonl"
        run_eval(dataset, "textlayoutqa", "strip", fast(server.url), out=out, jitter=0)
        data = out.read_text()
        out.write_text(data[: len(data) - 40])
        run_eval(dataset, "textlayoutqa", "strip", fast(server.url), out=out, jitter=0)
        assert len(read_jsonl(out)) == 30

    def test_strip_context(self, server, dataset, tmp_path):
        out = tmp_path / "run.jsonl"
        run_eval(dataset, "textlayoutqa", "strip", fast(server.url), out=out, jitter=0)
        src = {r["id"]: r for r in read_jsonl(dataset)}
        for rec in read_jsonl(out):
            assert src[rec["id"]]["context_strip"] in rec["prompt"][0]["content"]

    def test_errors_recorded(self, dataset, tmp_path):
        out = tmp_path / "run.jsonl"
        with MockChatServer(fail_first=1000) as srv:
            s = run_eval(dataset, "textlayoutqa", "layout", fast(srv.url, max_attempts=1), out=out, jitter=0)
        assert s.errors == 30
        recs = read_jsonl(out)
        assert all(r["output"] is None and "TransportError" in r["error"] for r in recs)

    def test_partial_marker(self, server, dataset, tmp_path):
        out = tmp_path / "run_dir"
        out.mkdir()
        with pytest.raises(PartialRunError):
            run_eval(dataset, "textlayoutqa", "layout", fast(server.url), out=out, jitter=0)
        assert (tmp_path / "run_dir.partial").exists()

    def test_concurrency_bound(self, dataset, tmp_path):
        import threading
        import time

        live, peak, lock = [0], [0], threading.Lock()

        def slow(endpoint, messages, params):
            with lock:
                live[0] += 1
                peak[0] = max(peak[0], live[0])
            time.sleep(0.01)
            with lock:
                live[0] -= 1
            return "[]"

        run_eval(dataset, "textlayoutqa", "layout", fast("http://x"), out=tmp_path / "r.jsonl",
                 concurrency=3, jitter=0, complete=slow)
        assert 1 < peak[0] <= 3

    def test_parsed(self, dataset, tmp_path):
        out = tmp_path / "r.jsonl"
        run_eval(dataset, "textlayoutqa", "layout", fast("http://x"), out=out, jitter=0,
                 complete=lambda e, m, p: "Answer: ['x', 'y']")
        assert all(r["parsed"] == ["x", "y"] for r in read_jsonl(out))


class TestRephrase:
    def test_first_line(self):
        with MockChatServer(lambda body: " Jo Spach\nmore text") as srv:
            assert rephrase_answer(fast(srv.url), "Who?", "The name is Jo Spach.") == "Jo Spach"
            assert srv.requests[0]["messages"][-1]["content"].endswith(
                "Question: Who?\nAnswer: The name is Jo Spach.\nRephrased answer:")

    def test_echo_plumbing(self, server):
        out = rephrase_answer(fast(server.url), "Q", "A")
        assert out == build_prompt("rephrase", "", "Q", "A")[0]["content"].split("\n")[0]

    def test_empty_answer(self, server):
        with pytest.raises(ValueError):
            rephrase_answer(fast(server.url), "Q", "  ")

    def test_run(self, tmp_path):
        path = tmp_path / "r.jsonl"
        recs = [{"id": "a", "mode": "layout", "prompt": build_prompt("docvqa", "c", "Who is CC?"),
                 "output": "It is Jo Spach.", "gold": ["Jo Spach"]}]
        write_jsonl(recs, path)
        seen = []

        def fake(endpoint, messages, params):
            seen.append(messages[0]["content"])
            return "Jo Spach"

        assert rephrase_run(path, fast("http://x"), complete=fake) == 1
        (rec,) = read_jsonl(path)
        assert rec["output"] == "It is Jo Spach." and rec["rephrased"] == "Jo Spach"
        assert "Question: Who is CC?\nAnswer: It is Jo Spach." in seen[0]
        assert rephrase_run(path, fast("http://x"), complete=fake) == 0
        assert score_run(path, "anls").overall.aggregate == 1.0


class TestScoreRun:
    def _rec(self, i, mode, output, gold):
        return {"id": str(i), "mode": mode, "output": output, "gold": gold}

    def test_all_ones(self):
        recs = [self._rec(i, "layout", "['a']", ["a"]) for i in range(3)]
        r = score_run(recs, "fscore")
        assert r.overall.aggregate == 1.0 and r.overall.count == 3

    def test_gold_self(self, dataset):
        recs = [self._rec(r["id"], "layout", repr(r["gold"]), r["gold"]) for r in read_jsonl(dataset)]
        assert score_run(recs, "fscore", golds=dataset).overall.aggregate == 1.0

    def test_mixed_modes(self, tmp_path):
        recs = [self._rec(0, "layout", "['a']", ["a"]), self._rec(0, "strip", "['b']", ["a"])]
        r = score_run(recs, "fscore", out=tmp_path / "s.jsonl")
        header = r.table().split("\n")[0].split()
        assert header == ["Metric", "Strip", "Layout", "Difference"]
        assert r.difference == 1.0 and "+100.00" in r.table()
        assert [x["score"] for x in read_jsonl(tmp_path / "s.jsonl")] == [1.0, 0.0]

    def test_errors_score_zero(self):
        rec = {**self._rec(0, "layout", None, ["a"]), "error": "TransportError: x"}
        assert score_run([rec], "fscore").overall.scores == [0.0]

    def test_unknown_metric(self):
        with pytest.raises(ValueError, match="unknown metric"):
            score_run([], "meteor")

    def test_missing_gold(self):
        with pytest.raises(ValueError, match="no gold"):
            score_run([{"id": "x", "mode": "layout", "output": "a"}], "anls")
