"""A local chat-completions server for tests and offline demos.

Run ``python -m textlayout.harness.mock --port 8000`` for a standalone echo
server at ``http://127.0.0.1:8000/v1``.
"""
from __future__ import annotations

import argparse
import json
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable


def echo_last_user(body: dict) -> str:
    users = [m.get("content", "") for m in body.get("messages", []) if m.get("role") == "user"]
    return users[-1] if users else ""


class MockChatServer:
    """Threaded HTTP server answering ``POST .../chat/completions``.

    ``responder`` maps the decoded request body to the reply text (echo by
    default).  The first ``fail_first`` requests get a ``fail_status``
    response.  Every decoded body is kept in :attr:`requests`.
    """

    def __init__(self, responder: Callable[[dict], str] = echo_last_user, *,
                 fail_first: int = 0, fail_status: int = 500, host: str = "127.0.0.1", port: int = 0):
        self.responder = responder
        self.fail_first = fail_first
        self.fail_status = fail_status
        self.requests: list[dict] = []
        self.hits = 0
        self._lock = threading.Lock()
        self._httpd = ThreadingHTTPServer((host, port), self._handler())
        self._httpd.daemon_threads = True
        self._thread: threading.Thread | None = None

    @property
    def url(self) -> str:
        host, port = self._httpd.server_address[:2]
        return f"http://{host}:{port}/v1"

    def _handler(self):
        server = self

        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *args):
                pass

            def _reply(self, status: int, payload: dict) -> None:
                data = json.dumps(payload).encode()
                self.send_response(status)
                self.send_header("Content-Type", "application/json")
                self.send_header("Content-Length", str(len(data)))
                self.end_headers()
                self.wfile.write(data)

            def do_POST(self):
                raw = self.rfile.read(int(self.headers.get("Content-Length", 0)))
                if not self.path.rstrip("/").endswith("/chat/completions"):
                    return self._reply(404, {"error": {"message": f"no route {self.path}"}})
                try:
                    body = json.loads(raw)
                except json.JSONDecodeError:
                    return self._reply(400, {"error": {"message": "invalid JSON"}})
                with server._lock:
                    server.hits += 1
                    failing = server.hits <= server.fail_first
                    if not failing:
                        server.requests.append(body)
                if failing:
                    return self._reply(server.fail_status, {"error": {"message": "injected failure"}})
                text = server.responder(body)
                self._reply(200, {
                    "id": f"mock-{server.hits}",
                    "object": "chat.completion",
                    "model": body.get("model", "mock"),
                    "choices": [{"index": 0, "finish_reason": "stop",
                                 "message": {"role": "assistant", "content": text}}],
                })

        return Handler

    def start(self) -> MockChatServer:
        self._thread = threading.Thread(target=self._httpd.serve_forever, daemon=True)
        self._thread.start()
        return self

    def stop(self) -> None:
        self._httpd.shutdown()
        self._httpd.server_close()
        if self._thread:
            self._thread.join()

    def __enter__(self) -> MockChatServer:
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()


def main(argv: list[str] | None = None) -> None:
    ap = argparse.ArgumentParser(description="echoing chat-completions mock server")
    ap.add_argument("--host", default="127.0.0.1")
    ap.add_argument("--port", type=int, default=8000)
    args = ap.parse_args(argv)
    srv = MockChatServer(host=args.host, port=args.port)
    print(f"serving on {srv.url}", flush=True)
    try:
        srv._httpd.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        srv._httpd.server_close()


if __name__ == "__main__":
    main()
