"""Minimal chat-completions client with bounded retries."""
from __future__ import annotations

import logging
import os
import random
import time
from dataclasses import asdict, dataclass

import requests

log = logging.getLogger(__name__)

API_KEY_ENV = "TEXTLAYOUT_API_KEY"


class HarnessError(RuntimeError):
    pass


class TransportError(HarnessError):
    """The endpoint could not be reached or kept failing."""


class ProtocolError(HarnessError):
    """The endpoint answered with a body we cannot interpret."""


@dataclass(frozen=True)
class InferenceParams:
    temperature: float = 0.1
    top_p: float = 0.85
    max_output_tokens: int = 512
    repetition_penalty: float = 1.05

    def to_request(self) -> dict:
        return {
            "temperature": self.temperature,
            "top_p": self.top_p,
            "max_tokens": self.max_output_tokens,
            "repetition_penalty": self.repetition_penalty,
        }

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class Endpoint:
    base_url: str
    model: str = "default"
    api_key: str | None = None
    timeout: float = 120.0
    max_attempts: int = 3
    backoff: float = 1.0

    @property
    def url(self) -> str:
        base = self.base_url.rstrip("/")
        return base if base.endswith("/chat/completions") else base + "/chat/completions"

    def headers(self) -> dict:
        key = self.api_key or os.environ.get(API_KEY_ENV) or os.environ.get("OPENAI_API_KEY")
        headers = {"Content-Type": "application/json"}
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers


def _transient(status: int) -> bool:
    return status == 429 or status >= 500


def chat_complete(endpoint: Endpoint, messages: list[dict], params: InferenceParams | None = None,
                  session: requests.Session | None = None) -> str:
    """POST one chat-completions request and return the first choice's text.

    Connection errors, timeouts, 429 and 5xx responses are retried with
    exponential backoff up to ``endpoint.max_attempts`` attempts in total.
    """
    if not messages:
        raise ValueError("messages must be non-empty")
    params = params or InferenceParams()
    payload = {"model": endpoint.model, "messages": messages, **params.to_request()}
    post = (session or requests).post
    last: str = ""
    for attempt in range(endpoint.max_attempts):
        if attempt:
            delay = endpoint.backoff * 2 ** (attempt - 1) * (1 + 0.25 * random.random())
            log.debug("retrying in %.2fs after: %s", delay, last)
            time.sleep(delay)
        try:
            resp = post(endpoint.url, json=payload, headers=endpoint.headers(), timeout=endpoint.timeout)
        except (requests.ConnectionError, requests.Timeout) as e:
            last = f"{type(e).__name__}: {e}"
            continue
        if resp.status_code >= 400:
            last = f"HTTP {resp.status_code}: {resp.text[:500]}"
            if _transient(resp.status_code):
                continue
            raise TransportError(last)
        try:
            content = resp.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError) as e:
            raise ProtocolError(f"unexpected response body: {resp.text[:500]}") from e
        if not isinstance(content, str):
            raise ProtocolError(f"choice content is {type(content).__name__}, expected a string")
        return content
    raise TransportError(f"{endpoint.url} failed after {endpoint.max_attempts} attempts: {last}")
