"""Prompting, transport and run orchestration for layout/strip evaluations."""
from .client import (
    API_KEY_ENV,
    Endpoint,
    HarnessError,
    InferenceParams,
    ProtocolError,
    TransportError,
    chat_complete,
)
from .mock import MockChatServer
from .prompts import KINDS, build_prompt, render_prompt
from .runner import (
    EvalRecord,
    PartialRunError,
    RunReport,
    RunSummary,
    rephrase_answer,
    rephrase_run,
    run_eval,
    score_run,
)

__all__ = [
    "API_KEY_ENV",
    "Endpoint",
    "EvalRecord",
    "HarnessError",
    "InferenceParams",
    "KINDS",
    "MockChatServer",
    "PartialRunError",
    "ProtocolError",
    "RunReport",
    "RunSummary",
    "TransportError",
    "build_prompt",
    "chat_complete",
    "render_prompt",
    "rephrase_answer",
    "rephrase_run",
    "run_eval",
    "score_run",
]
