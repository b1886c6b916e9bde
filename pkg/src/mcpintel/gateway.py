"""Provider-agnostic completion client with record/replay transcripts.

Requests are fingerprinted over (system_prompt, user_prompt, model_id,
max_output_tokens) so that any prompt change invalidates recorded
transcripts loudly instead of silently replaying stale answers.
Replay mode performs zero network operations.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Callable

import httpx

from .errors import ConfigurationError, GatewayError, ReplayMismatchError, ValidationError

log = logging.getLogger(__name__)

# Output budget for batch classification; smaller budgets truncate the
# model's reasoning output.
DEFAULT_MAX_OUTPUT_TOKENS = 12000

API_KEY_ENV = "MCPINTEL_LLM_API_KEY"
API_BASE_ENV = "MCPINTEL_LLM_API_BASE"


@dataclass(frozen=True)
class CompletionRequest:
    system_prompt: str
    user_prompt: str
    model_id: str = "default"
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    temperature: float = 0.0

    def validate(self) -> "CompletionRequest":
        if not self.system_prompt or not self.user_prompt:
            raise ValidationError("prompts must be non-empty")
        if self.max_output_tokens < 1:
            raise ValidationError(f"max_output_tokens must be >= 1, got {self.max_output_tokens}")
        return self

    @property
    def fingerprint(self) -> str:
        """Stable hash identifying this request in transcripts.

        Deliberately excludes temperature and timestamps so recordings
        stay stable across runs.
        """
        material = json.dumps(
            [self.system_prompt, self.user_prompt, self.model_id, self.max_output_tokens],
            ensure_ascii=False,
        )
        return hashlib.sha256(material.encode("utf-8")).hexdigest()


class TranscriptMode(str, Enum):
    RECORD = "Record"
    REPLAY = "Replay"
    LIVE = "Live"


@dataclass
class Transcript:
    """Ordered (request fingerprint, response text) pairs.

    In Replay mode every request must match the next recorded entry in
    order. Stored on disk as line-delimited JSON records.
    """

    mode: TranscriptMode
    entries: list[tuple[str, str]] = field(default_factory=list)
    _cursor: int = 0
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @classmethod
    def recording(cls) -> "Transcript":
        return cls(mode=TranscriptMode.RECORD)

    @classmethod
    def live(cls) -> "Transcript":
        return cls(mode=TranscriptMode.LIVE)

    @classmethod
    def load(cls, path: str | Path, mode: TranscriptMode = TranscriptMode.REPLAY) -> "Transcript":
        entries = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                entries.append((rec["fingerprint"], rec["response"]))
        return cls(mode=mode, entries=entries)

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for fingerprint, response in self.entries:
                fh.write(json.dumps({"fingerprint": fingerprint, "response": response}, ensure_ascii=False) + "\n")

    def append(self, fingerprint: str, response: str) -> None:
        with self._lock:
            self.entries.append((fingerprint, response))

    def next_for(self, fingerprint: str) -> str:
        with self._lock:
            if self._cursor >= len(self.entries):
                raise ReplayMismatchError(
                    f"transcript exhausted after {len(self.entries)} entries; request {fingerprint[:12]} has no recording"
                )
            recorded_fp, response = self.entries[self._cursor]
            if recorded_fp != fingerprint:
                raise ReplayMismatchError(
                    f"replay mismatch at entry {self._cursor}: expected {recorded_fp[:12]}, got {fingerprint[:12]} "
                    "(prompts or model changed since recording)"
                )
            self._cursor += 1
            return response

    @property
    def exhausted(self) -> bool:
        return self._cursor >= len(self.entries)


def _default_transport(api_base: str, api_key: str, req: CompletionRequest, timeout: float) -> str:
    """POST a chat-completion request in the mainstream wire format."""
    url = api_base.rstrip("/") + "/chat/completions"
    payload = {
        "model": req.model_id,
        "messages": [
            {"role": "system", "content": req.system_prompt},
            {"role": "user", "content": req.user_prompt},
        ],
        "max_tokens": req.max_output_tokens,
        "temperature": req.temperature,
    }
    response = httpx.post(
        url,
        json=payload,
        headers={"Authorization": f"Bearer {api_key}"},
        timeout=timeout,
    )
    response.raise_for_status()
    body = response.json()
    return body["choices"][0]["message"]["content"]


class LlmGateway:
    """Completion client shareable across concurrent callers.

    A custom ``transport`` (any ``Callable[[CompletionRequest], str]``)
    replaces the HTTP layer, e.g. for call-counting stubs in tests.
    """

    def __init__(
        self,
        model_id: str = "default",
        api_base: str | None = None,
        transport: Callable[[CompletionRequest], str] | None = None,
        max_retries: int = 2,
        retry_backoff: float = 0.5,
        timeout: float = 120.0,
    ):
        self.model_id = model_id
        self.api_base = api_base or os.environ.get(API_BASE_ENV, "")
        self.transport = transport
        self.max_retries = max_retries
        self.retry_backoff = retry_backoff
        self.timeout = timeout

    def request(self, system_prompt: str, user_prompt: str, **kwargs) -> CompletionRequest:
        kwargs.setdefault("model_id", self.model_id)
        return CompletionRequest(system_prompt=system_prompt, user_prompt=user_prompt, **kwargs).validate()

    def complete(self, req: CompletionRequest, transcript: Transcript) -> str:
        """Raw response text for ``req``, unmodified.

        Replay: served from the transcript, no network. Record: live
        call, then the pair is appended. Truncated model output is not
        an error here; downstream repair handles it.
        """
        req.validate()
        if transcript.mode is TranscriptMode.REPLAY:
            return transcript.next_for(req.fingerprint)

        response = self._call_provider(req)
        if transcript.mode is TranscriptMode.RECORD:
            transcript.append(req.fingerprint, response)
        return response

    def _call_provider(self, req: CompletionRequest) -> str:
        if self.transport is None:
            api_key = os.environ.get(API_KEY_ENV, "")
            if not api_key:
                raise ConfigurationError(f"live completion requires {API_KEY_ENV} in the environment")
            if not self.api_base:
                raise ConfigurationError(f"live completion requires an API base URL ({API_BASE_ENV} or config)")
            call = lambda: _default_transport(self.api_base, api_key, req, self.timeout)
        else:
            call = lambda: self.transport(req)  # type: ignore[misc]

        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                return call()
            except (httpx.HTTPError, OSError) as exc:
                last_error = exc
                if attempt < self.max_retries:
                    delay = self.retry_backoff * (2**attempt)
                    log.warning("provider call failed (%s); retry %d/%d in %.1fs", exc, attempt + 1, self.max_retries, delay)
                    time.sleep(delay)
        raise GatewayError(f"provider failed after {self.max_retries + 1} attempts: {last_error}")
