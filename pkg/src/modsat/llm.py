"""Chat-completion clients: live HTTP, transcript replay and scripted mocks."""
from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Protocol, Union

GENERATION_TEMPERATURE = 0.8
JUDGE_TEMPERATURE = 0.0


class LLMError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChatRequest:
    system: str
    user: str
    temperature: float = GENERATION_TEMPERATURE
    max_tokens: int = 2048
    model: str = ""

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be non-negative")

    @property
    def digest(self) -> str:
        return request_digest(self)


def request_digest(req: ChatRequest) -> str:
    payload = json.dumps([req.system, req.user, float(req.temperature), req.model],
                         ensure_ascii=False, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()


class ChatClient(Protocol):
    def complete(self, req: ChatRequest) -> str: ...


@dataclass
class Transcript:
    entries: list = field(default_factory=list)  # [{"digest", "response", ...}]

    def append(self, req: ChatRequest, response: str) -> None:
        self.entries.append({"digest": req.digest, "response": response,
                             "user_head": req.user[:80]})

    def __len__(self) -> int:
        return len(self.entries)

    def dumps(self) -> str:
        return "".join(json.dumps(e, ensure_ascii=False, sort_keys=True) + "\n" for e in self.entries)

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(self.dumps(), encoding="utf-8")

    @classmethod
    def loads(cls, text: str) -> "Transcript":
        entries = []
        for line in text.splitlines():
            if line.strip():
                e = json.loads(line)
                if "digest" not in e or "response" not in e:
                    raise ValueError("transcript entry lacks digest or response")
                entries.append(e)
        return cls(entries)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "Transcript":
        return cls.loads(Path(path).read_text(encoding="utf-8"))


def record(req: ChatRequest, resp: str, transcript: Transcript) -> Transcript:
    transcript.append(req, resp)
    return transcript


class LiveClient:
    """OpenAI-compatible chat endpoint.

    Reads ``MODSAT_LLM_URL``, ``MODSAT_LLM_KEY`` and ``MODSAT_LLM_MODEL``
    unless given explicitly.
    """

    def __init__(self, url: str | None = None, api_key: str | None = None,
                 model: str | None = None, timeout: float = 120.0, retries: int = 3,
                 backoff: float = 1.0, session=None):
        self.url = url or os.environ.get("MODSAT_LLM_URL")
        self.api_key = api_key or os.environ.get("MODSAT_LLM_KEY")
        self.model = model or os.environ.get("MODSAT_LLM_MODEL", "")
        self.timeout = timeout
        self.retries = retries
        self.backoff = backoff
        self.calls = 0
        self._session = session

    def _post(self, body: dict) -> dict:
        import requests

        session = self._session or requests
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        resp = session.post(self.url, json=body, headers=headers, timeout=self.timeout)
        resp.raise_for_status()
        return resp.json()

    def complete(self, req: ChatRequest) -> str:
        import requests

        if not self.url:
            raise LLMError("no LLM endpoint configured (MODSAT_LLM_URL)")
        body = {
            "model": req.model or self.model,
            "messages": [{"role": "system", "content": req.system},
                         {"role": "user", "content": req.user}],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        last = None
        for attempt in range(self.retries):
            self.calls += 1
            try:
                data = self._post(body)
                return data["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
                last = exc
                if attempt + 1 < self.retries:
                    time.sleep(self.backoff * 2 ** attempt)
        raise LLMError(f"LLM request failed after {self.retries} attempts: {last}")


class ReplayClient:
    """Serves recorded responses in order, checking each request digest."""

    def __init__(self, transcript: Transcript):
        self.transcript = transcript
        self.pos = 0
        self._lock = threading.Lock()

    def complete(self, req: ChatRequest) -> str:
        with self._lock:
            if self.pos >= len(self.transcript):
                raise LLMError("transcript exhausted")
            entry = self.transcript.entries[self.pos]
            got = req.digest
            if entry["digest"] != got:
                raise LLMError(f"digest mismatch at entry {self.pos}: expected "
                               f"{entry['digest']}, got {got}")
            self.pos += 1
            return entry["response"]


class MockClient:
    """Scripted client: a function of the request, or a fixed response sequence."""

    def __init__(self, script: Union[Callable[[ChatRequest], str], Iterable[str]]):
        if callable(script):
            self._fn = script
            self._queue = None
        else:
            self._fn = None
            self._queue = list(script)
        self.requests: list[ChatRequest] = []

    def complete(self, req: ChatRequest) -> str:
        self.requests.append(req)
        if self._fn is not None:
            out = self._fn(req)
        else:
            if not self._queue:
                raise LLMError("mock script exhausted")
            out = self._queue.pop(0)
        if isinstance(out, Exception):
            raise out
        return out


class RecordingClient:
    """Wraps another client and appends every exchange to a transcript."""

    def __init__(self, inner: ChatClient, transcript: Optional[Transcript] = None):
        self.inner = inner
        self.transcript = transcript if transcript is not None else Transcript()

    def complete(self, req: ChatRequest) -> str:
        resp = self.inner.complete(req)
        record(req, resp, self.transcript)
        return resp
