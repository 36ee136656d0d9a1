from __future__ import annotations

import hashlib
import json

import pytest
import requests

from modsat.llm import (ChatRequest, LiveClient, LLMError, MockClient, RecordingClient,
                        ReplayClient, Transcript, record, request_digest)


def test_digest_covers_system_user_temperature_and_model():
    req = ChatRequest("sys", "user", 0.8, model="m")
    expected = hashlib.sha256(json.dumps(["sys", "user", 0.8, "m"], separators=(",", ":")).encode()).hexdigest()
    assert req.digest == request_digest(req) == expected
    assert ChatRequest("sys", "user", 0.0, model="m").digest != expected
    assert ChatRequest("sys", "user", 0.8, max_tokens=5, model="m").digest == expected
    with pytest.raises(ValueError):
        ChatRequest("s", "u", -1.0)


def test_transcript_roundtrip(tmp_path):
    t = Transcript()
    record(ChatRequest("s", "ü " * 60), "réponse\nline", t)
    record(ChatRequest("s", "two"), "b", t)
    t.save(tmp_path / "t.jsonl")
    again = Transcript.load(tmp_path / "t.jsonl")
    assert again.entries == t.entries and len(again) == 2
    with pytest.raises(ValueError):
        Transcript.loads('{"digest": "x"}\n')


def test_recording_then_replay_reproduces_responses():
    rec = RecordingClient(MockClient(["a", "b"]))
    reqs = [ChatRequest("s", "one"), ChatRequest("s", "two", 0.0)]
    assert [rec.complete(r) for r in reqs] == ["a", "b"]
    replay = ReplayClient(Transcript.loads(rec.transcript.dumps()))
    assert [replay.complete(r) for r in reqs] == ["a", "b"]
    with pytest.raises(LLMError, match="exhausted"):
        replay.complete(reqs[0])


def test_replay_mismatch_names_expected_digest():
    t = Transcript()
    t.append(ChatRequest("s", "expected"), "ok")
    replay = ReplayClient(t)
    with pytest.raises(LLMError) as err:
        replay.complete(ChatRequest("s", "different"))
    assert t.entries[0]["digest"] in str(err.value) and "entry 0" in str(err.value)


def test_mock_client_script_forms():
    fn = MockClient(lambda req: req.user.upper())
    assert fn.complete(ChatRequest("s", "hi")) == "HI" and len(fn.requests) == 1
    seq = MockClient(["x", LLMError("boom")])
    assert seq.complete(ChatRequest("s", "1")) == "x"
    with pytest.raises(LLMError, match="boom"):
        seq.complete(ChatRequest("s", "2"))
    with pytest.raises(LLMError, match="exhausted"):
        seq.complete(ChatRequest("s", "3"))


class FakeResponse:
    def __init__(self, payload, status=200):
        self.payload = payload
        self.status = status

    def raise_for_status(self):
        if self.status >= 400:
            raise requests.HTTPError(f"{self.status}")

    def json(self):
        return self.payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.bodies = []

    def post(self, url, json, headers, timeout):
        self.bodies.append((url, json, headers))
        out = self.responses.pop(0)
        if isinstance(out, Exception):
            raise out
        return out


def ok(text):
    return FakeResponse({"choices": [{"message": {"content": text}}]})


def test_live_client_builds_chat_body():
    session = FakeSession([ok("hello")])
    client = LiveClient("http://llm.local/v1/chat", "key", "model-x", session=session, backoff=0)
    assert client.complete(ChatRequest("sys", "usr", 0.0)) == "hello"
    url, body, headers = session.bodies[0]
    assert url == "http://llm.local/v1/chat" and headers["Authorization"] == "Bearer key"
    assert body["model"] == "model-x" and body["temperature"] == 0.0
    assert body["messages"] == [{"role": "system", "content": "sys"}, {"role": "user", "content": "usr"}]


def test_live_client_retries_then_fails():
    session = FakeSession([requests.ConnectionError("down"), FakeResponse({}, 500), ok("late")])
    client = LiveClient("http://llm.local", session=session, retries=3, backoff=0)
    assert client.complete(ChatRequest("s", "u")) == "late" and client.calls == 3
    session = FakeSession([FakeResponse({"choices": []})] * 2)
    client = LiveClient("http://llm.local", session=session, retries=2, backoff=0)
    with pytest.raises(LLMError, match="2 attempts"):
        client.complete(ChatRequest("s", "u"))


def test_live_client_requires_endpoint(monkeypatch):
    monkeypatch.delenv("MODSAT_LLM_URL", raising=False)
    with pytest.raises(LLMError):
        LiveClient().complete(ChatRequest("s", "u"))
