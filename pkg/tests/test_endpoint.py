"""Endpoint client: config loading, retry/backoff, credential handling.

All HTTP behavior is exercised through httpx.MockTransport; no test
touches the network. backoff_s is set to 0 so retries are instant.
"""

from __future__ import annotations

import json

import httpx
import pytest

from collabel.errors import AuthError, ParseError, Timeout, TransportError
from collabel.llm.endpoint import EndpointConfig, RemoteEndpoint, classify_remote


def completion_response(text: str) -> httpx.Response:
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


def config_with(transport_irrelevant=None, **overrides) -> EndpointConfig:
    base = dict(
        base_url="https://api.test/v1",
        model="test-model",
        credential_env=None,
        backoff_s=0.0,
        max_retries=3,
    )
    base.update(overrides)
    return EndpointConfig(**base)


# ---------------------------------------------------------------------------
# config


def test_config_from_file_with_section(tmp_path):
    path = tmp_path / "endpoint.toml"
    path.write_text(
        "[endpoint]\n"
        'base_url = "https://api.test/v1"\n'
        'model = "m1"\n'
        'credential_env = "TEST_KEY"\n'
        "timeout_s = 12.5\n"
        "max_retries = 2\n"
        "max_in_flight = 4\n"
        "backoff_s = 0.25\n"
    )
    config = EndpointConfig.from_file(path)
    assert config == EndpointConfig(
        base_url="https://api.test/v1",
        model="m1",
        credential_env="TEST_KEY",
        timeout_s=12.5,
        max_retries=2,
        max_in_flight=4,
        backoff_s=0.25,
    )


def test_config_from_file_flat_layout_and_defaults(tmp_path):
    path = tmp_path / "flat.toml"
    path.write_text('base_url = "https://api.test"\nmodel = "m2"\n')
    config = EndpointConfig.from_file(path)
    assert config.base_url == "https://api.test"
    assert config.model == "m2"
    assert config.credential_env is None
    assert config.timeout_s == 60.0
    assert config.max_retries == 3
    assert config.max_in_flight == 1
    assert config.backoff_s == 1.0


def test_config_from_file_missing_required_key(tmp_path):
    path = tmp_path / "partial.toml"
    path.write_text('[endpoint]\nurl = "https://api.test"\nmodel = "m1"\n')
    with pytest.raises(ParseError, match="endpoint config needs 'base_url'"):
        EndpointConfig.from_file(path)
    path.write_text('[endpoint]\nbase_url = "https://api.test"\n')
    with pytest.raises(ParseError, match="endpoint config needs 'model'"):
        EndpointConfig.from_file(path)


def test_config_validation():
    with pytest.raises(ValueError):
        config_with(max_retries=-1)
    with pytest.raises(ValueError):
        config_with(max_in_flight=0)


# ---------------------------------------------------------------------------
# happy path


def test_classify_remote_returns_completion_text():
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["url"] = str(request.url)
        seen["body"] = json.loads(request.content)
        return completion_response("SCS\nCE\n")

    exchange = classify_remote("my prompt", config_with(), httpx.MockTransport(handler))
    assert exchange.raw_response == "SCS\nCE\n"
    assert exchange.request_text == "my prompt"
    assert exchange.retries == 0
    assert exchange.latency_s >= 0
    assert seen["url"] == "https://api.test/v1/chat/completions"
    assert seen["body"]["model"] == "test-model"
    assert seen["body"]["messages"] == [{"role": "user", "content": "my prompt"}]


def test_bearer_token_sent_from_environment(monkeypatch):
    monkeypatch.setenv("TEST_API_KEY", "sekrit")
    seen = {}

    def handler(request: httpx.Request) -> httpx.Response:
        seen["auth"] = request.headers.get("authorization")
        return completion_response("ok")

    classify_remote(
        "p", config_with(credential_env="TEST_API_KEY"), httpx.MockTransport(handler)
    )
    assert seen["auth"] == "Bearer sekrit"


def test_missing_credential_fails_before_any_request(monkeypatch):
    monkeypatch.delenv("TEST_API_KEY", raising=False)
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return completion_response("ok")

    with pytest.raises(AuthError):
        classify_remote(
            "p", config_with(credential_env="TEST_API_KEY"), httpx.MockTransport(handler)
        )
    assert calls == []


# ---------------------------------------------------------------------------
# retries


def test_transient_500s_are_retried_then_succeed():
    responses = iter([httpx.Response(500), httpx.Response(500), completion_response("done")])
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return next(responses)

    exchange = classify_remote("p", config_with(), httpx.MockTransport(handler))
    assert exchange.raw_response == "done"
    assert exchange.retries == 2
    assert len(calls) == 3


def test_429_is_retried():
    responses = iter([httpx.Response(429), completion_response("done")])
    exchange = classify_remote(
        "p", config_with(), httpx.MockTransport(lambda r: next(responses))
    )
    assert exchange.retries == 1


def test_persistent_500_exhausts_retries():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return httpx.Response(500)

    with pytest.raises(TransportError):
        classify_remote("p", config_with(max_retries=2), httpx.MockTransport(handler))
    assert len(calls) == 3  # initial attempt + 2 retries


def test_connection_error_retried_then_raises():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        raise httpx.ConnectError("refused")

    with pytest.raises(TransportError):
        classify_remote("p", config_with(max_retries=1), httpx.MockTransport(handler))
    assert len(calls) == 2


def test_timeout_surfaces_as_timeout_error():
    def handler(request: httpx.Request) -> httpx.Response:
        raise httpx.ReadTimeout("too slow")

    with pytest.raises(Timeout):
        classify_remote("p", config_with(max_retries=1), httpx.MockTransport(handler))


@pytest.mark.parametrize("status", [401, 403])
def test_auth_rejection_never_retried(status):
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return httpx.Response(status)

    with pytest.raises(AuthError):
        classify_remote("p", config_with(), httpx.MockTransport(handler))
    assert len(calls) == 1


def test_unexpected_status_not_retried():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return httpx.Response(404)

    with pytest.raises(TransportError):
        classify_remote("p", config_with(), httpx.MockTransport(handler))
    assert len(calls) == 1


def test_malformed_completion_body_not_retried():
    calls = []

    def handler(request: httpx.Request) -> httpx.Response:
        calls.append(request)
        return httpx.Response(200, json={"choices": []})

    with pytest.raises(TransportError):
        classify_remote("p", config_with(), httpx.MockTransport(handler))
    assert len(calls) == 1


# ---------------------------------------------------------------------------
# adapter


def test_remote_endpoint_adapter():
    endpoint = RemoteEndpoint(
        config_with(), httpx.MockTransport(lambda r: completion_response("A\nB\n"))
    )
    assert endpoint.model == "test-model"
    exchange = endpoint.submit("prompt text")
    assert exchange.raw_response == "A\nB\n"
