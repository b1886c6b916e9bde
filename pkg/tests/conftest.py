"""Shared test fixtures: taxonomy registry, gateway stubs."""

from __future__ import annotations

import pytest

from mcpintel.gateway import CompletionRequest, LlmGateway, Transcript
from mcpintel.taxonomy import TaxonomyRegistry, load_taxonomy


@pytest.fixture(scope="session")
def registry() -> TaxonomyRegistry:
    return load_taxonomy()


class CountingTransport:
    """Scripted transport: returns canned responses in order and records
    every request, so tests can assert exact gateway call counts."""

    def __init__(self, responses: list[str] | None = None):
        self.responses = list(responses or [])
        self.calls: list[CompletionRequest] = []

    def __call__(self, req: CompletionRequest) -> str:
        self.calls.append(req)
        if not self.responses:
            raise AssertionError(f"unexpected gateway call: {req.user_prompt[:60]!r}")
        return self.responses.pop(0)

    @property
    def call_count(self) -> int:
        return len(self.calls)


@pytest.fixture
def live_transcript() -> Transcript:
    return Transcript.live()


def stub_gateway(*responses: str) -> tuple[LlmGateway, CountingTransport]:
    transport = CountingTransport(list(responses))
    return LlmGateway(model_id="test-model", transport=transport, max_retries=0), transport
