"""Relevance scoring and threshold filtering of intelligence items."""

from __future__ import annotations

import logging
import re

from ..errors import GatewayError, ValidationError
from ..gateway import LlmGateway, Transcript
from ..ingestion.items import IntelItem
from ..prompts import load_prompt

log = logging.getLogger(__name__)

_DECIMAL = re.compile(r"(?<!\d)(?:0(?:\.\d+)?|1(?:\.0+)?)(?!\d)")


def _parse_score(raw: str) -> float | None:
    match = _DECIMAL.search(raw)
    if match is None:
        return None
    value = float(match.group(0))
    return value if 0.0 <= value <= 1.0 else None


def score_relevance(
    item: IntelItem,
    gateway: LlmGateway,
    transcript: Transcript,
    max_output_tokens: int = 256,
) -> IntelItem:
    """Model-assigned relevance in [0, 1]. An unparseable reply gets one
    retry, then the conservative default 0.0 (logged as degraded)."""
    if not item.content:
        raise ValidationError(f"item {item.id} has empty content; cannot score relevance")

    system_prompt = load_prompt("relevance_v1")
    user_prompt = f"Title: {item.title}\nSource: {item.source_url}\n\n{item.content}"
    req = gateway.request(system_prompt, user_prompt, max_output_tokens=max_output_tokens)

    for attempt in (1, 2):
        try:
            raw = gateway.complete(req, transcript)
        except GatewayError as exc:
            log.warning("relevance call failed for %s: %s", item.id, exc)
            break
        score = _parse_score(raw.strip())
        if score is not None:
            return item.with_relevance(score)
        log.warning("unparseable relevance reply for %s (attempt %d): %r", item.id, attempt, raw[:80])

    log.warning("relevance degraded to 0.0 for %s", item.id)
    return item.with_relevance(0.0)


def filter_relevant(items: list[IntelItem], threshold: float) -> list[IntelItem]:
    """Items whose relevance strictly exceeds the threshold, order
    preserved. Unscored items are a pipeline bug, not a model failure."""
    for item in items:
        if item.relevance is None:
            raise ValidationError(f"item {item.id} reached the relevance filter unscored")
    return [item for item in items if item.relevance > threshold]
