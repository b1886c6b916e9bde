"""Parasitic tool-chain annotation of classified threat cards."""

from __future__ import annotations

import logging
from dataclasses import dataclass

from ..errors import GatewayError, ValidationError
from ..gateway import LlmGateway, Transcript
from ..prompts import load_prompt
from .cards import ChainEdge, ThreatCard, UpdChain, UpdPhase
from .repair import repair_output

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainAnnotation:
    chain: UpdChain | None
    degraded: bool = False


def annotate_upd_chain(
    card: ThreatCard,
    gateway: LlmGateway,
    transcript: Transcript,
    max_output_tokens: int = 512,
) -> ChainAnnotation:
    """Ask the model to decompose multi-tool attacks into chain steps.

    Single-tool threats yield no chain; malformed replies (including
    chains violating the UPD-terminal invariant) yield no chain with
    the degraded flag set.
    """
    user_prompt = (
        f"Threat: {card.title}\nTaxonomy ids: {', '.join(card.mcp_ids)}\n\nSummary:\n{card.summary}"
    )
    req = gateway.request(load_prompt("upd_chain_v1"), user_prompt, max_output_tokens=max_output_tokens)
    try:
        raw = gateway.complete(req, transcript)
    except GatewayError as exc:
        log.warning("chain annotation call failed for %s: %s", card.id, exc)
        return ChainAnnotation(chain=None, degraded=True)

    stripped = raw.strip()
    if stripped.lower() in ("null", "none", ""):
        return ChainAnnotation(chain=None)

    records = repair_output(stripped, mandatory_fields=("steps", "edges")).records
    if not records:
        log.warning("chain annotation for %s unrecoverable: %r", card.id, stripped[:80])
        return ChainAnnotation(chain=None, degraded=True)

    try:
        rec = records[0]
        steps = tuple((str(tool), UpdPhase(phase)) for tool, phase in rec["steps"])
        edges = tuple(ChainEdge(e) for e in rec["edges"])
        chain = UpdChain(steps=steps, edges=edges).validate()
    except (KeyError, TypeError, ValueError) as exc:
        log.warning("chain annotation for %s malformed: %s", card.id, exc)
        return ChainAnnotation(chain=None, degraded=True)
    except ValidationError as exc:
        log.warning("chain annotation for %s violates chain invariants: %s", card.id, exc)
        return ChainAnnotation(chain=None, degraded=True)

    if len(chain.steps) < 2:
        return ChainAnnotation(chain=None)
    return ChainAnnotation(chain=chain)
