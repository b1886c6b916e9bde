"""Taxonomy-seeded search query generation and iterative relaxation."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from ..errors import GatewayError
from ..gateway import LlmGateway, Transcript
from ..prompts import load_prompt
from ..taxonomy import AttackSurface, TaxonomyRegistry
from ..analysis.repair import repair_output

log = logging.getLogger(__name__)

# Qualifier words whose trailing phrase is dropped first when relaxing.
_QUALIFIER_WORDS = {"in", "for", "on", "against", "via", "with", "using"}


class Specificity(str, Enum):
    BROAD = "Broad"
    NARROW = "Narrow"


@dataclass(frozen=True)
class SearchQuery:
    text: str
    specificity: Specificity
    seed_ids: frozenset[str] = frozenset()
    relaxation_round: int = 0


@dataclass(frozen=True)
class KeywordGeneration:
    queries: tuple[SearchQuery, ...]
    degraded: bool = False


def template_queries(registry: TaxonomyRegistry) -> list[SearchQuery]:
    """Deterministic fallback: one broad query per attack surface plus
    one narrow query per taxonomy entry, built from entry names."""
    queries: list[SearchQuery] = []
    for surface in AttackSurface:
        surface_ids = frozenset(p.id for p in registry.entries.values() if p.attack_surface is surface)
        if not surface_ids:
            continue
        phrase = {
            AttackSurface.SERVER_APIS: "server API vulnerabilities",
            AttackSurface.TOOL_METADATA: "tool metadata poisoning",
            AttackSurface.RUNTIME_FLOW: "prompt injection agent attacks",
            AttackSurface.TRANSPORT: "transport layer attacks",
        }[surface]
        queries.append(SearchQuery(text=f"MCP security {phrase}", specificity=Specificity.BROAD, seed_ids=surface_ids))
    for pattern_id in registry.ids():
        pattern = registry.get(pattern_id)
        queries.append(
            SearchQuery(
                text=f"MCP {pattern.name} vulnerability",
                specificity=Specificity.NARROW,
                seed_ids=frozenset({pattern.id}),
            )
        )
    return queries


def _seed_prompt(registry: TaxonomyRegistry) -> str:
    lines = []
    for surface in AttackSurface:
        names = [f"{p.id} {p.name}" for p in registry.entries.values() if p.attack_surface is surface]
        if names:
            lines.append(f"{surface.value}:")
            lines.extend(f"  - {name}" for name in sorted(names))
    return "Threat patterns by attack surface:\n" + "\n".join(lines)


def generate_keywords(
    registry: TaxonomyRegistry,
    gateway: LlmGateway,
    transcript: Transcript,
    max_output_tokens: int = 2000,
) -> KeywordGeneration:
    """Model-driven query generation with a deterministic template
    fallback (degraded flag set) when the gateway fails or returns
    nothing usable. Guarantees at least one broad query per populated
    attack surface."""
    if not registry.entries:
        return KeywordGeneration(queries=())

    try:
        req = gateway.request(load_prompt("keywords_v1"), _seed_prompt(registry), max_output_tokens=max_output_tokens)
        raw = gateway.complete(req, transcript)
        records = repair_output(raw, mandatory_fields=("text", "specificity")).records
    except GatewayError as exc:
        log.warning("keyword generation degraded to templates: %s", exc)
        return KeywordGeneration(queries=tuple(template_queries(registry)), degraded=True)

    queries: list[SearchQuery] = []
    for rec in records:
        try:
            spec = Specificity(rec["specificity"])
        except ValueError:
            continue
        text = str(rec.get("text", "")).strip()
        if not text:
            continue
        seeds = frozenset(s for s in rec.get("seed_ids", []) if s in registry)
        queries.append(SearchQuery(text=text, specificity=spec, seed_ids=seeds))

    if not queries:
        log.warning("keyword generation returned no usable queries; falling back to templates")
        return KeywordGeneration(queries=tuple(template_queries(registry)), degraded=True)

    # Supplement any attack surface the model left without a broad query.
    covered = {
        registry.get(sid).attack_surface
        for q in queries
        if q.specificity is Specificity.BROAD
        for sid in q.seed_ids
    }
    for tq in template_queries(registry):
        if tq.specificity is Specificity.BROAD:
            surface = registry.get(next(iter(tq.seed_ids))).attack_surface
            if surface not in covered:
                queries.append(tq)
    return KeywordGeneration(queries=tuple(queries))


def relax_query(query: SearchQuery, max_relaxation_rounds: int = 3) -> SearchQuery | None:
    """Broaden a query that returned too few results by dropping its
    most specific token group (the trailing qualifier phrase when one
    exists, else the last token). Returns None as the terminal signal:
    rounds exhausted or nothing left to drop."""
    if query.relaxation_round >= max_relaxation_rounds:
        log.info("query %r abandoned: relaxation rounds exhausted", query.text)
        return None
    tokens = query.text.split()
    if len(tokens) <= 1:
        log.info("query %r abandoned: nothing to drop", query.text)
        return None

    qualifier_positions = [i for i, tok in enumerate(tokens) if tok.lower() in _QUALIFIER_WORDS]
    if qualifier_positions and qualifier_positions[-1] > 0:
        kept = tokens[: qualifier_positions[-1]]
    else:
        kept = tokens[:-1]
    if not kept:
        return None

    return SearchQuery(
        text=" ".join(kept),
        specificity=Specificity.BROAD,
        seed_ids=query.seed_ids,
        relaxation_round=query.relaxation_round + 1,
    )
