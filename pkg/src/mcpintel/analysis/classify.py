"""Batched chain-of-thought classification of intelligence items into
threat cards.

Model-supplied risk scores are advisory only: factors are validated
against their domains (taxonomy baselines fill gaps) and the score is
recomputed locally; OWASP fields always come from the deterministic
bridge, never from the model.
"""

from __future__ import annotations

import logging
import re

from ..errors import McpIntelError, ValidationError
from ..gateway import DEFAULT_MAX_OUTPUT_TOKENS, LlmGateway, Transcript
from ..ingestion.items import IntelItem
from ..prompts import load_prompt
from ..scoring import RiskFactors, ScoringConfig, final_score
from ..taxonomy import StrideCategory, TaxonomyRegistry, WorkflowPhase, bridge_to_frameworks
from .cards import AnalysisConfig, ThreatCard, card_id
from .consistency import enforce_consistency
from .repair import repair_output

log = logging.getLogger(__name__)

_CVE_PATTERN = re.compile(r"^CVE-\d{4}-\d{4,}$")


class BatchAnalysisFailure(McpIntelError):
    """No recoverable records in a batch; the runner re-queues once."""


def _validated_factors(raw, fallback: RiskFactors) -> RiskFactors:
    if isinstance(raw, dict):
        try:
            return RiskFactors(
                L=int(raw["L"]), S=float(raw["S"]), I=float(raw["I"]), D=float(raw["D"])
            ).validate()
        except (KeyError, TypeError, ValueError, ValidationError):
            log.warning("model factors %r out of domain; using taxonomy baseline", raw)
    return fallback


def _card_from_record(
    record: dict,
    items: list[IntelItem],
    index: int,
    registry: TaxonomyRegistry,
    scoring_config: ScoringConfig,
) -> ThreatCard | None:
    mcp_ids = tuple(i for i in record.get("mcp_ids", []) if isinstance(i, str) and i in registry)
    if not mcp_ids:
        log.warning("record %d dropped: no valid taxonomy ids in %r", index, record.get("mcp_ids"))
        return None
    primary = registry.get(mcp_ids[0])

    try:
        phase = WorkflowPhase(record.get("workflow_phase"))
    except ValueError:
        phase = primary.workflow_phase
    try:
        stride = StrideCategory(record.get("stride"))
    except ValueError:
        stride = primary.stride_primary

    factors = _validated_factors(record.get("factors"), primary.baseline_factors)
    scored = final_score(factors, primary.flags, scoring_config)
    mapping = bridge_to_frameworks(set(mcp_ids), registry)

    # Records are emitted in input order; a truncated tail therefore
    # maps onto the leading items. Surplus records attribute to the
    # whole batch.
    if index < len(items):
        source_ids = frozenset({items[index].id})
    else:
        source_ids = frozenset(item.id for item in items)

    cve_ids = frozenset(c for c in record.get("cve_ids", []) if isinstance(c, str) and _CVE_PATTERN.match(c))
    title = str(record["title"]).strip()

    return ThreatCard(
        id=card_id(title, mcp_ids, source_ids),
        title=title,
        summary=str(record["summary"]).strip(),
        mcp_ids=mcp_ids,
        workflow_phase=phase,
        stride=stride,
        factors=factors,
        scored=scored,
        owasp_llm=mapping.owasp_llm,
        owasp_agentic=mapping.owasp_agentic,
        source_item_ids=source_ids,
        cve_ids=cve_ids,
        rce_or_exfil_or_critical_asset=bool(record.get("rce_or_exfil_or_critical_asset", False)),
    )


def _batch_prompt(items: list[IntelItem]) -> str:
    blocks = []
    for i, item in enumerate(items, start=1):
        blocks.append(
            f"Item {i} (id {item.id})\nTitle: {item.title}\nSource: {item.source_url}\n{item.content}"
        )
    return "\n\n---\n\n".join(blocks)


def analyze_batch(
    items: list[IntelItem],
    registry: TaxonomyRegistry,
    gateway: LlmGateway,
    transcript: Transcript,
    scoring_config: ScoringConfig | None = None,
    analysis_config: AnalysisConfig | None = None,
) -> list[ThreatCard]:
    """Classify one batch of relevance-filtered items into threat cards.

    Raises BatchAnalysisFailure when repair recovers zero records.
    """
    analysis_config = (analysis_config or AnalysisConfig()).validate()
    scoring_config = (scoring_config or ScoringConfig()).validate()
    if not items:
        raise ValidationError("analyze_batch requires a non-empty batch")
    if len(items) > analysis_config.batch_size:
        raise ValidationError(f"batch of {len(items)} exceeds configured batch size {analysis_config.batch_size}")
    for item in items:
        # Pipeline gate: nothing at or below the threshold may be analyzed.
        if item.relevance is None or item.relevance <= analysis_config.relevance_threshold:
            raise ValidationError(
                f"item {item.id} (relevance {item.relevance!r}) breached the relevance gate "
                f"(threshold {analysis_config.relevance_threshold})"
            )

    max_tokens = DEFAULT_MAX_OUTPUT_TOKENS
    if max_tokens < DEFAULT_MAX_OUTPUT_TOKENS:
        log.warning("classification budget %d is below %d; output may truncate", max_tokens, DEFAULT_MAX_OUTPUT_TOKENS)

    req = gateway.request(load_prompt("classify_v1"), _batch_prompt(items), max_output_tokens=max_tokens)
    raw = gateway.complete(req, transcript)
    result = repair_output(raw)
    if result.stage > 1:
        log.info("classification output required repair stage %d", result.stage)

    cards = []
    for index, record in enumerate(result.records):
        if not all(k in record for k in ("title", "summary")):
            continue
        card = _card_from_record(record, items, index, registry, scoring_config)
        if card is not None:
            cards.append(enforce_consistency(card, scoring_config))

    if not cards:
        raise BatchAnalysisFailure(
            f"no recoverable threat records for batch of {len(items)} (repair stage {result.stage})"
        )
    return cards
