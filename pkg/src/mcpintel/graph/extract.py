"""Entity extraction: deterministic pattern rules for enumerable
identifiers, model extraction for semantic entities."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..errors import GatewayError
from ..gateway import LlmGateway, Transcript
from ..prompts import load_prompt
from ..analysis.repair import repair_output
from .model import NodeKind

log = logging.getLogger(__name__)

_CVE_RE = re.compile(r"\bCVE-\d{4}-\d{4,}\b", re.IGNORECASE)
_CWE_RE = re.compile(r"\bCWE-\d+\b", re.IGNORECASE)

# Technique keywords matched deterministically; editable per deployment.
DEFAULT_TECHNIQUE_KEYWORDS = (
    "prompt injection",
    "tool poisoning",
    "tool description poisoning",
    "rug pull",
    "data exfiltration",
    "command injection",
    "sandbox escape",
    "dns rebinding",
    "supply chain attack",
    "privilege escalation",
)

# Extraction concept kinds beyond the six node kinds fold into
# ThreatEntity, tagged with their concept.
_CONCEPT_TO_KIND = {
    "threat": NodeKind.THREAT_ENTITY,
    "mitigation": NodeKind.MITIGATION,
    "tool": NodeKind.TOOL,
    "component": NodeKind.THREAT_ENTITY,
    "technique": NodeKind.THREAT_ENTITY,
    "asset": NodeKind.THREAT_ENTITY,
    "vulnerability": NodeKind.THREAT_ENTITY,
}


@dataclass(frozen=True)
class Extraction:
    label: str
    kind: NodeKind
    concept: str | None = None
    offset: int | None = None  # byte offset into the source text


@dataclass(frozen=True)
class ExtractionResult:
    entities: tuple[Extraction, ...]
    degraded: bool = False


def _byte_offset(text: str, char_index: int) -> int:
    return len(text[:char_index].encode("utf-8"))


def rule_extract(text: str, technique_keywords: tuple[str, ...] = DEFAULT_TECHNIQUE_KEYWORDS) -> list[Extraction]:
    """Deterministic extraction of CVE ids, CWE numbers and configured
    technique keywords, with in-document dedup (first offset kept)."""
    found: list[Extraction] = []
    seen: set[tuple[str, NodeKind]] = set()

    def add(label: str, kind: NodeKind, concept: str | None, start: int):
        key = (label.casefold(), kind)
        if key in seen:
            return
        seen.add(key)
        found.append(Extraction(label=label, kind=kind, concept=concept, offset=_byte_offset(text, start)))

    for match in _CVE_RE.finditer(text):
        add(match.group(0).upper(), NodeKind.CVE_IDENTIFIER, None, match.start())
    for match in _CWE_RE.finditer(text):
        add(match.group(0).upper(), NodeKind.THREAT_ENTITY, "weakness", match.start())
    for keyword in technique_keywords:
        pattern = re.compile(r"\b" + re.escape(keyword) + r"\b", re.IGNORECASE)
        match = pattern.search(text)
        if match:
            add(keyword, NodeKind.THREAT_ENTITY, "technique", match.start())

    found.sort(key=lambda e: e.offset or 0)
    return found


def llm_extract(text: str, gateway: LlmGateway, transcript: Transcript, max_output_tokens: int = 1000) -> ExtractionResult:
    """Model extraction of semantic entities (threats, mitigations,
    tools and supporting concepts); blank labels dropped; unrecoverable
    output yields an empty result with the degraded flag."""
    if not text.strip():
        return ExtractionResult(entities=())
    try:
        req = gateway.request(load_prompt("entity_extract_v1"), text, max_output_tokens=max_output_tokens)
        raw = gateway.complete(req, transcript)
    except GatewayError as exc:
        log.warning("entity extraction call failed: %s", exc)
        return ExtractionResult(entities=(), degraded=True)

    result = repair_output(raw, mandatory_fields=("label", "kind"))
    entities: list[Extraction] = []
    seen: set[tuple[str, NodeKind]] = set()
    for rec in result.records:
        label = str(rec.get("label", "")).strip()
        concept = str(rec.get("kind", "")).strip().lower()
        kind = _CONCEPT_TO_KIND.get(concept)
        if not label or kind is None:
            continue
        key = (label.casefold(), kind)
        if key in seen:
            continue
        seen.add(key)
        entities.append(Extraction(label=label, kind=kind, concept=concept))

    # Stage-3 fallthrough with nothing recovered means the reply was
    # unusable, not that the text had no entities.
    if not result.records and result.stage == 3:
        return ExtractionResult(entities=(), degraded=True)
    return ExtractionResult(entities=tuple(entities))
