"""Risk plan generation: batched drafting, Jaccard-merge aggregation,
and a conservation-checked refinement pass."""

from __future__ import annotations

import json
import logging
import uuid
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum

from .analysis.cards import ThreatCard
from .analysis.repair import repair_output
from .errors import GatewayError, ValidationError
from .gateway import LlmGateway, Transcript
from .prompts import load_prompt
from .similarity import jaccard

log = logging.getLogger(__name__)

# Same merge threshold as entity resolution; one magic number, not two.
MITIGATION_MERGE_THRESHOLD = 0.75

_PLAN_RECORD_FIELDS = ("threat_card_id", "detection_methods", "mitigations")


class Priority(str, Enum):
    P0 = "P0"
    P1 = "P1"
    P2 = "P2"

    @property
    def rank(self) -> int:
        return {"P0": 0, "P1": 1, "P2": 2}[self.value]


class Effort(str, Enum):
    LOW = "Low"
    MEDIUM = "Medium"
    HIGH = "High"


@dataclass(frozen=True)
class Mitigation:
    text: str
    priority: Priority
    effort: Effort

    def to_dict(self) -> dict:
        return {"text": self.text, "priority": self.priority.value, "effort": self.effort.value}


@dataclass(frozen=True)
class PlanEntry:
    threat_card_id: str
    final_score: float
    detection_methods: tuple[str, ...]
    mitigations: tuple[Mitigation, ...]
    framework_refs: tuple[str, ...]
    unavailable: bool = False

    def to_dict(self) -> dict:
        return {
            "threat_card_id": self.threat_card_id,
            "final_score": self.final_score,
            "detection_methods": list(self.detection_methods),
            "mitigations": [m.to_dict() for m in self.mitigations],
            "framework_refs": list(self.framework_refs),
            "unavailable": self.unavailable,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlanEntry":
        return cls(
            threat_card_id=data["threat_card_id"],
            final_score=data["final_score"],
            detection_methods=tuple(data.get("detection_methods", [])),
            mitigations=tuple(
                Mitigation(text=m["text"], priority=Priority(m["priority"]), effort=Effort(m["effort"]))
                for m in data.get("mitigations", [])
            ),
            framework_refs=tuple(data.get("framework_refs", [])),
            unavailable=bool(data.get("unavailable", False)),
        )


@dataclass(frozen=True)
class RiskPlan:
    id: str
    entries: tuple[PlanEntry, ...]
    degraded: bool = False
    created_at: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "entries": [e.to_dict() for e in self.entries],
            "degraded": self.degraded,
            "created_at": self.created_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RiskPlan":
        return cls(
            id=data["id"],
            entries=tuple(PlanEntry.from_dict(e) for e in data["entries"]),
            degraded=bool(data.get("degraded", False)),
            created_at=data.get("created_at", ""),
        )


def _framework_refs(card: ThreatCard) -> tuple[str, ...]:
    return tuple([*card.mcp_ids, *sorted(card.owasp_llm), *sorted(card.owasp_agentic), card.stride.value])


def _placeholder_entry(card: ThreatCard) -> PlanEntry:
    return PlanEntry(
        threat_card_id=card.id,
        final_score=card.scored.final,
        detection_methods=("plan unavailable",),
        mitigations=(),
        framework_refs=_framework_refs(card),
        unavailable=True,
    )


def _parse_mitigations(raw) -> tuple[Mitigation, ...]:
    mitigations = []
    for m in raw or []:
        if not isinstance(m, dict):
            continue
        text = str(m.get("text", "")).strip()
        try:
            priority = Priority(m.get("priority"))
        except ValueError:
            log.warning("mitigation %r dropped: missing or invalid priority", text[:60])
            continue
        try:
            effort = Effort(m.get("effort"))
        except ValueError:
            effort = Effort.MEDIUM
        if text:
            mitigations.append(Mitigation(text=text, priority=priority, effort=effort))
    return tuple(mitigations)


def _cards_prompt(cards: list[ThreatCard]) -> str:
    blocks = []
    for card in cards:
        blocks.append(
            f"Card {card.id}\nTitle: {card.title}\nRisk: {card.scored.level.value} ({card.scored.final:.1f})\n"
            f"Taxonomy: {', '.join(card.mcp_ids)}\nSTRIDE: {card.stride.value}\nSummary: {card.summary}"
        )
    return "\n\n".join(blocks)


def plan_batch(
    cards: list[ThreatCard],
    gateway: LlmGateway,
    transcript: Transcript,
    max_output_tokens: int = 4000,
) -> list[PlanEntry]:
    """Draft one plan entry per card. An unrecoverable reply is retried
    once; cards still unplanned get placeholder entries flagged
    unavailable."""
    if not cards:
        raise ValidationError("plan_batch requires a non-empty batch")

    by_id = {card.id: card for card in cards}
    records: list[dict] = []
    for attempt in (1, 2):
        try:
            req = gateway.request(load_prompt("plan_batch_v1"), _cards_prompt(cards), max_output_tokens=max_output_tokens)
            raw = gateway.complete(req, transcript)
        except GatewayError as exc:
            log.warning("plan batch call failed (attempt %d): %s", attempt, exc)
            continue
        records = repair_output(raw, mandatory_fields=_PLAN_RECORD_FIELDS).records
        records = [r for r in records if r.get("threat_card_id") in by_id]
        if records:
            break
        log.warning("plan batch attempt %d recovered no usable records", attempt)

    entries: dict[str, PlanEntry] = {}
    for rec in records:
        card = by_id[rec["threat_card_id"]]
        detections = tuple(str(d).strip() for d in rec.get("detection_methods", []) if str(d).strip())
        entries[card.id] = PlanEntry(
            threat_card_id=card.id,
            final_score=card.scored.final,
            detection_methods=detections,
            mitigations=_parse_mitigations(rec.get("mitigations")),
            framework_refs=_framework_refs(card),
        )

    result = []
    for card in cards:
        entry = entries.get(card.id)
        if entry is None:
            log.warning("card %s has no usable plan record; placeholder emitted", card.id)
            entry = _placeholder_entry(card)
        result.append(entry)
    return result


def _merge_mitigations(mitigations: tuple[Mitigation, ...]) -> tuple[Mitigation, ...]:
    """Collapse near-duplicate mitigation texts (J >= threshold): the
    first occurrence's text survives, the highest priority wins."""
    kept: list[Mitigation] = []
    for mit in mitigations:
        merged = False
        for i, existing in enumerate(kept):
            if jaccard(mit.text, existing.text) >= MITIGATION_MERGE_THRESHOLD:
                if mit.priority.rank < existing.priority.rank:
                    kept[i] = replace(existing, priority=mit.priority)
                merged = True
                break
        if not merged:
            kept.append(mit)
    return tuple(kept)


def aggregate(partials: list[list[PlanEntry]]) -> list[PlanEntry]:
    """Merge per-batch entries: same-card entries combine, duplicate
    mitigations collapse, and the global ordering is re-derived by
    descending final score (ties by card id)."""
    by_card: dict[str, PlanEntry] = {}
    for batch in partials:
        for entry in batch:
            existing = by_card.get(entry.threat_card_id)
            if existing is None:
                by_card[entry.threat_card_id] = entry
            else:
                by_card[entry.threat_card_id] = replace(
                    existing,
                    detection_methods=existing.detection_methods + entry.detection_methods,
                    mitigations=existing.mitigations + entry.mitigations,
                    unavailable=existing.unavailable and entry.unavailable,
                )

    merged = []
    for entry in by_card.values():
        seen: set[str] = set()
        detections = tuple(d for d in entry.detection_methods if not (d in seen or seen.add(d)))
        merged.append(replace(entry, detection_methods=detections, mitigations=_merge_mitigations(entry.mitigations)))

    merged.sort(key=lambda e: (-e.final_score, e.threat_card_id))
    return merged


def _conserves(before: list[PlanEntry], after: list[PlanEntry]) -> bool:
    if [e.threat_card_id for e in before] != [e.threat_card_id for e in after]:
        return False
    for b, a in zip(before, after):
        if len(b.detection_methods) != len(a.detection_methods):
            return False
        if [(m.priority, m.effort) for m in b.mitigations] != [(m.priority, m.effort) for m in a.mitigations]:
            return False
    return True


def refine(
    merged: list[PlanEntry],
    gateway: LlmGateway,
    transcript: Transcript,
    max_output_tokens: int = 6000,
) -> RiskPlan:
    """Final pass: the model may rewrite prose but must not add, drop or
    reorder anything. Violations revert to the pre-refinement content
    with the degraded flag; so does a gateway failure."""
    plan_id = "plan-" + uuid.uuid4().hex[:12]
    created = datetime.now(timezone.utc).isoformat()

    def plan(entries: list[PlanEntry], degraded: bool) -> RiskPlan:
        return RiskPlan(id=plan_id, entries=tuple(entries), degraded=degraded, created_at=created)

    payload = [
        {
            "threat_card_id": e.threat_card_id,
            "detection_methods": list(e.detection_methods),
            "mitigations": [m.to_dict() for m in e.mitigations],
        }
        for e in merged
    ]
    try:
        req = gateway.request(load_prompt("plan_refine_v1"), json.dumps(payload, indent=1), max_output_tokens=max_output_tokens)
        raw = gateway.complete(req, transcript)
    except GatewayError as exc:
        log.warning("refinement call failed; returning unrefined plan: %s", exc)
        return plan(merged, degraded=True)

    records = repair_output(raw, mandatory_fields=_PLAN_RECORD_FIELDS).records
    refined: list[PlanEntry] = []
    by_id = {e.threat_card_id: e for e in merged}
    for rec in records:
        base = by_id.get(rec.get("threat_card_id"))
        if base is None:
            continue
        refined.append(
            replace(
                base,
                detection_methods=tuple(str(d) for d in rec.get("detection_methods", [])),
                mitigations=_parse_mitigations(rec.get("mitigations")),
            )
        )

    if not _conserves(merged, refined):
        log.warning("refinement violated conservation; reverting to pre-refinement plan")
        return plan(merged, degraded=True)
    return plan(refined, degraded=False)
