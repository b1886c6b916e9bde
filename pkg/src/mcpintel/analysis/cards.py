"""Classified threat cards and the parasitic tool-chain annotation."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from enum import Enum

from ..errors import ValidationError
from ..scoring import RiskFactors, ScoredRisk, RiskLevel
from ..taxonomy import StrideCategory, WorkflowPhase


class UpdPhase(str, Enum):
    PARASITIC_INGESTION = "ParasiticIngestion"
    PRIVACY_COLLECTION = "PrivacyCollection"
    PRIVACY_DISCLOSURE = "PrivacyDisclosure"


class ChainEdge(str, Enum):
    T2T = "T2T"
    UPD = "UPD"


@dataclass(frozen=True)
class UpdChain:
    """Multi-tool attack decomposition: ordered tool steps with phases,
    and transition labels where a UPD edge may only be terminal."""

    steps: tuple[tuple[str, UpdPhase], ...]
    edges: tuple[ChainEdge, ...]

    def validate(self) -> "UpdChain":
        if len(self.edges) != max(len(self.steps) - 1, 0):
            raise ValidationError(
                f"chain with {len(self.steps)} steps needs {len(self.steps) - 1} edges, got {len(self.edges)}"
            )
        for i, edge in enumerate(self.edges):
            if edge is ChainEdge.UPD and i != len(self.edges) - 1:
                raise ValidationError("a UPD edge must be the final edge of the chain")
        return self

    def to_dict(self) -> dict:
        return {
            "steps": [[tool, phase.value] for tool, phase in self.steps],
            "edges": [edge.value for edge in self.edges],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UpdChain":
        return cls(
            steps=tuple((str(tool), UpdPhase(phase)) for tool, phase in data["steps"]),
            edges=tuple(ChainEdge(e) for e in data["edges"]),
        ).validate()


@dataclass(frozen=True)
class ThreatCard:
    """One classified threat: taxonomy ids (first is primary), STRIDE,
    locally recomputed risk, bridge-derived OWASP sets, optional UPD
    chain, and source linkage."""

    id: str
    title: str
    summary: str
    mcp_ids: tuple[str, ...]
    workflow_phase: WorkflowPhase
    stride: StrideCategory
    factors: RiskFactors
    scored: ScoredRisk
    owasp_llm: frozenset[str]
    owasp_agentic: frozenset[str]
    upd_chain: UpdChain | None = None
    source_item_ids: frozenset[str] = frozenset()
    cve_ids: frozenset[str] = frozenset()
    rce_or_exfil_or_critical_asset: bool = False
    audit_notes: tuple[str, ...] = ()
    degraded: bool = False

    @property
    def primary_id(self) -> str:
        return self.mcp_ids[0]

    def with_note(self, note: str) -> "ThreatCard":
        return replace(self, audit_notes=self.audit_notes + (note,))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "summary": self.summary,
            "mcp_ids": list(self.mcp_ids),
            "workflow_phase": self.workflow_phase.value,
            "stride": self.stride.value,
            "factors": {"L": self.factors.L, "S": self.factors.S, "I": self.factors.I, "D": self.factors.D},
            "scored": self.scored.to_dict(),
            "owasp_llm": sorted(self.owasp_llm),
            "owasp_agentic": sorted(self.owasp_agentic),
            "upd_chain": self.upd_chain.to_dict() if self.upd_chain else None,
            "source_item_ids": sorted(self.source_item_ids),
            "cve_ids": sorted(self.cve_ids),
            "rce_or_exfil_or_critical_asset": self.rce_or_exfil_or_critical_asset,
            "audit_notes": list(self.audit_notes),
            "degraded": self.degraded,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ThreatCard":
        scored = data["scored"]
        return cls(
            id=data["id"],
            title=data["title"],
            summary=data["summary"],
            mcp_ids=tuple(data["mcp_ids"]),
            workflow_phase=WorkflowPhase(data["workflow_phase"]),
            stride=StrideCategory(data["stride"]),
            factors=RiskFactors(**data["factors"]),
            scored=ScoredRisk(
                base=scored["base"],
                multiplier=scored["multiplier"],
                final=scored["final"],
                level=RiskLevel(scored["level"]),
            ),
            owasp_llm=frozenset(data["owasp_llm"]),
            owasp_agentic=frozenset(data["owasp_agentic"]),
            upd_chain=UpdChain.from_dict(data["upd_chain"]) if data.get("upd_chain") else None,
            source_item_ids=frozenset(data.get("source_item_ids", [])),
            cve_ids=frozenset(data.get("cve_ids", [])),
            rce_or_exfil_or_critical_asset=bool(data.get("rce_or_exfil_or_critical_asset", False)),
            audit_notes=tuple(data.get("audit_notes", [])),
            degraded=bool(data.get("degraded", False)),
        )


def card_id(title: str, mcp_ids: tuple[str, ...], source_item_ids: frozenset[str]) -> str:
    """Deterministic card identifier; identical classifications of the
    same sources collapse to the same card."""
    material = "\x1f".join([title, "|".join(mcp_ids), "|".join(sorted(source_item_ids))])
    return "card-" + hashlib.sha256(material.encode("utf-8")).hexdigest()[:16]


@dataclass(frozen=True)
class AnalysisConfig:
    """Relevance threshold and batch sizing for the analysis stage."""

    relevance_threshold: float = 0.70
    batch_size: int = 5
    relevance_max_tokens: int = 256

    def validate(self) -> "AnalysisConfig":
        if not 0.0 <= self.relevance_threshold <= 1.0:
            raise ValidationError(f"relevance threshold must lie in [0, 1], got {self.relevance_threshold}")
        if not 3 <= self.batch_size <= 5:
            raise ValidationError(f"batch size must lie in [3, 5], got {self.batch_size}")
        return self
