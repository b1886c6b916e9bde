"""Typed property-graph elements: six node kinds, five edge kinds, and
the endpoint-kind constraints every stored edge must satisfy."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from enum import Enum

from ..errors import ValidationError
from ..similarity import canonicalize


class NodeKind(str, Enum):
    INTELLIGENCE_ITEM = "IntelligenceItem"
    THREAT_ENTITY = "ThreatEntity"
    MCP_THREAT_ID = "McpThreatId"
    CVE_IDENTIFIER = "CveIdentifier"
    TOOL = "Tool"
    MITIGATION = "Mitigation"


class EdgeKind(str, Enum):
    DESCRIBES = "DESCRIBES"
    INSTANCES_OF = "INSTANCES_OF"
    EXPLOITS = "EXPLOITS"
    CHAINS_INTO = "CHAINS_INTO"
    MITIGATED_BY = "MITIGATED_BY"


# Allowed (source kinds, destination kinds) per edge kind.
EDGE_CONSTRAINTS: dict[EdgeKind, tuple[frozenset[NodeKind], frozenset[NodeKind]]] = {
    EdgeKind.DESCRIBES: (
        frozenset({NodeKind.INTELLIGENCE_ITEM}),
        frozenset({NodeKind.THREAT_ENTITY}),
    ),
    EdgeKind.INSTANCES_OF: (
        frozenset({NodeKind.THREAT_ENTITY}),
        frozenset({NodeKind.MCP_THREAT_ID}),
    ),
    EdgeKind.EXPLOITS: (
        frozenset({NodeKind.THREAT_ENTITY, NodeKind.TOOL}),
        frozenset({NodeKind.CVE_IDENTIFIER}),
    ),
    EdgeKind.CHAINS_INTO: (
        frozenset({NodeKind.TOOL, NodeKind.THREAT_ENTITY}),
        frozenset({NodeKind.TOOL, NodeKind.MCP_THREAT_ID}),
    ),
    EdgeKind.MITIGATED_BY: (
        frozenset(NodeKind),
        frozenset({NodeKind.MITIGATION}),
    ),
}


@dataclass
class GraphNode:
    id: str
    kind: NodeKind
    canonical_label: str
    aliases: set[str] = field(default_factory=set)
    concept: str | None = None

    def validate(self) -> "GraphNode":
        if not self.canonical_label:
            raise ValidationError(f"node {self.id}: canonical label must be non-empty")
        self.aliases.discard(self.canonical_label)
        return self

    def names(self) -> list[str]:
        return [self.canonical_label, *sorted(self.aliases)]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.value,
            "canonical_label": self.canonical_label,
            "aliases": sorted(self.aliases),
            "concept": self.concept,
        }


@dataclass(frozen=True)
class GraphEdge:
    kind: EdgeKind
    src: str
    dst: str

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "src": self.src, "dst": self.dst}


def check_edge_kinds(kind: EdgeKind, src_kind: NodeKind, dst_kind: NodeKind) -> None:
    allowed_src, allowed_dst = EDGE_CONSTRAINTS[kind]
    if src_kind not in allowed_src or dst_kind not in allowed_dst:
        raise ValidationError(
            f"edge {kind.value} does not allow {src_kind.value} -> {dst_kind.value}"
        )


_ID_PREFIX = {
    NodeKind.INTELLIGENCE_ITEM: "item",
    NodeKind.THREAT_ENTITY: "threat",
    NodeKind.MCP_THREAT_ID: "mcp",
    NodeKind.CVE_IDENTIFIER: "cve",
    NodeKind.TOOL: "tool",
    NodeKind.MITIGATION: "mit",
}


def node_id_for(kind: NodeKind, label: str) -> str:
    """Deterministic node id from kind and canonicalized label, so
    repeated upserts address the same node."""
    canon = canonicalize(label)
    if kind in (NodeKind.MCP_THREAT_ID, NodeKind.CVE_IDENTIFIER, NodeKind.INTELLIGENCE_ITEM):
        return f"{_ID_PREFIX[kind]}:{label}"
    digest = hashlib.sha256(canon.encode("utf-8")).hexdigest()[:12]
    return f"{_ID_PREFIX[kind]}:{digest}"
