"""Wiring classified threat cards into the graph.

Idempotent by construction: node ids are deterministic and duplicate
edges are no-ops, so re-upserting the same card yields a (0, 0) delta.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from ..analysis.cards import ThreatCard
from ..errors import ValidationError
from ..similarity import canonicalize
from .model import EdgeKind, GraphNode, NodeKind, node_id_for
from .store import GraphStore

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GraphDelta:
    nodes_added: int
    edges_added: int
    rejected_edges: int = 0

    def __iter__(self):
        yield self.nodes_added
        yield self.edges_added


def _ensure_node(store: GraphStore, kind: NodeKind, label: str, concept: str | None, delta: list[int]) -> str:
    node_id = node_id_for(kind, label)
    if store.add_node(GraphNode(id=node_id, kind=kind, canonical_label=label, concept=concept)):
        delta[0] += 1
    return node_id


def _ensure_edge(store: GraphStore, kind: EdgeKind, src: str, dst: str, delta: list[int]) -> None:
    try:
        if store.add_edge(kind, src, dst):
            delta[1] += 1
    except ValidationError as exc:
        log.warning("edge rejected: %s", exc)
        delta[2] += 1


def upsert_card(
    store: GraphStore,
    card: ThreatCard,
    entities: Sequence[GraphNode] = (),
    item_titles: dict[str, str] | None = None,
) -> GraphDelta:
    """Create/link the card's intelligence items, threat entity,
    taxonomy ids, CVEs, mitigations and tool chain.

    ``entities`` are already-resolved graph nodes from extraction. The
    principal threat entity is the first ThreatEntity among them, else
    one derived from the card title. Non-primary taxonomy ids hang off
    the threat entity with CHAINS_INTO when the card documents a
    parasitic chain, INSTANCES_OF otherwise. Tool nodes chain in step
    order when the extraction supplied them.
    """
    delta = [0, 0, 0]  # nodes, edges, rejected
    item_titles = item_titles or {}

    threat_entities = [e for e in entities if e.kind is NodeKind.THREAT_ENTITY]
    if threat_entities:
        principal = threat_entities[0].id
    else:
        principal = _ensure_node(store, NodeKind.THREAT_ENTITY, card.title, None, delta)

    for item_id in sorted(card.source_item_ids):
        node_id = node_id_for(NodeKind.INTELLIGENCE_ITEM, item_id)
        label = item_titles.get(item_id, item_id)
        if store.add_node(GraphNode(id=node_id, kind=NodeKind.INTELLIGENCE_ITEM, canonical_label=label)):
            delta[0] += 1
        for entity in threat_entities or [store.get_node(principal)]:
            _ensure_edge(store, EdgeKind.DESCRIBES, node_id, entity.id, delta)

    mcp_nodes: dict[str, str] = {}
    for mcp_id in card.mcp_ids:
        mcp_nodes[mcp_id] = _ensure_node(store, NodeKind.MCP_THREAT_ID, mcp_id, None, delta)

    _ensure_edge(store, EdgeKind.INSTANCES_OF, principal, mcp_nodes[card.primary_id], delta)
    secondary_kind = EdgeKind.CHAINS_INTO if card.upd_chain else EdgeKind.INSTANCES_OF
    for mcp_id in card.mcp_ids[1:]:
        _ensure_edge(store, secondary_kind, principal, mcp_nodes[mcp_id], delta)

    for cve_id in sorted(card.cve_ids):
        cve_node = _ensure_node(store, NodeKind.CVE_IDENTIFIER, cve_id, None, delta)
        _ensure_edge(store, EdgeKind.EXPLOITS, principal, cve_node, delta)

    for entity in entities:
        if entity.kind is NodeKind.MITIGATION:
            _ensure_edge(store, EdgeKind.MITIGATED_BY, principal, entity.id, delta)

    if card.upd_chain is not None:
        tools_by_name = {canonicalize(e.canonical_label): e.id for e in entities if e.kind is NodeKind.TOOL}
        step_nodes = [tools_by_name.get(canonicalize(tool)) for tool, _phase in card.upd_chain.steps]
        for src, dst in zip(step_nodes, step_nodes[1:]):
            if src is not None and dst is not None:
                _ensure_edge(store, EdgeKind.CHAINS_INTO, src, dst, delta)

    return GraphDelta(nodes_added=delta[0], edges_added=delta[1], rejected_edges=delta[2])
