"""Three-tier entity resolution against the graph store.

Tier 1: case-insensitive exact match over same-kind labels/aliases.
Tier 2: maximum-Jaccard candidate at J >= 0.75 merges automatically.
Tier 3: for 0.50 <= J < 0.75 the gateway confirms or rejects the merge;
anything below 0.50, a NO, or a gateway failure yields a new entity
(no merge without confirmation).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum

from ..errors import GatewayError, ValidationError
from ..gateway import LlmGateway, Transcript
from ..similarity import jaccard_sets, shingles
from .model import GraphNode, NodeKind, node_id_for
from .store import GraphStore

log = logging.getLogger(__name__)

JACCARD_MERGE_THRESHOLD = 0.75
LLM_REVIEW_THRESHOLD = 0.50

MERGE_QUESTION = "Are '{new}' and '{existing}' the same security concept? YES or NO."
_MERGE_SYSTEM_PROMPT = (
    "You canonicalize security entity names for a threat knowledge graph. "
    "Answer with exactly YES or NO and nothing else."
)


class ResolutionDecision(str, Enum):
    EXACT_MATCH = "ExactMatch"
    JACCARD_MERGE = "JaccardMerge"
    LLM_CONFIRMED_MERGE = "LlmConfirmedMerge"
    NEW_ENTITY = "NewEntity"


@dataclass(frozen=True)
class ResolutionOutcome:
    decision: ResolutionDecision
    node_id: str
    matched_node: str | None = None
    similarity: float | None = None
    degraded: bool = False


def _best_candidate(store: GraphStore, kind: NodeKind, label: str) -> tuple[GraphNode | None, float]:
    """Maximum-J same-kind node over canonical labels and aliases; ties
    resolve to the earliest-created node (candidate order)."""
    target = shingles(label)
    best_node: GraphNode | None = None
    best_j = 0.0
    for node in store.candidates(kind):
        node_j = max((jaccard_sets(target, s) for s in store.name_shingles(node.id)), default=0.0)
        if node_j > best_j:
            best_node = node
            best_j = node_j
    return best_node, best_j


def resolve_entity(
    label: str,
    kind: NodeKind,
    store: GraphStore,
    gateway: LlmGateway | None = None,
    transcript: Transcript | None = None,
    concept: str | None = None,
) -> ResolutionOutcome:
    """Resolve ``label`` to an existing same-kind node or create one.

    Merges add the incoming label as an alias of the matched node.
    Resolution is same-kind only; identical labels of different kinds
    stay distinct nodes.
    """
    if not label or not label.strip():
        raise ValidationError("entity label must be non-empty")
    label = label.strip()

    exact = store.find_exact(kind, label)
    if exact is not None:
        return ResolutionOutcome(decision=ResolutionDecision.EXACT_MATCH, node_id=exact.id, matched_node=exact.id, similarity=1.0)

    candidate, similarity = _best_candidate(store, kind, label)

    if candidate is not None and similarity >= JACCARD_MERGE_THRESHOLD:
        store.add_alias(candidate.id, label)
        return ResolutionOutcome(
            decision=ResolutionDecision.JACCARD_MERGE,
            node_id=candidate.id,
            matched_node=candidate.id,
            similarity=similarity,
        )

    if candidate is not None and LLM_REVIEW_THRESHOLD <= similarity < JACCARD_MERGE_THRESHOLD:
        degraded = False
        answer = ""
        if gateway is None or transcript is None:
            degraded = True
        else:
            question = MERGE_QUESTION.format(new=label, existing=candidate.canonical_label)
            try:
                req = gateway.request(_MERGE_SYSTEM_PROMPT, question, max_output_tokens=8)
                answer = gateway.complete(req, transcript).strip().upper()
            except GatewayError as exc:
                log.warning("tier-3 verification failed for %r: %s", label, exc)
                degraded = True
        if answer.startswith("YES"):
            store.add_alias(candidate.id, label)
            return ResolutionOutcome(
                decision=ResolutionDecision.LLM_CONFIRMED_MERGE,
                node_id=candidate.id,
                matched_node=candidate.id,
                similarity=similarity,
            )
        if not degraded and not answer.startswith("NO"):
            log.warning("tier-3 verification reply %r unusable for %r; keeping entities distinct", answer, label)
            degraded = True
        node = _create(store, kind, label, concept)
        return ResolutionOutcome(
            decision=ResolutionDecision.NEW_ENTITY, node_id=node.id, similarity=similarity, degraded=degraded
        )

    node = _create(store, kind, label, concept)
    return ResolutionOutcome(decision=ResolutionDecision.NEW_ENTITY, node_id=node.id, similarity=similarity or None)


def _create(store: GraphStore, kind: NodeKind, label: str, concept: str | None) -> GraphNode:
    node = GraphNode(id=node_id_for(kind, label), kind=kind, canonical_label=label, concept=concept)
    store.add_node(node)
    return node
