"""Neuro-symbolic knowledge graph: typed store, entity extraction,
three-tier resolution, card upserts and chain reachability."""

from .extract import DEFAULT_TECHNIQUE_KEYWORDS, Extraction, ExtractionResult, llm_extract, rule_extract
from .model import EDGE_CONSTRAINTS, EdgeKind, GraphEdge, GraphNode, NodeKind, node_id_for
from .resolution import (
    JACCARD_MERGE_THRESHOLD,
    LLM_REVIEW_THRESHOLD,
    MERGE_QUESTION,
    ResolutionDecision,
    ResolutionOutcome,
    resolve_entity,
)
from .store import GraphStore
from .upsert import GraphDelta, upsert_card

__all__ = [
    "DEFAULT_TECHNIQUE_KEYWORDS",
    "EDGE_CONSTRAINTS",
    "EdgeKind",
    "Extraction",
    "ExtractionResult",
    "GraphDelta",
    "GraphEdge",
    "GraphNode",
    "GraphStore",
    "JACCARD_MERGE_THRESHOLD",
    "LLM_REVIEW_THRESHOLD",
    "MERGE_QUESTION",
    "NodeKind",
    "ResolutionDecision",
    "ResolutionOutcome",
    "llm_extract",
    "node_id_for",
    "resolve_entity",
    "rule_extract",
    "upsert_card",
]
