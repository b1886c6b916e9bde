"""AI threat analysis: relevance gating, batched CoT classification,
output repair, chain annotation, and consistency enforcement."""

from .cards import AnalysisConfig, ChainEdge, ThreatCard, UpdChain, UpdPhase, card_id
from .classify import BatchAnalysisFailure, analyze_batch
from .consistency import enforce_consistency
from .relevance import filter_relevant, score_relevance
from .repair import RepairResult, repair_output
from .schema import MANDATORY_THREAT_FIELDS, THREAT_RECORD_FIELDS
from .upd import ChainAnnotation, annotate_upd_chain

__all__ = [
    "AnalysisConfig",
    "BatchAnalysisFailure",
    "ChainAnnotation",
    "ChainEdge",
    "MANDATORY_THREAT_FIELDS",
    "RepairResult",
    "THREAT_RECORD_FIELDS",
    "ThreatCard",
    "UpdChain",
    "UpdPhase",
    "analyze_batch",
    "annotate_upd_chain",
    "card_id",
    "enforce_consistency",
    "filter_relevant",
    "repair_output",
    "score_relevance",
]
