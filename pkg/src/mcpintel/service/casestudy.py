"""Hermetic end-to-end replay of the GitHub MCP prompt-injection
incident over packaged fixtures and recorded transcripts.

Runs the full pipeline twice: the first run must reproduce the
documented trace (relevance, classification, chain, graph delta), the
second must add nothing to the graph. No network access occurs.
"""

from __future__ import annotations

import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path

from ..analysis.cards import ChainEdge
from .config import PlatformConfig
from .runs import PipelineContext, RunKind, RunRecord, run_pipeline

CASE_STUDY_QUERY = "GitHub MCP prompt injection private repository"

EXPECTED_RELEVANCE = 0.94
RELEVANCE_THRESHOLD = 0.70
EXPECTED_MCP_IDS = ("MCP-20", "MCP-24")
EXPECTED_STRIDE = "InformationDisclosure"
EXPECTED_OWASP_LLM = frozenset({"LLM01", "LLM02"})
EXPECTED_OWASP_AGENTIC = frozenset({"ASI01", "ASI02"})
EXPECTED_CHAIN_EDGES = (ChainEdge.T2T, ChainEdge.UPD)
EXPECTED_GRAPH_DELTA = (4, 3)


def fixture_dir() -> Path:
    return Path(__file__).parent.parent / "data" / "fixtures" / "case_study"


def case_study_config(data_dir: Path) -> PlatformConfig:
    fixtures = fixture_dir()
    return PlatformConfig(
        data_dir=data_dir,
        model_id="fixture-model",
        fixed_queries=(CASE_STUDY_QUERY,),
        fixtures={"websearch": str(fixtures / "search.html")},
        transcript_path=fixtures / "transcripts.jsonl",
        transcript_mode="replay",
    ).validate()


def _make_sources_hermetic(config: PlatformConfig) -> None:
    config.sources = replace(
        config.sources,
        rss_feeds=(),
        nvd_enabled=False,
        github_advisories_enabled=False,
        web_search_enabled=True,
        min_results_threshold=1,
    )


@dataclass
class Check:
    name: str
    expected: object
    actual: object

    @property
    def passed(self) -> bool:
        return self.expected == self.actual


@dataclass
class CaseStudyReport:
    first_run: RunRecord
    second_run: RunRecord
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


def replay_case_study(data_dir: str | Path | None = None) -> CaseStudyReport:
    if data_dir is None:
        data_dir = Path(tempfile.mkdtemp(prefix="mcpintel-case-study-"))
    data_dir = Path(data_dir)

    config = case_study_config(data_dir)
    _make_sources_hermetic(config)

    ctx = PipelineContext.from_config(config)
    first = run_pipeline(RunKind.FULL, ctx)

    # Fresh context: the transcript cursor rewinds, storage and graph
    # reload from disk. The second run must be a graph no-op.
    ctx2 = PipelineContext.from_config(config)
    second = run_pipeline(RunKind.FULL, ctx2)

    report = CaseStudyReport(first_run=first, second_run=second)
    checks = report.checks

    items = ctx2.storage.list_items()
    cards = ctx2.storage.list_cards()
    checks.append(Check("items collected", 1, first.counts.get("items_collected")))
    checks.append(Check("cards produced", 1, first.counts.get("cards_produced")))
    checks.append(Check("run status", "Succeeded", first.status.value))

    relevance = items[0].relevance if items else None
    checks.append(Check("relevance score", EXPECTED_RELEVANCE, relevance))
    checks.append(
        Check(
            f"relevance strictly exceeds threshold {RELEVANCE_THRESHOLD}",
            True,
            relevance is not None and relevance > RELEVANCE_THRESHOLD,
        )
    )
    checks.append(Check("items passing filter", 1, first.counts.get("items_filtered")))

    if cards:
        card = cards[0]
        checks.append(Check("taxonomy ids", list(EXPECTED_MCP_IDS), list(card.mcp_ids)))
        checks.append(Check("STRIDE category", EXPECTED_STRIDE, card.stride.value))
        checks.append(Check("OWASP LLM bridge", sorted(EXPECTED_OWASP_LLM), sorted(card.owasp_llm)))
        checks.append(Check("OWASP Agentic bridge", sorted(EXPECTED_OWASP_AGENTIC), sorted(card.owasp_agentic)))
        chain_edges = tuple(card.upd_chain.edges) if card.upd_chain else ()
        checks.append(Check("chain edge labels", EXPECTED_CHAIN_EDGES, chain_edges))
    else:
        checks.append(Check("threat card present", True, False))

    checks.append(
        Check(
            "graph delta (nodes, edges)",
            EXPECTED_GRAPH_DELTA,
            (first.counts.get("nodes_added"), first.counts.get("edges_added")),
        )
    )
    checks.append(
        Check(
            "re-run graph delta",
            (0, 0),
            (second.counts.get("nodes_added"), second.counts.get("edges_added")),
        )
    )
    return report
