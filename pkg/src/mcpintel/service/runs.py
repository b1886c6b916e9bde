"""Run orchestration: cold start and incremental pipeline runs.

Stages execute in order gather -> filter -> analyze -> store -> (plan).
Source failures are isolated per source and surface as PartialFailure;
a storage failure fails the run with the failing stage rolled back by
its transaction. One run at a time per kind.
"""

from __future__ import annotations

import logging
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from ..analysis import (
    AnalysisConfig,
    BatchAnalysisFailure,
    ThreatCard,
    analyze_batch,
    annotate_upd_chain,
    filter_relevant,
    score_relevance,
)
from ..errors import McpIntelError, ValidationError
from ..gateway import LlmGateway, Transcript, TranscriptMode
from ..graph import GraphStore, llm_extract, resolve_entity, rule_extract, upsert_card
from ..ingestion import (
    CollectorError,
    IntelItem,
    SearchQuery,
    Specificity,
    collect_github_advisories,
    collect_nvd,
    collect_rss,
    collect_web_search,
    dedup,
    file_fetch,
    generate_keywords,
    http_fetch,
    relax_query,
)
from ..planner import RiskPlan, aggregate, plan_batch, refine
from ..taxonomy import TaxonomyRegistry, load_taxonomy
from .config import PlatformConfig
from .storage import Storage

log = logging.getLogger(__name__)


class RunKind(str, Enum):
    GATHER = "Gather"
    ANALYZE = "Analyze"
    PLAN = "Plan"
    FULL = "Full"


class RunStatus(str, Enum):
    RUNNING = "Running"
    SUCCEEDED = "Succeeded"
    PARTIAL_FAILURE = "PartialFailure"
    FAILED = "Failed"


class RunInProgressError(McpIntelError):
    """Another run of this kind is already active."""


@dataclass
class RunRecord:
    run_id: str
    kind: RunKind
    started: str
    finished: str | None = None
    status: RunStatus = RunStatus.RUNNING
    counts: dict = field(default_factory=dict)
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "run_id": self.run_id,
            "kind": self.kind.value,
            "started": self.started,
            "finished": self.finished,
            "status": self.status.value,
            "counts": dict(self.counts),
            "errors": list(self.errors),
        }


@dataclass
class PipelineContext:
    config: PlatformConfig
    storage: Storage
    graph: GraphStore
    registry: TaxonomyRegistry
    gateway: LlmGateway
    transcript: Transcript

    @classmethod
    def from_config(cls, config: PlatformConfig) -> "PipelineContext":
        config.validate()
        config.data_dir.mkdir(parents=True, exist_ok=True)
        mode = {
            "live": TranscriptMode.LIVE,
            "record": TranscriptMode.RECORD,
            "replay": TranscriptMode.REPLAY,
        }[config.transcript_mode]
        if mode is TranscriptMode.REPLAY:
            if not config.transcript_path:
                raise ValidationError("replay mode requires transcript_path")
            transcript = Transcript.load(config.transcript_path)
        elif mode is TranscriptMode.RECORD:
            transcript = Transcript.recording()
        else:
            transcript = Transcript.live()
        return cls(
            config=config,
            storage=Storage(config.db_path),
            graph=GraphStore(config.graph_log_path),
            registry=load_taxonomy(config.taxonomy_path),
            gateway=LlmGateway(model_id=config.model_id, api_base=config.api_base),
            transcript=transcript,
        )

    def fetch_for(self, source: str):
        fixture = self.config.fixtures.get(source)
        if fixture:
            return file_fetch(Path(fixture))
        return http_fetch(self.config.sources.timeout)

    def save_transcript(self) -> None:
        if self.transcript.mode is TranscriptMode.RECORD and self.config.transcript_path:
            self.transcript.save(self.config.transcript_path)


_RUN_LOCKS: dict[RunKind, threading.Lock] = {kind: threading.Lock() for kind in RunKind}


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def _search_queries(ctx: PipelineContext, errors: list[str]) -> list[SearchQuery]:
    if ctx.config.fixed_queries:
        return [SearchQuery(text=q, specificity=Specificity.NARROW) for q in ctx.config.fixed_queries]
    try:
        generation = generate_keywords(ctx.registry, ctx.gateway, ctx.transcript)
        if generation.degraded:
            errors.append("keyword generation degraded to template queries")
        return list(generation.queries)
    except Exception as exc:  # keyword failure must not kill gathering
        errors.append(f"keyword generation failed: {exc}")
        return []


def _gather_web_search(ctx: PipelineContext, queries: list[SearchQuery], errors: list[str]) -> list[IntelItem]:
    sources = ctx.config.sources
    fetch = ctx.fetch_for("websearch")
    items: list[IntelItem] = []
    for query in queries:
        current: SearchQuery | None = query
        while current is not None:
            try:
                hits = collect_web_search(current, fetch, sources)
            except (CollectorError, ValidationError) as exc:
                errors.append(f"web search {current.text!r}: {exc}")
                break
            items.extend(hits)
            if len(hits) >= sources.min_results_threshold:
                break
            current = relax_query(current, sources.max_relaxation_rounds)
    return items


def run_gather(ctx: PipelineContext, record: RunRecord) -> None:
    sources = ctx.config.sources
    errors = record.errors
    collected: list[IntelItem] = []

    tasks = {}
    with ThreadPoolExecutor(max_workers=4) as pool:
        for feed in sources.rss_feeds:
            tasks[pool.submit(collect_rss, feed, ctx.fetch_for("rss"))] = f"rss {feed}"
        if sources.nvd_enabled:
            tasks[pool.submit(collect_nvd, ctx.fetch_for("nvd"), sources)] = "nvd"
        if sources.github_advisories_enabled:
            tasks[pool.submit(collect_github_advisories, ctx.fetch_for("github"), sources)] = "github advisories"

        if sources.web_search_enabled:
            queries = _search_queries(ctx, errors)
            collected.extend(_gather_web_search(ctx, queries, errors))

        for future, label in tasks.items():
            try:
                collected.extend(future.result())
            except CollectorError as exc:
                errors.append(f"{label}: {exc}")

    unique = dedup(collected)
    ctx.storage.insert_items_ignore_existing(unique)
    record.counts["items_collected"] = len(unique)


def run_analyze(ctx: PipelineContext, record: RunRecord) -> None:
    analysis: AnalysisConfig = ctx.config.analysis
    errors = record.errors

    items = ctx.storage.list_items()
    scored = [score_relevance(item, ctx.gateway, ctx.transcript, analysis.relevance_max_tokens) for item in items if item.content]
    ctx.storage.upsert_items(scored)
    relevant = filter_relevant(scored, analysis.relevance_threshold)
    record.counts["items_filtered"] = len(relevant)

    batches = [relevant[i : i + analysis.batch_size] for i in range(0, len(relevant), analysis.batch_size)]
    cards: list[ThreatCard] = []
    retry: list[list[IntelItem]] = []
    for batch in batches:
        try:
            cards.extend(analyze_batch(batch, ctx.registry, ctx.gateway, ctx.transcript, ctx.config.scoring, analysis))
        except BatchAnalysisFailure as exc:
            log.warning("batch failed, queued for one retry: %s", exc)
            retry.append(batch)
    for batch in retry:
        try:
            cards.extend(analyze_batch(batch, ctx.registry, ctx.gateway, ctx.transcript, ctx.config.scoring, analysis))
        except BatchAnalysisFailure as exc:
            errors.append(f"batch of {len(batch)} unrecoverable after retry: {exc}")

    annotated = []
    for card in cards:
        annotation = annotate_upd_chain(card, ctx.gateway, ctx.transcript)
        annotated.append(
            replace(card, upd_chain=annotation.chain, degraded=card.degraded or annotation.degraded)
        )
    ctx.storage.upsert_cards(annotated)
    record.counts["cards_produced"] = len(annotated)


def run_graph_store(ctx: PipelineContext, record: RunRecord) -> None:
    nodes_before = len(ctx.graph.nodes)
    edges_before = len(ctx.graph.edges)

    for card in ctx.storage.list_cards():
        seen_node_ids: set[str] = set()
        entities = []
        item_titles: dict[str, str] = {}
        text_parts = []
        for item_id in sorted(card.source_item_ids):
            try:
                item = ctx.storage.get_item(item_id)
            except McpIntelError:
                continue
            item_titles[item_id] = item.title
            text_parts.append(f"{item.title}\n{item.content}")
        text = "\n\n".join(text_parts) or card.summary

        extraction = llm_extract(text, ctx.gateway, ctx.transcript)
        if extraction.degraded:
            record.errors.append(f"entity extraction degraded for card {card.id}")
        for ext in [*extraction.entities, *rule_extract(text)]:
            outcome = resolve_entity(ext.label, ext.kind, ctx.graph, ctx.gateway, ctx.transcript, concept=ext.concept)
            if outcome.node_id not in seen_node_ids:
                seen_node_ids.add(outcome.node_id)
                entities.append(ctx.graph.get_node(outcome.node_id))

        delta = upsert_card(ctx.graph, card, entities, item_titles)
        if delta.rejected_edges:
            record.errors.append(f"card {card.id}: {delta.rejected_edges} edge(s) rejected by kind constraints")

    record.counts["nodes_added"] = len(ctx.graph.nodes) - nodes_before
    record.counts["edges_added"] = len(ctx.graph.edges) - edges_before


def run_plan(ctx: PipelineContext, record: RunRecord, card_ids: list[str] | None = None) -> RiskPlan:
    if card_ids:
        cards = [ctx.storage.get_card(cid) for cid in card_ids]
    else:
        cards = ctx.storage.list_cards()
    if not cards:
        raise ValidationError("planning requires at least one stored threat card")

    size = ctx.config.analysis.batch_size
    partials = [
        plan_batch(cards[i : i + size], ctx.gateway, ctx.transcript) for i in range(0, len(cards), size)
    ]
    merged = aggregate(partials)
    plan = refine(merged, ctx.gateway, ctx.transcript)
    if plan.degraded:
        record.errors.append("refinement degraded; pre-refinement plan kept")
    ctx.storage.save_plan(plan)
    record.counts["plans_produced"] = record.counts.get("plans_produced", 0) + 1
    record.counts["plan_id"] = plan.id
    return plan


_STAGES = {
    RunKind.GATHER: (run_gather,),
    RunKind.ANALYZE: (run_analyze, run_graph_store),
    RunKind.PLAN: (run_plan,),
    RunKind.FULL: (run_gather, run_analyze, run_graph_store),
}


def run_pipeline(kind: RunKind, ctx: PipelineContext, card_ids: list[str] | None = None) -> RunRecord:
    """Execute the stages for ``kind`` under the per-kind run lock."""
    lock = _RUN_LOCKS[kind]
    if not lock.acquire(blocking=False):
        raise RunInProgressError(f"a {kind.value} run is already in progress")
    record = RunRecord(run_id="run-" + uuid.uuid4().hex[:12], kind=kind, started=_now())
    try:
        ctx.storage.save_run(record.to_dict())
        for stage in _STAGES[kind]:
            if stage is run_plan:
                stage(ctx, record, card_ids)
            else:
                stage(ctx, record)
        record.status = RunStatus.PARTIAL_FAILURE if record.errors else RunStatus.SUCCEEDED
    except McpIntelError as exc:
        log.error("run %s failed: %s", record.run_id, exc)
        record.errors.append(str(exc))
        record.status = RunStatus.FAILED
    finally:
        record.finished = _now()
        ctx.storage.save_run(record.to_dict())
        ctx.save_transcript()
        lock.release()
    return record
