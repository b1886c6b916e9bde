"""REST surface for analysts and the dashboard.

All responses are validated against the pydantic models below, which
double as the published schemas. Cross-origin requests are allowed so
the dashboard can be served separately.
"""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from ..analysis.consistency import enforce_consistency
from ..errors import UnknownIdError, ValidationError
from ..scoring import ScoringConfig, final_score
from .config import save_config
from .projections import landscape_projection, matrix_projection, stride_distribution
from .runs import PipelineContext, RunInProgressError, RunKind, run_pipeline

log = logging.getLogger(__name__)


# -- request/response schemas -------------------------------------------------


class RunRequest(BaseModel):
    kind: str = Field(description="Gather | Analyze | Plan | Full")


class RunOut(BaseModel):
    run_id: str
    kind: str
    started: str
    finished: str | None
    status: str
    counts: dict
    errors: list[str]


class ItemOut(BaseModel):
    id: str
    title: str
    content: str
    source_url: str
    source_type: str
    collected_at: str
    relevance: float | None


class ScoredOut(BaseModel):
    base: float
    multiplier: float
    final: float
    level: str


class CardOut(BaseModel):
    id: str
    title: str
    summary: str
    mcp_ids: list[str]
    workflow_phase: str
    stride: str
    factors: dict
    scored: ScoredOut
    owasp_llm: list[str]
    owasp_agentic: list[str]
    upd_chain: dict | None
    source_item_ids: list[str]
    cve_ids: list[str]
    rce_or_exfil_or_critical_asset: bool
    audit_notes: list[str]
    degraded: bool


class MatrixCellOut(BaseModel):
    intensity: float
    threat_ids: list[str]


class MatrixOut(BaseModel):
    grid: list[list[MatrixCellOut]]


class LandscapeCellOut(BaseModel):
    height: float
    surface_color: str


class LandscapeOut(BaseModel):
    grid: list[list[LandscapeCellOut]]


class StrideOut(BaseModel):
    counts: dict[str, int]
    total: int


class NodeOut(BaseModel):
    id: str
    kind: str
    canonical_label: str
    aliases: list[str]
    concept: str | None


class EdgeOut(BaseModel):
    kind: str
    src: str
    dst: str


class GraphNodesOut(BaseModel):
    nodes: list[NodeOut]


class GraphEdgesOut(BaseModel):
    edges: list[EdgeOut]


class ReachableOut(BaseModel):
    entry: str
    reachable: list[str]


class PlanRequest(BaseModel):
    card_ids: list[str] = Field(default_factory=list)


class MitigationOut(BaseModel):
    text: str
    priority: str
    effort: str


class PlanEntryOut(BaseModel):
    threat_card_id: str
    final_score: float
    detection_methods: list[str]
    mitigations: list[MitigationOut]
    framework_refs: list[str]
    unavailable: bool


class PlanOut(BaseModel):
    id: str
    entries: list[PlanEntryOut]
    degraded: bool
    created_at: str


class ScoringConfigModel(BaseModel):
    w_L: float
    w_S: float
    w_I: float
    w_D: float
    multiplier_semantic: float
    multiplier_chaining: float
    multiplier_observability: float
    threshold_critical: float
    threshold_high: float
    threshold_medium: float


# -- app factory ---------------------------------------------------------------


def create_app(ctx: PipelineContext, config_path: str | Path | None = None) -> FastAPI:
    app = FastAPI(title="mcpintel", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(UnknownIdError)
    async def _unknown(request, exc):
        return JSONResponse(status_code=404, content={"detail": str(exc)})

    @app.post("/api/runs", response_model=RunOut)
    def post_run(body: RunRequest):
        try:
            kind = RunKind(body.kind)
        except ValueError:
            raise HTTPException(status_code=422, detail=f"unknown run kind {body.kind!r}")
        try:
            record = run_pipeline(kind, ctx)
        except RunInProgressError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return record.to_dict()

    @app.get("/api/runs", response_model=list[RunOut])
    def list_runs():
        return ctx.storage.list_runs()

    @app.get("/api/runs/{run_id}", response_model=RunOut)
    def get_run(run_id: str):
        return ctx.storage.get_run(run_id)

    @app.get("/api/intel", response_model=list[ItemOut])
    def list_intel(min_relevance: float | None = Query(default=None, ge=0.0, le=1.0)):
        return [item.to_dict() for item in ctx.storage.list_items(min_relevance)]

    @app.get("/api/threats", response_model=list[CardOut])
    def list_threats(level: str | None = None, stride: str | None = None):
        return [card.to_dict() for card in ctx.storage.list_cards(level=level, stride=stride)]

    @app.get("/api/threats/{card_id}", response_model=CardOut)
    def get_threat(card_id: str):
        return ctx.storage.get_card(card_id).to_dict()

    @app.get("/api/projections/matrix", response_model=MatrixOut)
    def projection_matrix():
        return matrix_projection(ctx.storage.list_cards(), ctx.registry).to_dict()

    @app.get("/api/projections/landscape", response_model=LandscapeOut)
    def projection_landscape():
        return landscape_projection(ctx.storage.list_cards(), ctx.registry).to_dict()

    @app.get("/api/projections/stride", response_model=StrideOut)
    def projection_stride():
        counts = stride_distribution(ctx.storage.list_cards())
        return {"counts": counts, "total": sum(counts.values())}

    @app.get("/api/graph/nodes", response_model=GraphNodesOut)
    def graph_nodes():
        return {"nodes": [node.to_dict() for node in ctx.graph.nodes.values()]}

    @app.get("/api/graph/edges", response_model=GraphEdgesOut)
    def graph_edges():
        return {"edges": [edge.to_dict() for edge in ctx.graph.edges]}

    @app.get("/api/graph/reachable", response_model=ReachableOut)
    def graph_reachable(entry: str):
        return {"entry": entry, "reachable": sorted(ctx.graph.reachable_tools(entry))}

    @app.post("/api/plans", response_model=PlanOut)
    def post_plan(body: PlanRequest):
        try:
            record = run_pipeline(RunKind.PLAN, ctx, card_ids=body.card_ids or None)
        except RunInProgressError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        if record.status.value == "Failed" or "plan_id" not in record.counts:
            raise HTTPException(status_code=500, detail="; ".join(record.errors) or "planning failed")
        return ctx.storage.get_plan(record.counts["plan_id"]).to_dict()

    @app.get("/api/plans", response_model=list[PlanOut])
    def list_plans():
        return [plan.to_dict() for plan in ctx.storage.list_plans()]

    @app.get("/api/plans/{plan_id}", response_model=PlanOut)
    def get_plan(plan_id: str):
        return ctx.storage.get_plan(plan_id).to_dict()

    @app.get("/api/config/scoring", response_model=ScoringConfigModel)
    def get_scoring():
        return ctx.config.scoring.to_dict()

    @app.put("/api/config/scoring", response_model=ScoringConfigModel)
    def put_scoring(body: ScoringConfigModel):
        try:
            new_config = ScoringConfig.from_dict(body.model_dump())
        except ValidationError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        ctx.config.scoring = new_config
        # Re-score stored cards so ranks reflect the new weights.
        rescored = []
        for card in ctx.storage.list_cards():
            flags = ctx.registry.get(card.primary_id).flags if card.primary_id in ctx.registry else frozenset()
            card = replace(card, scored=final_score(card.factors, flags, new_config))
            rescored.append(enforce_consistency(card, new_config))
        ctx.storage.upsert_cards(rescored)
        if config_path is not None:
            save_config(ctx.config, config_path)
        return new_config.to_dict()

    return app
