"""Tests for relevance scoring/filtering, batch classification, chain
annotation and the Critical consistency gate."""

from __future__ import annotations

import json

import httpx
import pytest

from mcpintel.analysis import (
    BatchAnalysisFailure,
    ThreatCard,
    UpdChain,
    analyze_batch,
    annotate_upd_chain,
    enforce_consistency,
    filter_relevant,
    score_relevance,
)
from mcpintel.analysis.cards import ChainEdge, UpdPhase, card_id
from mcpintel.errors import ValidationError
from mcpintel.gateway import LlmGateway, Transcript
from mcpintel.ingestion import SourceType, make_item
from mcpintel.scoring import RiskFactors, RiskLevel, ScoredRisk, classify_level, final_score
from mcpintel.taxonomy import StrideCategory, WorkflowPhase, bridge_to_frameworks
from conftest import stub_gateway


def item(title="GitHub MCP incident", content="An agent leaked tokens.", url="https://n.example/a", relevance=None):
    it = make_item(title, content, url, SourceType.WEB_SEARCH)
    return it.with_relevance(relevance) if relevance is not None else it


def classify_response(**overrides):
    record = {
        "title": "GitHub MCP prompt injection",
        "summary": "Crafted issue text redirected the agent; a second tool call exfiltrated tokens.",
        "workflow_phase": "ResponseHandling",
        "mcp_ids": ["MCP-20", "MCP-24"],
        "stride": "InformationDisclosure",
        "factors": {"L": 6, "S": 0.8, "I": 0.75, "D": 1.0},
        "rce_or_exfil_or_critical_asset": True,
        "cve_ids": [],
        "risk_score": 5.0,
        "risk_level": "Medium",
    }
    record.update(overrides)
    return json.dumps([record])


class TestScoreRelevance:
    def test_replayed_decimal(self):
        gateway, _ = stub_gateway("0.94")
        scored = score_relevance(item(), gateway, Transcript.live())
        assert scored.relevance == 0.94

    def test_empty_content_precondition(self):
        gateway, _ = stub_gateway()
        with pytest.raises(ValidationError, match="empty content"):
            score_relevance(item(content=""), gateway, Transcript.live())

    def test_garbage_twice_degrades_to_zero(self):
        gateway, transport = stub_gateway("not a number", "still not")
        scored = score_relevance(item(), gateway, Transcript.live())
        assert scored.relevance == 0.0
        assert transport.call_count == 2

    def test_score_with_surrounding_text(self):
        gateway, _ = stub_gateway("Relevance: 0.75")
        assert score_relevance(item(), gateway, Transcript.live()).relevance == 0.75

    def test_out_of_range_reply_retried(self):
        gateway, transport = stub_gateway("23", "0.5")
        assert score_relevance(item(), gateway, Transcript.live()).relevance == 0.5
        assert transport.call_count == 2


class TestFilterRelevant:
    def test_strict_inequality_at_threshold(self):
        items = [
            item(url="https://n.example/1", relevance=0.94),
            item(url="https://n.example/2", relevance=0.70),
            item(url="https://n.example/3", relevance=0.69),
        ]
        kept = filter_relevant(items, 0.70)
        assert [i.relevance for i in kept] == [0.94]

    def test_zero_threshold_keeps_positive(self):
        items = [item(url="https://n.example/1", relevance=0.01), item(url="https://n.example/2", relevance=0.0)]
        assert len(filter_relevant(items, 0.0)) == 1

    def test_empty(self):
        assert filter_relevant([], 0.7) == []

    def test_unscored_item_is_error(self):
        with pytest.raises(ValidationError, match="unscored"):
            filter_relevant([item()], 0.7)

    def test_order_preserved(self):
        items = [item(url=f"https://n.example/{i}", relevance=r) for i, r in enumerate([0.9, 0.8, 0.95])]
        assert [i.relevance for i in filter_relevant(items, 0.7)] == [0.9, 0.8, 0.95]


class TestAnalyzeBatch:
    def run_batch(self, response, items=None, registry=None, **kwargs):
        gateway, transport = stub_gateway(response)
        items = items or [item(relevance=0.94)]
        return analyze_batch(items, registry, gateway, Transcript.live(), **kwargs), transport

    def test_incident_classification(self, registry):
        cards, _ = self.run_batch(classify_response(), registry=registry)
        assert len(cards) == 1
        card = cards[0]
        assert card.mcp_ids == ("MCP-20", "MCP-24")
        assert card.stride is StrideCategory.INFORMATION_DISCLOSURE
        assert card.workflow_phase is WorkflowPhase.RESPONSE_HANDLING

    def test_model_score_discarded_and_recomputed(self, registry):
        cards, _ = self.run_batch(classify_response(risk_score=1.0, risk_level="Low"), registry=registry)
        card = cards[0]
        # Locally recomputed from validated factors and MCP-20 flags.
        expected = final_score(RiskFactors(6, 0.8, 0.75, 1.0), registry.get("MCP-20").flags)
        assert card.scored.final == expected.final
        assert card.scored.level is expected.level

    def test_owasp_fields_equal_bridge_exactly(self, registry):
        cards, _ = self.run_batch(classify_response(), registry=registry)
        mapping = bridge_to_frameworks(set(cards[0].mcp_ids), registry)
        assert cards[0].owasp_llm == mapping.owasp_llm
        assert cards[0].owasp_agentic == mapping.owasp_agentic

    def test_invalid_factors_fall_back_to_baseline(self, registry):
        cards, _ = self.run_batch(classify_response(factors={"L": 99, "S": 5, "I": 0.1, "D": 2}), registry=registry)
        assert cards[0].factors == registry.get("MCP-20").baseline_factors

    def test_unknown_ids_dropped(self, registry):
        cards, _ = self.run_batch(classify_response(mcp_ids=["MCP-99", "MCP-20"]), registry=registry)
        assert cards[0].mcp_ids == ("MCP-20",)

    def test_record_with_no_valid_ids_dropped_entirely(self, registry):
        with pytest.raises(BatchAnalysisFailure):
            self.run_batch(classify_response(mcp_ids=["MCP-99"]), registry=registry)

    def test_empty_batch_precondition(self, registry):
        gateway, _ = stub_gateway()
        with pytest.raises(ValidationError, match="non-empty"):
            analyze_batch([], registry, gateway, Transcript.live())

    def test_truncated_second_of_three_recovers_two(self, registry):
        records = json.loads(classify_response())[0]
        full = json.dumps([records, dict(records, title="Second threat"), dict(records, title="Third threat")])
        cut = full[: full.index("Third threat") + 3]
        items = [item(url=f"https://n.example/{i}", relevance=0.9) for i in range(3)]
        cards, _ = self.run_batch(cut, items=items, registry=registry)
        assert len(cards) == 2
        assert [c.title for c in cards] == ["GitHub MCP prompt injection", "Second threat"]
        # Records map to items in input order.
        assert cards[0].source_item_ids == {items[0].id}
        assert cards[1].source_item_ids == {items[1].id}

    def test_relevance_gate_assertion(self, registry):
        gateway, _ = stub_gateway()
        low = [item(relevance=0.70)]
        with pytest.raises(ValidationError, match="relevance gate"):
            analyze_batch(low, registry, gateway, Transcript.live())

    def test_batch_size_limit(self, registry):
        gateway, _ = stub_gateway()
        too_many = [item(url=f"https://n.example/{i}", relevance=0.9) for i in range(6)]
        with pytest.raises(ValidationError, match="batch"):
            analyze_batch(too_many, registry, gateway, Transcript.live())

    def test_zero_recoverable_records_is_batch_failure(self, registry):
        with pytest.raises(BatchAnalysisFailure):
            self.run_batch("utter garbage with no json", registry=registry)

    def test_card_id_stable(self, registry):
        cards_a, _ = self.run_batch(classify_response(), registry=registry)
        cards_b, _ = self.run_batch(classify_response(), registry=registry)
        assert cards_a[0].id == cards_b[0].id


class TestUpdChainType:
    def test_edge_count_invariant(self):
        with pytest.raises(ValidationError, match="edges"):
            UpdChain(steps=(("a", UpdPhase.PARASITIC_INGESTION),), edges=(ChainEdge.T2T,)).validate()

    def test_upd_must_be_final(self):
        with pytest.raises(ValidationError, match="final"):
            UpdChain(
                steps=(
                    ("a", UpdPhase.PARASITIC_INGESTION),
                    ("b", UpdPhase.PRIVACY_COLLECTION),
                    ("c", UpdPhase.PRIVACY_DISCLOSURE),
                ),
                edges=(ChainEdge.UPD, ChainEdge.T2T),
            ).validate()


def make_card(final: float, rce: bool = True, level: RiskLevel | None = None, **overrides) -> ThreatCard:
    scored = ScoredRisk(base=final / 10, multiplier=1.0, final=final, level=level or classify_level(final))
    fields = dict(
        id=card_id("t", ("MCP-20",), frozenset()),
        title="t",
        summary="Two tools were chained to leak data.",
        mcp_ids=("MCP-20",),
        workflow_phase=WorkflowPhase.RESPONSE_HANDLING,
        stride=StrideCategory.INFORMATION_DISCLOSURE,
        factors=RiskFactors(6, 0.8, 0.75, 1.0),
        scored=scored,
        owasp_llm=frozenset({"LLM01"}),
        owasp_agentic=frozenset({"ASI01"}),
        rce_or_exfil_or_critical_asset=rce,
    )
    fields.update(overrides)
    return ThreatCard(**fields)


class TestAnnotateUpdChain:
    CHAIN = json.dumps(
        {
            "steps": [
                ["github read tool", "ParasiticIngestion"],
                ["token read", "PrivacyCollection"],
                ["exfiltration tool", "PrivacyDisclosure"],
            ],
            "edges": ["T2T", "UPD"],
        }
    )

    def test_chain_with_terminal_upd(self):
        gateway, _ = stub_gateway(self.CHAIN)
        annotation = annotate_upd_chain(make_card(9.5), gateway, Transcript.live())
        assert annotation.chain is not None
        assert annotation.chain.edges == (ChainEdge.T2T, ChainEdge.UPD)
        assert annotation.chain.steps[0][0] == "github read tool"
        assert not annotation.degraded

    def test_single_tool_threat_yields_none(self):
        gateway, _ = stub_gateway("null")
        annotation = annotate_upd_chain(make_card(5.0), gateway, Transcript.live())
        assert annotation.chain is None
        assert not annotation.degraded

    def test_non_final_upd_rejected_with_degraded_flag(self):
        bad = json.dumps(
            {
                "steps": [["a", "ParasiticIngestion"], ["b", "PrivacyCollection"], ["c", "PrivacyDisclosure"]],
                "edges": ["UPD", "T2T"],
            }
        )
        gateway, _ = stub_gateway(bad)
        annotation = annotate_upd_chain(make_card(5.0), gateway, Transcript.live())
        assert annotation.chain is None
        assert annotation.degraded

    def test_malformed_reply_degraded(self):
        gateway, _ = stub_gateway("who knows")
        annotation = annotate_upd_chain(make_card(5.0), gateway, Transcript.live())
        assert annotation.chain is None
        assert annotation.degraded

    def test_gateway_failure_degraded(self):
        def failing(req):
            raise httpx.ConnectError("down")

        gateway = LlmGateway(transport=failing, max_retries=0)
        annotation = annotate_upd_chain(make_card(5.0), gateway, Transcript.live())
        assert annotation.chain is None
        assert annotation.degraded


class TestEnforceConsistency:
    def test_critical_above_nine_with_asset_flag_unchanged(self):
        card = make_card(9.4, rce=True)
        result = enforce_consistency(card)
        assert result.scored.level is RiskLevel.CRITICAL
        assert result.audit_notes == ()

    def test_critical_with_low_score_downgraded(self):
        card = make_card(8.2, rce=True, level=RiskLevel.CRITICAL)
        result = enforce_consistency(card)
        assert result.scored.level is RiskLevel.HIGH
        assert result.audit_notes

    def test_critical_without_asset_flag_downgraded(self):
        card = make_card(9.4, rce=False)
        result = enforce_consistency(card)
        assert result.scored.level is RiskLevel.HIGH
        assert any("Critical downgraded" in note for note in result.audit_notes)

    def test_exactly_nine_is_gated(self):
        # classify_level(9.0) is Critical, but the gate requires the
        # score to strictly exceed the threshold.
        card = make_card(9.0, rce=True)
        result = enforce_consistency(card)
        assert result.scored.level is RiskLevel.HIGH

    def test_level_rederived_from_score(self):
        card = make_card(5.0, level=RiskLevel.CRITICAL)
        result = enforce_consistency(card)
        assert result.scored.level is RiskLevel.MEDIUM
