"""Tests for collectors, normalization, dedup and query generation."""

from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone

import httpx
import pytest
from hypothesis import given, strategies as st

from mcpintel.errors import ValidationError
from mcpintel.gateway import Transcript
from mcpintel.ingestion import (
    CollectorError,
    FetchResponse,
    SearchQuery,
    SourceConfig,
    Specificity,
    canonical_url,
    collect_github_advisories,
    collect_nvd,
    collect_rss,
    collect_web_search,
    dedup,
    generate_keywords,
    make_item,
    relax_query,
)
from mcpintel.ingestion.items import SourceType
from conftest import stub_gateway

RSS_FIXTURE = """<?xml version="1.0"?>
<rss version="2.0"><channel>
  <title>Feed</title>
  <item><title>One</title><link>https://a.example/1</link><description>first</description></item>
  <item><title>Two</title><link>https://a.example/2</link><description>second</description></item>
  <item><title>Three</title><link>https://a.example/3</link><description>third</description></item>
</channel></rss>
"""

ATOM_FIXTURE = """<?xml version="1.0"?>
<feed xmlns="http://www.w3.org/2005/Atom">
  <title>Atom feed</title>
  <entry><title>Alpha</title><link href="https://b.example/alpha"/><summary>sum</summary></entry>
</feed>
"""

EMPTY_RSS = '<?xml version="1.0"?><rss version="2.0"><channel><title>Empty</title></channel></rss>'

SEARCH_PAGE = """
<html><body>
<div class="result"><a class="result__a" href="https://x.example/a">Hit A</a>
  <a class="result__snippet" href="https://x.example/a">snippet a</a></div>
<div class="result"><a class="result__a" href="https://x.example/b">Hit B</a>
  <a class="result__snippet" href="https://x.example/b">snippet b</a></div>
<div class="result"><a class="result__a" href="//duckduckgo.com/l/?uddg=https%3A%2F%2Fx.example%2Fc&amp;rut=1">Hit C</a>
  <a class="result__snippet" href="#">snippet c</a></div>
<div class="result"><a class="result__a" href="https://x.example/d">Hit D</a>
  <a class="result__snippet" href="#">snippet d</a></div>
</body></html>
"""


def fetch_text(text: str, status: int = 200, headers: dict | None = None):
    def fetch(url, params=None, headers_arg=None, **kwargs):
        return FetchResponse(status=status, text=text, headers=headers or {})

    return fetch


class TestCanonicalUrl:
    def test_lowercases_scheme_and_host_only(self):
        assert canonical_url("HTTPS://Example.COM/Path") == "https://example.com/Path"

    def test_strips_fragment_and_tracking(self):
        url = "https://a.example/post?utm_source=x&utm_medium=y&id=7&fbclid=z#frag"
        assert canonical_url(url) == "https://a.example/post?id=7"

    def test_empty_path_normalized(self):
        assert canonical_url("https://a.example") == "https://a.example/"


class TestMakeItem:
    def test_id_deterministic_over_canonical_parts(self):
        a = make_item("T", "C", "https://a.example/p?utm_source=x", SourceType.RSS)
        b = make_item("T", "C", "HTTPS://A.EXAMPLE/p", SourceType.WEB_SEARCH)
        assert a.id == b.id

    def test_relevance_unset_at_ingestion(self):
        item = make_item("T", "C", "https://a.example/p", SourceType.RSS)
        assert item.relevance is None

    def test_future_timestamp_rejected(self):
        with pytest.raises(ValidationError):
            make_item("T", "C", "https://a.example", SourceType.RSS, datetime.now(timezone.utc) + timedelta(days=1))


class TestDedup:
    def test_same_canonical_url_collapses_earliest_wins(self):
        early = datetime(2026, 1, 1, tzinfo=timezone.utc)
        late = datetime(2026, 1, 2, tzinfo=timezone.utc)
        a = make_item("T", "ca", "https://a.example/p?utm_source=rss", SourceType.RSS, late)
        b = make_item("T", "cb", "https://A.example/p", SourceType.WEB_SEARCH, early)
        out = dedup([a, b])
        assert len(out) == 1
        assert out[0].collected_at == early

    def test_same_content_hash_collapses(self):
        a = make_item("T1", "same body", "https://a.example/1", SourceType.RSS)
        b = make_item("T2", "same body", "https://b.example/2", SourceType.NVD)
        assert len(dedup([a, b])) == 1

    def test_distinct_items_keep_input_order(self):
        a = make_item("T1", "one", "https://a.example/1", SourceType.RSS)
        b = make_item("T2", "two", "https://a.example/2", SourceType.RSS)
        assert dedup([a, b]) == [a, b]

    def test_empty(self):
        assert dedup([]) == []

    def test_empty_content_items_do_not_collapse_on_content(self):
        a = make_item("T1", "", "https://a.example/1", SourceType.RSS)
        b = make_item("T2", "", "https://a.example/2", SourceType.RSS)
        assert len(dedup([a, b])) == 2

    @given(
        specs=st.lists(
            st.tuples(st.sampled_from(["u1", "u2", "u3"]), st.sampled_from(["c1", "c2", ""])),
            max_size=8,
        )
    )
    def test_idempotent(self, specs):
        items = [
            make_item(f"T{i}", content, f"https://h.example/{url}", SourceType.RSS)
            for i, (url, content) in enumerate(specs)
        ]
        once = dedup(items)
        assert dedup(once) == once


class TestCollectRss:
    def test_three_entries(self):
        items = collect_rss("https://feed.example/rss", fetch_text(RSS_FIXTURE))
        assert len(items) == 3
        assert all(i.source_type is SourceType.RSS for i in items)
        assert items[0].title == "One"
        assert items[0].content == "first"

    def test_atom_entries(self):
        items = collect_rss("https://feed.example/atom", fetch_text(ATOM_FIXTURE))
        assert len(items) == 1
        assert items[0].source_url == "https://b.example/alpha"

    def test_empty_feed(self):
        assert collect_rss("https://feed.example/rss", fetch_text(EMPTY_RSS)) == []

    def test_unreachable_host(self):
        def fetch(url, **kwargs):
            raise httpx.ConnectError("no route")

        with pytest.raises(CollectorError, match="unreachable"):
            collect_rss("https://down.example/rss", fetch)

    def test_malformed_feed(self):
        with pytest.raises(CollectorError, match="XML"):
            collect_rss("https://feed.example/rss", fetch_text("<rss><broken"))


class TestCollectNvd:
    CONFIG = SourceConfig()

    def nvd_body(self, *cve_ids):
        return json.dumps(
            {
                "totalResults": len(cve_ids),
                "resultsPerPage": len(cve_ids),
                "vulnerabilities": [
                    {"cve": {"id": cid, "descriptions": [{"lang": "en", "value": f"desc {cid}"}]}}
                    for cid in cve_ids
                ],
            }
        )

    def test_cve_record_titled_with_id(self):
        items = collect_nvd(fetch_text(self.nvd_body("CVE-2025-6514")), self.CONFIG)
        assert len(items) == 1
        assert "CVE-2025-6514" in items[0].title
        assert items[0].source_type is SourceType.NVD
        assert "desc CVE-2025-6514" in items[0].content

    def test_empty_result_set(self):
        assert collect_nvd(fetch_text(self.nvd_body()), self.CONFIG) == []

    def test_rate_limit_backoff_then_success(self):
        responses = [
            FetchResponse(status=403, text=""),
            FetchResponse(status=403, text=""),
            FetchResponse(status=200, text=self.nvd_body("CVE-2025-0001")),
        ]
        calls = []

        def fetch(url, params=None, **kwargs):
            calls.append(params)
            return responses[len(calls) - 1]

        sleeps = []
        items = collect_nvd(fetch, self.CONFIG, sleep=sleeps.append)
        assert len(items) == 1
        assert len(calls) == 3
        assert sleeps == [1.0, 2.0]  # exponential backoff recorded

    def test_rate_limit_exhaustion_returns_partial(self):
        def fetch(url, params=None, **kwargs):
            return FetchResponse(status=429, text="")

        items = collect_nvd(fetch, SourceConfig(retry_max=1), sleep=lambda s: None)
        assert items == []


class TestCollectGithubAdvisories:
    CONFIG = SourceConfig()

    def test_two_advisories(self):
        body = json.dumps(
            [
                {"ghsa_id": "GHSA-aaaa", "summary": "s1", "description": "d1", "html_url": "https://g.example/1"},
                {"ghsa_id": "GHSA-bbbb", "summary": "s2", "description": "d2", "html_url": "https://g.example/2"},
            ]
        )
        items = collect_github_advisories(fetch_text(body), self.CONFIG)
        assert len(items) == 2
        assert all(i.source_type is SourceType.GITHUB_ADVISORY for i in items)

    def test_empty(self):
        assert collect_github_advisories(fetch_text("[]"), self.CONFIG) == []

    def test_malformed_record_skipped_others_kept(self):
        body = json.dumps([{"summary": "no id"}, {"ghsa_id": "GHSA-ok", "summary": "fine"}])
        items = collect_github_advisories(fetch_text(body), self.CONFIG)
        assert len(items) == 1
        assert "GHSA-ok" in items[0].title


class TestCollectWebSearch:
    QUERY = SearchQuery(text="mcp security", specificity=Specificity.BROAD)

    def test_four_hits(self):
        items = collect_web_search(self.QUERY, fetch_text(SEARCH_PAGE), SourceConfig())
        assert len(items) == 4
        assert items[0].title == "Hit A"
        assert items[0].content == "snippet a"
        # Redirect-wrapped URL is decoded.
        assert items[2].source_url == "https://x.example/c"

    def test_disabled_flag_precondition(self):
        with pytest.raises(ValidationError, match="disabled"):
            collect_web_search(self.QUERY, fetch_text(SEARCH_PAGE), SourceConfig(web_search_enabled=False))

    def test_provider_error(self):
        def fetch(url, **kwargs):
            raise httpx.ConnectError("nope")

        with pytest.raises(CollectorError):
            collect_web_search(self.QUERY, fetch, SourceConfig())


class TestGenerateKeywords:
    def test_empty_registry_yields_empty(self, tmp_path):
        from mcpintel.taxonomy import load_taxonomy

        (tmp_path / "t.yaml").write_text(
            'version: "t"\ngrid:\n  categories: [a,b,c,d,e,f,g,h,i,j,k,l,m,n,o,p,q]\nentries: []\n'
        )
        empty = load_taxonomy(tmp_path / "t.yaml", allow_partial=True)
        gateway, _ = stub_gateway()
        result = generate_keywords(empty, gateway, Transcript.live())
        assert result.queries == ()

    def test_malformed_output_falls_back_to_templates(self, registry):
        gateway, transport = stub_gateway("complete nonsense, no structure")
        result = generate_keywords(registry, gateway, Transcript.live())
        assert result.degraded
        # Template oracle: one narrow query per entry plus broad per surface.
        narrow = [q for q in result.queries if q.specificity is Specificity.NARROW]
        broad = [q for q in result.queries if q.specificity is Specificity.BROAD]
        assert len(narrow) == len(registry)
        assert len(broad) == 4
        assert all("MCP security" in q.text for q in broad)
        assert any("Direct Prompt Injection" in q.text for q in narrow)

    def test_gateway_failure_falls_back(self, registry):
        import httpx as _httpx

        def failing(req):
            raise _httpx.ConnectError("down")

        from mcpintel.gateway import LlmGateway

        gateway = LlmGateway(transport=failing, max_retries=0)
        result = generate_keywords(registry, gateway, Transcript.live())
        assert result.degraded
        assert len(result.queries) >= len(registry)

    def test_model_queries_tagged_and_supplemented(self, registry):
        payload = json.dumps(
            [
                {"text": "MCP security vulnerabilities", "specificity": "Broad", "seed_ids": ["MCP-19"]},
                {"text": "MCP tool description poisoning in Claude Desktop", "specificity": "Narrow", "seed_ids": ["MCP-10"]},
                {"text": "bogus id ignored", "specificity": "Narrow", "seed_ids": ["MCP-99"]},
            ]
        )
        gateway, _ = stub_gateway(payload)
        result = generate_keywords(registry, gateway, Transcript.live())
        assert not result.degraded
        broad = [q for q in result.queries if q.specificity is Specificity.BROAD]
        assert any("MCP security" in q.text for q in broad)
        # The model covered only RuntimeFlow; the other three surfaces get template broads.
        assert len(broad) == 4
        narrow = [q for q in result.queries if q.specificity is Specificity.NARROW]
        assert any(q.seed_ids == frozenset({"MCP-10"}) for q in narrow)
        assert any(q.seed_ids == frozenset() for q in narrow)  # unknown id dropped


class TestRelaxQuery:
    def test_drops_trailing_qualifier_and_broadens(self):
        query = SearchQuery(text="MCP tool description poisoning in Claude Desktop", specificity=Specificity.NARROW)
        relaxed = relax_query(query)
        assert relaxed is not None
        assert relaxed.text == "MCP tool description poisoning"
        assert relaxed.specificity is Specificity.BROAD
        assert relaxed.relaxation_round == 1

    def test_without_qualifier_drops_last_token(self):
        relaxed = relax_query(SearchQuery(text="mcp security threats", specificity=Specificity.BROAD))
        assert relaxed.text == "mcp security"

    def test_rounds_exhausted_terminal(self):
        query = SearchQuery(text="a b c", specificity=Specificity.BROAD, relaxation_round=3)
        assert relax_query(query, max_relaxation_rounds=3) is None

    def test_single_token_terminal(self):
        assert relax_query(SearchQuery(text="mcp", specificity=Specificity.BROAD)) is None

    def test_strictly_shorter(self):
        query = SearchQuery(text="one two three four", specificity=Specificity.NARROW)
        current = query
        while True:
            relaxed = relax_query(current)
            if relaxed is None:
                break
            assert len(relaxed.text) < len(current.text)
            current = relaxed
