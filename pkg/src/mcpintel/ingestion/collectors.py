"""Source collectors: RSS/Atom feeds, the NVD CVE API, GitHub security
advisories, and web search.

Every collector takes a ``fetch`` callable so tests and fixture-mode
runs read recorded responses from disk instead of the network. Each
collector raises CollectorError on its own failures; isolation across
sources happens in the pipeline runner.
"""

from __future__ import annotations

import json
import logging
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from html import unescape
from html.parser import HTMLParser
from typing import Callable
from urllib.parse import parse_qs, urlsplit, unquote

import httpx

from ..errors import McpIntelError, ValidationError
from .items import IntelItem, SourceType, make_item
from .queries import SearchQuery

log = logging.getLogger(__name__)

DEFAULT_NVD_ENDPOINT = "https://services.nvd.nist.gov/rest/json/cves/2.0"
DEFAULT_GITHUB_ADVISORIES_ENDPOINT = "https://api.github.com/advisories"
DEFAULT_WEB_SEARCH_ENDPOINT = "https://html.duckduckgo.com/html/"
DEFAULT_RSS_FEEDS = (
    "http://export.arxiv.org/rss/cs.CR",
    "http://export.arxiv.org/rss/cs.AI",
    "https://krebsonsecurity.com/feed/",
    "https://feeds.feedburner.com/TheHackersNews",
    "https://www.schneier.com/feed/atom/",
)

_RATE_LIMIT_STATUSES = {403, 429}


class CollectorError(McpIntelError):
    """A single source failed; other sources are unaffected."""


@dataclass
class FetchResponse:
    status: int
    text: str
    headers: dict = field(default_factory=dict)


Fetch = Callable[..., FetchResponse]


def http_fetch(timeout: float = 20.0) -> Fetch:
    def fetch(url: str, params: dict | None = None, headers: dict | None = None) -> FetchResponse:
        response = httpx.get(url, params=params, headers=headers, timeout=timeout, follow_redirects=True)
        return FetchResponse(status=response.status_code, text=response.text, headers=dict(response.headers))

    return fetch


def file_fetch(path) -> Fetch:
    """Fixture-mode fetch: every request is served from one file."""

    def fetch(url: str, params: dict | None = None, headers: dict | None = None) -> FetchResponse:
        with open(path, encoding="utf-8") as fh:
            return FetchResponse(status=200, text=fh.read())

    return fetch


@dataclass(frozen=True)
class SourceConfig:
    """Endpoints, rate limits and relaxation policy for all collectors.

    All endpoints are overridable so fixture files can stand in for the
    live services.
    """

    rss_feeds: tuple[str, ...] = DEFAULT_RSS_FEEDS
    nvd_endpoint: str = DEFAULT_NVD_ENDPOINT
    github_advisories_endpoint: str = DEFAULT_GITHUB_ADVISORIES_ENDPOINT
    web_search_endpoint: str = DEFAULT_WEB_SEARCH_ENDPOINT
    web_search_enabled: bool = True
    nvd_enabled: bool = True
    github_advisories_enabled: bool = True
    timeout: float = 20.0
    retry_max: int = 3
    retry_base_delay: float = 1.0
    min_results_threshold: int = 5
    max_relaxation_rounds: int = 3

    def validate(self) -> "SourceConfig":
        for url in (self.nvd_endpoint, self.github_advisories_endpoint, self.web_search_endpoint, *self.rss_feeds):
            parts = urlsplit(url)
            if not (parts.scheme and parts.netloc):
                raise ValidationError(f"endpoint {url!r} is not an absolute URL")
        if self.min_results_threshold <= 0 or self.max_relaxation_rounds <= 0:
            raise ValidationError("thresholds must be positive")
        return self


# ---------------------------------------------------------------------------
# RSS / Atom
# ---------------------------------------------------------------------------

_ATOM_NS = "{http://www.w3.org/2005/Atom}"


def _text(element, *tags) -> str:
    for tag in tags:
        node = element.find(tag)
        if node is not None and node.text:
            return node.text.strip()
    return ""


def collect_rss(feed_url: str, fetch: Fetch) -> list[IntelItem]:
    """One IntelItem per feed entry (RSS 2.0 items or Atom entries)."""
    try:
        response = fetch(feed_url)
    except (httpx.HTTPError, OSError) as exc:
        raise CollectorError(f"feed {feed_url} unreachable: {exc}") from exc
    if response.status != 200:
        raise CollectorError(f"feed {feed_url} returned HTTP {response.status}")
    try:
        root = ET.fromstring(response.text)
    except ET.ParseError as exc:
        raise CollectorError(f"feed {feed_url} is not well-formed XML: {exc}") from exc

    items: list[IntelItem] = []
    for entry in root.iter("item"):
        link = _text(entry, "link") or feed_url
        items.append(
            make_item(
                title=_text(entry, "title"),
                content=_text(entry, "description", "summary"),
                source_url=link,
                source_type=SourceType.RSS,
            )
        )
    for entry in root.iter(f"{_ATOM_NS}entry"):
        link_node = entry.find(f"{_ATOM_NS}link")
        link = link_node.get("href") if link_node is not None else feed_url
        items.append(
            make_item(
                title=_text(entry, f"{_ATOM_NS}title"),
                content=_text(entry, f"{_ATOM_NS}summary", f"{_ATOM_NS}content"),
                source_url=link or feed_url,
                source_type=SourceType.RSS,
            )
        )
    return items


# ---------------------------------------------------------------------------
# NVD CVE API
# ---------------------------------------------------------------------------


def _fetch_with_backoff(fetch: Fetch, url: str, params: dict, config: SourceConfig, sleep=time.sleep) -> FetchResponse | None:
    """GET with exponential backoff on rate-limit statuses. Returns
    None when retries are exhausted (caller keeps partial results)."""
    for attempt in range(config.retry_max + 1):
        response = fetch(url, params=params)
        if response.status not in _RATE_LIMIT_STATUSES:
            return response
        if attempt < config.retry_max:
            delay = config.retry_base_delay * (2**attempt)
            log.warning("rate limited (HTTP %d) by %s; retry %d/%d in %.1fs", response.status, url, attempt + 1, config.retry_max, delay)
            sleep(delay)
    log.warning("rate limit retries exhausted for %s; returning partial results", url)
    return None


def collect_nvd(
    fetch: Fetch,
    config: SourceConfig,
    keyword: str = "model context protocol",
    pub_start: str | None = None,
    pub_end: str | None = None,
    max_pages: int = 5,
    sleep=time.sleep,
) -> list[IntelItem]:
    """One IntelItem per CVE record matching the keyword/date window."""
    items: list[IntelItem] = []
    start_index = 0
    for _ in range(max_pages):
        params: dict = {"keywordSearch": keyword, "startIndex": start_index}
        if pub_start and pub_end:
            params["pubStartDate"] = pub_start
            params["pubEndDate"] = pub_end
        try:
            response = _fetch_with_backoff(fetch, config.nvd_endpoint, params, config, sleep=sleep)
        except (httpx.HTTPError, OSError) as exc:
            raise CollectorError(f"NVD request failed: {exc}") from exc
        if response is None:
            return items
        if response.status != 200:
            raise CollectorError(f"NVD returned HTTP {response.status}")
        try:
            body = json.loads(response.text)
        except json.JSONDecodeError as exc:
            raise CollectorError(f"NVD returned malformed JSON: {exc}") from exc

        for vuln in body.get("vulnerabilities", []):
            cve = vuln.get("cve", {})
            cve_id = cve.get("id")
            if not cve_id:
                log.warning("skipping NVD record without id")
                continue
            descriptions = cve.get("descriptions", [])
            english = next((d.get("value", "") for d in descriptions if d.get("lang") == "en"), "")
            items.append(
                make_item(
                    title=f"{cve_id}: {english[:120]}" if english else cve_id,
                    content=english,
                    source_url=f"https://nvd.nist.gov/vuln/detail/{cve_id}",
                    source_type=SourceType.NVD,
                )
            )

        total = int(body.get("totalResults", 0))
        start_index += int(body.get("resultsPerPage", 0) or len(body.get("vulnerabilities", [])))
        if start_index >= total or not body.get("vulnerabilities"):
            break
    return items


# ---------------------------------------------------------------------------
# GitHub security advisories
# ---------------------------------------------------------------------------


def _link_next(headers: dict) -> str | None:
    link_header = headers.get("link") or headers.get("Link") or ""
    for part in link_header.split(","):
        if 'rel="next"' in part:
            url = part.split(";")[0].strip().strip("<>")
            return url or None
    return None


def collect_github_advisories(
    fetch: Fetch,
    config: SourceConfig,
    params: dict | None = None,
    max_pages: int = 5,
    sleep=time.sleep,
) -> list[IntelItem]:
    """One IntelItem per advisory; malformed records are skipped with a
    warning, the rest are kept."""
    items: list[IntelItem] = []
    url: str | None = config.github_advisories_endpoint
    query = dict(params or {})
    for _ in range(max_pages):
        if url is None:
            break
        try:
            response = _fetch_with_backoff(fetch, url, query, config, sleep=sleep)
        except (httpx.HTTPError, OSError) as exc:
            raise CollectorError(f"advisories request failed: {exc}") from exc
        if response is None:
            return items
        if response.status != 200:
            raise CollectorError(f"advisories endpoint returned HTTP {response.status}")
        try:
            body = json.loads(response.text)
        except json.JSONDecodeError as exc:
            raise CollectorError(f"advisories endpoint returned malformed JSON: {exc}") from exc
        if not isinstance(body, list):
            raise CollectorError("advisories payload is not a list")

        for advisory in body:
            if not isinstance(advisory, dict):
                log.warning("skipping malformed advisory record: %r", advisory)
                continue
            ghsa_id = advisory.get("ghsa_id")
            summary = advisory.get("summary") or ""
            if not ghsa_id:
                log.warning("skipping advisory without ghsa_id")
                continue
            items.append(
                make_item(
                    title=f"{ghsa_id}: {summary}" if summary else ghsa_id,
                    content=advisory.get("description") or summary,
                    source_url=advisory.get("html_url") or f"https://github.com/advisories/{ghsa_id}",
                    source_type=SourceType.GITHUB_ADVISORY,
                )
            )

        url = _link_next(response.headers)
        query = {}
    return items


# ---------------------------------------------------------------------------
# Web search
# ---------------------------------------------------------------------------


class _ResultPageParser(HTMLParser):
    """Extracts (url, title, snippet) triples from the search provider's
    HTML results page. Inline markup inside titles/snippets is kept as
    text; capture closes on the tag that opened it."""

    def __init__(self):
        super().__init__()
        self.results: list[dict] = []
        self._current: dict | None = None
        self._capture: str | None = None
        self._capture_tag: str | None = None

    def handle_starttag(self, tag, attrs):
        attrs = dict(attrs)
        classes = (attrs.get("class") or "").split()
        if tag == "a" and "result__a" in classes:
            self._current = {"url": attrs.get("href", ""), "title": "", "snippet": ""}
            self._capture = "title"
            self._capture_tag = tag
        elif "result__snippet" in classes and self._current is not None:
            self._capture = "snippet"
            self._capture_tag = tag

    def handle_endtag(self, tag):
        if self._capture is None or tag != self._capture_tag:
            return
        ended = self._capture
        self._capture = None
        self._capture_tag = None
        if ended == "snippet" and self._current is not None:
            self.results.append(self._current)
            self._current = None

    def handle_data(self, data):
        if self._current is not None and self._capture:
            self._current[self._capture] += data


def _decode_result_url(href: str) -> str:
    """Search result links may be redirect wrappers carrying the real
    target in a ``uddg`` query parameter."""
    if "uddg=" in href:
        query = parse_qs(urlsplit(href).query)
        target = query.get("uddg", [""])[0]
        if target:
            return unquote(target)
    return href


def collect_web_search(query: SearchQuery, fetch: Fetch, config: SourceConfig) -> list[IntelItem]:
    """One IntelItem per search hit (title, snippet, decoded URL). The
    caller compares the hit count against min_results_threshold to
    drive query relaxation."""
    if not config.web_search_enabled:
        raise ValidationError("web search is disabled in the source configuration")
    try:
        response = fetch(config.web_search_endpoint, params={"q": query.text})
    except (httpx.HTTPError, OSError) as exc:
        raise CollectorError(f"web search failed: {exc}") from exc
    if response.status != 200:
        raise CollectorError(f"web search returned HTTP {response.status}")

    parser = _ResultPageParser()
    parser.feed(response.text)
    items = []
    for result in parser.results:
        url = _decode_result_url(result["url"])
        if not url:
            continue
        items.append(
            make_item(
                title=unescape(result["title"]).strip(),
                content=unescape(result["snippet"]).strip(),
                source_url=url,
                source_type=SourceType.WEB_SEARCH,
            )
        )
    return items
