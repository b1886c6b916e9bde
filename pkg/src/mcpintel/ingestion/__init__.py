"""Intelligence collection: source collectors, normalization to
IntelItem, deduplication, and taxonomy-seeded query generation."""

from .collectors import (
    CollectorError,
    FetchResponse,
    SourceConfig,
    collect_github_advisories,
    collect_nvd,
    collect_rss,
    collect_web_search,
    file_fetch,
    http_fetch,
)
from .items import IntelItem, SourceType, canonical_url, dedup, make_item
from .queries import KeywordGeneration, SearchQuery, Specificity, generate_keywords, relax_query, template_queries

__all__ = [
    "CollectorError",
    "FetchResponse",
    "IntelItem",
    "KeywordGeneration",
    "SearchQuery",
    "SourceConfig",
    "SourceType",
    "Specificity",
    "canonical_url",
    "collect_github_advisories",
    "collect_nvd",
    "collect_rss",
    "collect_web_search",
    "dedup",
    "file_fetch",
    "generate_keywords",
    "http_fetch",
    "make_item",
    "relax_query",
    "template_queries",
]
