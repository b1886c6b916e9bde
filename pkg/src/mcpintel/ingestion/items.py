"""Normalized intelligence records and cross-source deduplication."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from enum import Enum
from urllib.parse import parse_qsl, urlencode, urlsplit, urlunsplit

from ..errors import ValidationError


class SourceType(str, Enum):
    WEB_SEARCH = "WebSearch"
    RSS = "Rss"
    NVD = "Nvd"
    GITHUB_ADVISORY = "GithubAdvisory"


# Query parameters that carry attribution, not identity.
_TRACKING_PARAMS = {"fbclid", "gclid", "mc_cid", "mc_eid", "ref", "ref_src", "igshid", "spm", "s"}
_TRACKING_PREFIXES = ("utm_",)


def canonical_url(url: str) -> str:
    """Canonical form used as the cross-source dedup key: lowercased
    scheme/host, fragment removed, tracking parameters stripped."""
    parts = urlsplit(url.strip())
    query = [
        (k, v)
        for k, v in parse_qsl(parts.query, keep_blank_values=True)
        if k not in _TRACKING_PARAMS and not k.startswith(_TRACKING_PREFIXES)
    ]
    return urlunsplit(
        (parts.scheme.lower(), parts.netloc.lower(), parts.path or "/", urlencode(query), "")
    )


def content_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class IntelItem:
    """Uniform intelligence record: any collector output normalizes to
    this shape so downstream stages are source-agnostic. ``relevance``
    stays unset until the analysis stage assigns it."""

    id: str
    title: str
    content: str
    source_url: str
    source_type: SourceType
    collected_at: datetime
    relevance: float | None = None

    def validate(self) -> "IntelItem":
        if self.collected_at.tzinfo is None:
            raise ValidationError(f"item {self.id}: collected_at must be timezone-aware UTC")
        if self.collected_at > datetime.now(timezone.utc):
            raise ValidationError(f"item {self.id}: collected_at lies in the future")
        if self.relevance is not None and not 0.0 <= self.relevance <= 1.0:
            raise ValidationError(f"item {self.id}: relevance must lie in [0, 1]")
        return self

    def with_relevance(self, score: float) -> "IntelItem":
        return replace(self, relevance=score).validate()

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "title": self.title,
            "content": self.content,
            "source_url": self.source_url,
            "source_type": self.source_type.value,
            "collected_at": self.collected_at.isoformat(),
            "relevance": self.relevance,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "IntelItem":
        return cls(
            id=data["id"],
            title=data["title"],
            content=data["content"],
            source_url=data["source_url"],
            source_type=SourceType(data["source_type"]),
            collected_at=datetime.fromisoformat(data["collected_at"]),
            relevance=data.get("relevance"),
        )


def make_item(
    title: str,
    content: str,
    source_url: str,
    source_type: SourceType,
    collected_at: datetime | None = None,
) -> IntelItem:
    """Build an item with its content-addressed identifier; identical
    (canonical URL, title, content) always derive the same id."""
    material = "\x1f".join([canonical_url(source_url), title, content])
    item_id = "intel-" + hashlib.sha256(material.encode("utf-8")).hexdigest()[:16]
    return IntelItem(
        id=item_id,
        title=title,
        content=content,
        source_url=source_url,
        source_type=source_type,
        collected_at=collected_at or datetime.now(timezone.utc),
    ).validate()


def dedup(items: list[IntelItem]) -> list[IntelItem]:
    """Collapse items sharing a canonical URL or (non-empty) content
    hash; within a group the earliest collected_at wins. Output order
    follows each group's first occurrence, so dedup is idempotent."""
    groups: list[IntelItem] = []
    by_url: dict[str, int] = {}
    by_content: dict[str, int] = {}

    for item in items:
        url_key = canonical_url(item.source_url)
        content_key = content_digest(item.content) if item.content else None

        idx = by_url.get(url_key)
        if idx is None and content_key is not None:
            idx = by_content.get(content_key)

        if idx is None:
            idx = len(groups)
            groups.append(item)
        elif item.collected_at < groups[idx].collected_at:
            groups[idx] = item

        by_url.setdefault(url_key, idx)
        if content_key is not None:
            by_content.setdefault(content_key, idx)

    return groups
