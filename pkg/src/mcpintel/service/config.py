"""Platform configuration: sources, scoring, analysis, model ids and
data paths. Credentials never live here; they come from environment
variables only."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from ..analysis.cards import AnalysisConfig
from ..errors import ValidationError
from ..ingestion.collectors import SourceConfig
from ..scoring import ScoringConfig


@dataclass
class PlatformConfig:
    data_dir: Path = Path("./mcpintel-data")
    taxonomy_path: Path | None = None
    model_id: str = "default"
    keyword_model_id: str | None = None
    api_base: str = ""
    sources: SourceConfig = field(default_factory=SourceConfig)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    analysis: AnalysisConfig = field(default_factory=AnalysisConfig)
    # Pinned queries skip model keyword generation when non-empty.
    fixed_queries: tuple[str, ...] = ()
    # Fixture files per source; any entry set makes that source read
    # from disk instead of the network.
    fixtures: dict = field(default_factory=dict)
    # Transcript file for hermetic runs; mode is per-invocation.
    transcript_path: Path | None = None
    transcript_mode: str = "live"

    @property
    def db_path(self) -> Path:
        return self.data_dir / "platform.db"

    @property
    def graph_log_path(self) -> Path:
        return self.data_dir / "graph-log.jsonl"

    def validate(self) -> "PlatformConfig":
        self.sources.validate()
        self.scoring.validate()
        self.analysis.validate()
        if self.transcript_mode not in ("live", "record", "replay"):
            raise ValidationError(f"transcript_mode must be live, record or replay, got {self.transcript_mode!r}")
        return self

    def to_dict(self) -> dict:
        sources = {
            "rss_feeds": list(self.sources.rss_feeds),
            "nvd_endpoint": self.sources.nvd_endpoint,
            "github_advisories_endpoint": self.sources.github_advisories_endpoint,
            "web_search_endpoint": self.sources.web_search_endpoint,
            "web_search_enabled": self.sources.web_search_enabled,
            "nvd_enabled": self.sources.nvd_enabled,
            "github_advisories_enabled": self.sources.github_advisories_enabled,
            "timeout": self.sources.timeout,
            "retry_max": self.sources.retry_max,
            "retry_base_delay": self.sources.retry_base_delay,
            "min_results_threshold": self.sources.min_results_threshold,
            "max_relaxation_rounds": self.sources.max_relaxation_rounds,
        }
        return {
            "data_dir": str(self.data_dir),
            "taxonomy_path": str(self.taxonomy_path) if self.taxonomy_path else None,
            "model_id": self.model_id,
            "keyword_model_id": self.keyword_model_id,
            "api_base": self.api_base,
            "sources": sources,
            "scoring": self.scoring.to_dict(),
            "analysis": {
                "relevance_threshold": self.analysis.relevance_threshold,
                "batch_size": self.analysis.batch_size,
                "relevance_max_tokens": self.analysis.relevance_max_tokens,
            },
            "fixed_queries": list(self.fixed_queries),
            "fixtures": dict(self.fixtures),
            "transcript_path": str(self.transcript_path) if self.transcript_path else None,
            "transcript_mode": self.transcript_mode,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "PlatformConfig":
        sources_raw = dict(data.get("sources", {}))
        if "rss_feeds" in sources_raw:
            sources_raw["rss_feeds"] = tuple(sources_raw["rss_feeds"])
        config = cls(
            data_dir=Path(data.get("data_dir", "./mcpintel-data")),
            taxonomy_path=Path(data["taxonomy_path"]) if data.get("taxonomy_path") else None,
            model_id=data.get("model_id", "default"),
            keyword_model_id=data.get("keyword_model_id"),
            api_base=data.get("api_base", ""),
            sources=SourceConfig(**sources_raw),
            scoring=ScoringConfig(**data.get("scoring", {})),
            analysis=AnalysisConfig(**data.get("analysis", {})),
            fixed_queries=tuple(data.get("fixed_queries", [])),
            fixtures=dict(data.get("fixtures", {})),
            transcript_path=Path(data["transcript_path"]) if data.get("transcript_path") else None,
            transcript_mode=data.get("transcript_mode", "live"),
        )
        return config.validate()


def load_config(path: str | Path) -> PlatformConfig:
    with open(path, encoding="utf-8") as fh:
        return PlatformConfig.from_dict(yaml.safe_load(fh) or {})


def save_config(config: PlatformConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        yaml.safe_dump(config.to_dict(), fh, sort_keys=False)
