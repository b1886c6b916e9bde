"""MCP-38 taxonomy registry, framework enumerations, and the
deterministic MCP -> OWASP bridge.

Taxonomy content lives in an editable YAML data file (see
docs/taxonomy-format.md); this module only loads, validates and
queries it. Registries are immutable after load and safe for
unrestricted concurrent reads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import yaml

from .errors import ParseError, UnknownIdError, ValidationError
from .scoring import RiskFactors, ThreatFlag

TAXONOMY_SIZE = 38
GRID_SURFACES = 4
GRID_CATEGORIES = 17

_ID_PATTERN = re.compile(r"^MCP-(0[1-9]|[12][0-9]|3[0-8])$")


class StrideCategory(str, Enum):
    SPOOFING = "Spoofing"
    TAMPERING = "Tampering"
    REPUDIATION = "Repudiation"
    INFORMATION_DISCLOSURE = "InformationDisclosure"
    DENIAL_OF_SERVICE = "DenialOfService"
    ELEVATION_OF_PRIVILEGE = "ElevationOfPrivilege"


class WorkflowPhase(str, Enum):
    TASK_PLANNING = "TaskPlanning"
    TOOL_INVOCATION = "ToolInvocation"
    RESPONSE_HANDLING = "ResponseHandling"
    CROSS_PHASE = "CrossPhase"


class AttackSurface(str, Enum):
    SERVER_APIS = "ServerAPIs"
    TOOL_METADATA = "ToolMetadata"
    RUNTIME_FLOW = "RuntimeFlow"
    TRANSPORT = "Transport"

    @property
    def row_index(self) -> int:
        return _SURFACE_ORDER.index(self)


_SURFACE_ORDER = [
    AttackSurface.SERVER_APIS,
    AttackSurface.TOOL_METADATA,
    AttackSurface.RUNTIME_FLOW,
    AttackSurface.TRANSPORT,
]


@dataclass(frozen=True)
class ThreatPattern:
    """One taxonomy entry: classification axes, scoring defaults,
    framework mappings and benchmark grid coordinates."""

    id: str
    name: str
    description: str
    workflow_phase: WorkflowPhase
    attack_surface: AttackSurface
    stride_primary: StrideCategory
    flags: frozenset[ThreatFlag]
    baseline_factors: RiskFactors
    owasp_llm: frozenset[str]
    owasp_agentic: frozenset[str]
    matrix_cells: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class FrameworkMapping:
    owasp_llm: frozenset[str]
    owasp_agentic: frozenset[str]


@dataclass(frozen=True)
class TaxonomyRegistry:
    """Validated, immutable collection of threat patterns.

    A complete registry has exactly 38 entries; partial registries are
    only produced with allow_partial=True and carry partial=True.
    """

    entries: dict[str, ThreatPattern]
    version: str
    grid_categories: tuple[str, ...]
    partial: bool = False

    def get(self, pattern_id: str) -> ThreatPattern:
        try:
            return self.entries[pattern_id]
        except KeyError:
            raise UnknownIdError(pattern_id) from None

    def __contains__(self, pattern_id: str) -> bool:
        return pattern_id in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def ids(self) -> list[str]:
        return sorted(self.entries)


def default_taxonomy_path() -> Path:
    return Path(__file__).parent / "data" / "mcp38.yaml"


def _parse_entry(raw: dict, grid_categories: int) -> ThreatPattern:
    entry_id = raw.get("id", "<missing id>")

    def fail(msg: str):
        raise ValidationError(f"taxonomy entry {entry_id}: {msg}")

    if not isinstance(entry_id, str) or not _ID_PATTERN.match(entry_id):
        fail("id must match MCP-NN with NN in 01..38")
    for key in ("name", "description"):
        if not raw.get(key) or not isinstance(raw[key], str):
            fail(f"missing or empty field {key!r}")
    try:
        phase = WorkflowPhase(raw["workflow_phase"])
        surface = AttackSurface(raw["attack_surface"])
        stride = StrideCategory(raw["stride_primary"])
        flags = frozenset(ThreatFlag(f) for f in raw.get("flags", []))
    except (KeyError, ValueError) as exc:
        fail(f"bad enum value ({exc})")
    try:
        bf = raw["baseline_factors"]
        factors = RiskFactors(L=bf["L"], S=float(bf["S"]), I=float(bf["I"]), D=float(bf["D"])).validate()
    except (KeyError, TypeError) as exc:
        fail(f"bad baseline_factors ({exc})")
    except ValidationError as exc:
        fail(f"bad baseline_factors: {exc}")

    cells = []
    for cell in raw.get("matrix_cells", []):
        if not (isinstance(cell, (list, tuple)) and len(cell) == 2):
            fail(f"matrix cell {cell!r} is not a (surface, category) pair")
        s, c = int(cell[0]), int(cell[1])
        if not (0 <= s < GRID_SURFACES and 0 <= c < grid_categories):
            fail(f"matrix cell ({s}, {c}) outside the {GRID_SURFACES}x{grid_categories} grid")
        cells.append((s, c))

    return ThreatPattern(
        id=entry_id,
        name=raw["name"],
        description=raw["description"],
        workflow_phase=phase,
        attack_surface=surface,
        stride_primary=stride,
        flags=flags,
        baseline_factors=factors,
        owasp_llm=frozenset(str(x) for x in raw.get("owasp_llm", [])),
        owasp_agentic=frozenset(str(x) for x in raw.get("owasp_agentic", [])),
        matrix_cells=tuple(cells),
    )


def load_taxonomy(path: str | Path | None = None, allow_partial: bool = False) -> TaxonomyRegistry:
    """Load and validate the taxonomy data file.

    Raises ParseError for malformed files and ValidationError for
    rule violations (bad ids, duplicate ids, out-of-range factors or
    grid cells, wrong entry count), naming the offending entry.
    """
    path = Path(path) if path is not None else default_taxonomy_path()
    try:
        with open(path, encoding="utf-8") as fh:
            doc = yaml.safe_load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read taxonomy file {path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ParseError(f"malformed taxonomy file {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ParseError(f"taxonomy file {path} must be a mapping at top level")

    version = str(doc.get("version", ""))
    if not version:
        raise ValidationError("taxonomy file has no version string")

    grid = doc.get("grid", {})
    categories = tuple(str(c) for c in grid.get("categories", []))
    if len(categories) != GRID_CATEGORIES:
        raise ValidationError(f"grid must list exactly {GRID_CATEGORIES} category labels, got {len(categories)}")

    raw_entries = doc.get("entries", [])
    entries: dict[str, ThreatPattern] = {}
    for raw in raw_entries:
        pattern = _parse_entry(raw, len(categories))
        if pattern.id in entries:
            raise ValidationError(f"duplicate taxonomy id {pattern.id}")
        entries[pattern.id] = pattern

    if len(entries) != TAXONOMY_SIZE and not allow_partial:
        raise ValidationError(f"complete registry requires {TAXONOMY_SIZE} entries, found {len(entries)}")

    return TaxonomyRegistry(
        entries=entries,
        version=version,
        grid_categories=categories,
        partial=len(entries) != TAXONOMY_SIZE,
    )


def bridge_to_frameworks(ids: set[str] | frozenset[str], registry: TaxonomyRegistry) -> FrameworkMapping:
    """Deterministic framework bridge: set-union of per-entry OWASP
    mappings. Pure lookup; no model involvement."""
    llm: set[str] = set()
    agentic: set[str] = set()
    for pattern_id in ids:
        entry = registry.get(pattern_id)
        llm |= entry.owasp_llm
        agentic |= entry.owasp_agentic
    return FrameworkMapping(owasp_llm=frozenset(llm), owasp_agentic=frozenset(agentic))
