"""Analyst-view projections: attack-surface matrix, 3D landscape data,
and STRIDE distribution. Pure functions over scored cards."""

from __future__ import annotations

from dataclasses import dataclass

from ..analysis.cards import ThreatCard
from ..taxonomy import (
    GRID_CATEGORIES,
    GRID_SURFACES,
    AttackSurface,
    StrideCategory,
    TaxonomyRegistry,
)

SURFACE_COLORS = {
    AttackSurface.SERVER_APIS: "blue",
    AttackSurface.TOOL_METADATA: "green",
    AttackSurface.RUNTIME_FLOW: "red",
    AttackSurface.TRANSPORT: "amber",
}

_ROW_COLOR = ["blue", "green", "red", "amber"]


@dataclass(frozen=True)
class MatrixCell:
    intensity: float
    threat_ids: tuple[str, ...]

    def to_dict(self) -> dict:
        return {"intensity": self.intensity, "threat_ids": list(self.threat_ids)}


@dataclass(frozen=True)
class MatrixProjection:
    grid: tuple[tuple[MatrixCell, ...], ...]  # 4 x 17

    def to_dict(self) -> dict:
        return {"grid": [[cell.to_dict() for cell in row] for row in self.grid]}


@dataclass(frozen=True)
class LandscapeCell:
    height: float
    surface_color: str

    def to_dict(self) -> dict:
        return {"height": self.height, "surface_color": self.surface_color}


@dataclass(frozen=True)
class LandscapeProjection:
    grid: tuple[tuple[LandscapeCell, ...], ...]

    def to_dict(self) -> dict:
        return {"grid": [[cell.to_dict() for cell in row] for row in self.grid]}


def card_cells(card: ThreatCard, registry: TaxonomyRegistry) -> set[tuple[int, int]]:
    """Distinct grid cells a card maps to: the union of matrix_cells
    over all its taxonomy entries. The card contributes its full score
    to every one of them."""
    cells: set[tuple[int, int]] = set()
    for mcp_id in card.mcp_ids:
        cells.update(registry.get(mcp_id).matrix_cells)
    return cells


def matrix_projection(cards: list[ThreatCard], registry: TaxonomyRegistry) -> MatrixProjection:
    intensity = [[0.0] * GRID_CATEGORIES for _ in range(GRID_SURFACES)]
    threats: list[list[list[str]]] = [[[] for _ in range(GRID_CATEGORIES)] for _ in range(GRID_SURFACES)]
    for card in cards:
        for surface, category in card_cells(card, registry):
            intensity[surface][category] += card.scored.final
            threats[surface][category].append(card.id)
    return MatrixProjection(
        grid=tuple(
            tuple(
                MatrixCell(intensity=intensity[s][c], threat_ids=tuple(threats[s][c]))
                for c in range(GRID_CATEGORIES)
            )
            for s in range(GRID_SURFACES)
        )
    )


def landscape_projection(cards: list[ThreatCard], registry: TaxonomyRegistry) -> LandscapeProjection:
    heights = [[0.0] * GRID_CATEGORIES for _ in range(GRID_SURFACES)]
    for card in cards:
        for surface, category in card_cells(card, registry):
            heights[surface][category] = max(heights[surface][category], card.scored.final)
    return LandscapeProjection(
        grid=tuple(
            tuple(LandscapeCell(height=heights[s][c], surface_color=_ROW_COLOR[s]) for c in range(GRID_CATEGORIES))
            for s in range(GRID_SURFACES)
        )
    )


def stride_distribution(cards: list[ThreatCard]) -> dict[str, int]:
    """Card count per primary STRIDE category; totals equal card count."""
    counts = {category.value: 0 for category in StrideCategory}
    for card in cards:
        counts[card.stride.value] += 1
    return counts
