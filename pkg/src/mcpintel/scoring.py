"""Composite risk scoring: weighted base score, priority multipliers,
final-score clamp to the 0-10 scale, and level classification.

All functions are pure and deterministic over immutable inputs.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum

from .errors import ValidationError

log = logging.getLogger(__name__)

SEVERITY_LEVELS = 7

# Allowed discrete values for persistence/scope and exploitation ease.
PERSISTENCE_VALUES = (0.5, 0.75, 1.0)
EASE_VALUES = (0.33, 0.66, 1.0)

# Documentation labels for the seven severity levels; no behavioral effect.
SEVERITY_LEVEL_NAMES = {
    1: "Negligible",
    2: "Minor",
    3: "Moderate",
    4: "Significant",
    5: "Severe",
    6: "Critical impact",
    7: "Catastrophic",
}


class ThreatFlag(str, Enum):
    """Threat-class properties that amplify the final score."""

    SEMANTIC_INFERENCE_TIME = "SemanticInferenceTime"
    PARASITIC_CHAINING = "ParasiticChaining"
    LOW_OBSERVABILITY = "LowObservability"


class RiskLevel(str, Enum):
    CRITICAL = "Critical"
    HIGH = "High"
    MEDIUM = "Medium"
    LOW = "Low"


@dataclass(frozen=True)
class RiskFactors:
    """Four scoring factors: severity level, success rate, persistence, ease.

    L is an integer on a 7-level severity scale (normalized to L/7);
    S is an empirical success probability in [0, 1]; I and D take the
    discrete values listed in PERSISTENCE_VALUES / EASE_VALUES.
    """

    L: int
    S: float
    I: float
    D: float

    def validate(self) -> "RiskFactors":
        if not isinstance(self.L, int) or not 1 <= self.L <= SEVERITY_LEVELS:
            raise ValidationError(f"severity level L must be an integer in 1..7, got {self.L!r}")
        if not 0.0 <= self.S <= 1.0:
            raise ValidationError(f"success rate S must lie in [0, 1], got {self.S!r}")
        if self.I not in PERSISTENCE_VALUES:
            raise ValidationError(f"persistence I must be one of {PERSISTENCE_VALUES}, got {self.I!r}")
        if self.D not in EASE_VALUES:
            raise ValidationError(f"ease D must be one of {EASE_VALUES}, got {self.D!r}")
        return self


@dataclass(frozen=True)
class ScoringConfig:
    """Weights, multipliers and level thresholds. Defaults sum to 1.0;
    other weight sums are permitted with a logged warning since the base
    score may then exceed 1 before the clamp."""

    w_L: float = 0.35
    w_S: float = 0.30
    w_I: float = 0.20
    w_D: float = 0.15
    multiplier_semantic: float = 1.20
    multiplier_chaining: float = 1.15
    multiplier_observability: float = 1.10
    threshold_critical: float = 9.0
    threshold_high: float = 7.0
    threshold_medium: float = 4.0

    def validate(self) -> "ScoringConfig":
        for name in ("w_L", "w_S", "w_I", "w_D"):
            if getattr(self, name) < 0:
                raise ValidationError(f"weight {name} must be non-negative")
        if not (self.threshold_critical > self.threshold_high > self.threshold_medium > 0):
            raise ValidationError(
                "thresholds must satisfy critical > high > medium > 0, got "
                f"{self.threshold_critical}/{self.threshold_high}/{self.threshold_medium}"
            )
        weight_sum = self.w_L + self.w_S + self.w_I + self.w_D
        if not math.isclose(weight_sum, 1.0, abs_tol=1e-9):
            log.warning("scoring weights sum to %.4f (not 1.0); base score may exceed 1 pre-clamp", weight_sum)
        return self

    def multiplier_for(self, flag: ThreatFlag) -> float:
        return {
            ThreatFlag.SEMANTIC_INFERENCE_TIME: self.multiplier_semantic,
            ThreatFlag.PARASITIC_CHAINING: self.multiplier_chaining,
            ThreatFlag.LOW_OBSERVABILITY: self.multiplier_observability,
        }[flag]

    def to_dict(self) -> dict:
        return {
            "w_L": self.w_L,
            "w_S": self.w_S,
            "w_I": self.w_I,
            "w_D": self.w_D,
            "multiplier_semantic": self.multiplier_semantic,
            "multiplier_chaining": self.multiplier_chaining,
            "multiplier_observability": self.multiplier_observability,
            "threshold_critical": self.threshold_critical,
            "threshold_high": self.threshold_high,
            "threshold_medium": self.threshold_medium,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ScoringConfig":
        known = {f.name for f in cls.__dataclass_fields__.values()}  # type: ignore[attr-defined]
        unknown = set(data) - known
        if unknown:
            raise ValidationError(f"unknown scoring config fields: {sorted(unknown)}")
        return cls(**data).validate()


@dataclass(frozen=True)
class ScoredRisk:
    """Base score, applied multiplier, clamped final score and level."""

    base: float
    multiplier: float
    final: float
    level: RiskLevel

    def to_dict(self) -> dict:
        return {
            "base": self.base,
            "multiplier": self.multiplier,
            "final": self.final,
            "level": self.level.value,
        }


# Fields are evaluated in this fixed order so identical inputs produce
# bit-identical doubles.
def base_score(factors: RiskFactors, config: ScoringConfig | None = None) -> float:
    """Weighted sum w_L*(L/7) + w_S*S + w_I*I + w_D*D."""
    config = (config or ScoringConfig()).validate()
    factors.validate()
    return (
        config.w_L * (factors.L / SEVERITY_LEVELS)
        + config.w_S * factors.S
        + config.w_I * factors.I
        + config.w_D * factors.D
    )


def priority_multiplier(flags: set[ThreatFlag] | frozenset[ThreatFlag], config: ScoringConfig | None = None) -> float:
    """Product of the configured multipliers for each present flag.

    The empty set yields 1.0. Multiple flags compound multiplicatively;
    the final-score clamp bounds the effect.
    """
    config = (config or ScoringConfig()).validate()
    multiplier = 1.0
    # Fixed evaluation order (enum declaration order) for determinism.
    for flag in ThreatFlag:
        if flag in flags:
            multiplier *= config.multiplier_for(flag)
    return multiplier


def classify_level(score: float, config: ScoringConfig | None = None) -> RiskLevel:
    """Map a final score in [0, 10] to a level band.

    Band lower bounds are inclusive: 9.0 is Critical, 7.0 is High,
    4.0 is Medium. Comparisons are exact (no epsilon).
    """
    config = (config or ScoringConfig()).validate()
    if not 0.0 <= score <= 10.0:
        raise ValidationError(f"score must lie in [0, 10], got {score!r}")
    if score >= config.threshold_critical:
        return RiskLevel.CRITICAL
    if score >= config.threshold_high:
        return RiskLevel.HIGH
    if score >= config.threshold_medium:
        return RiskLevel.MEDIUM
    return RiskLevel.LOW


def final_score(
    factors: RiskFactors,
    flags: set[ThreatFlag] | frozenset[ThreatFlag] = frozenset(),
    config: ScoringConfig | None = None,
) -> ScoredRisk:
    """Full scoring chain: base, multiplier, 10-point clamp, level."""
    config = (config or ScoringConfig()).validate()
    base = base_score(factors, config)
    multiplier = priority_multiplier(flags, config)
    final = min(10.0, base * multiplier * 10.0)
    final = max(0.0, final)
    return ScoredRisk(base=base, multiplier=multiplier, final=final, level=classify_level(final, config))
