"""Critical-level gate: semantic constraint on top of the numeric bands."""

from __future__ import annotations

from dataclasses import replace

from ..scoring import RiskLevel, ScoringConfig, classify_level
from .cards import ThreatCard


def enforce_consistency(card: ThreatCard, config: ScoringConfig | None = None) -> ThreatCard:
    """Re-derive the level from the numeric score, then apply the
    Critical gate: Critical stands only when the score strictly exceeds
    9.0 AND the threat involves RCE, exfiltration or critical asset
    compromise. Gated cards drop to High with an audit note."""
    config = (config or ScoringConfig()).validate()
    level = classify_level(card.scored.final, config)
    if level != card.scored.level:
        card = replace(card, scored=replace(card.scored, level=level))
        card = card.with_note(f"level re-derived to {level.value} from score {card.scored.final:.3f}")

    if card.scored.level is RiskLevel.CRITICAL:
        if card.scored.final <= config.threshold_critical or not card.rce_or_exfil_or_critical_asset:
            reason = (
                f"score {card.scored.final:.3f} does not exceed {config.threshold_critical}"
                if card.scored.final <= config.threshold_critical
                else "no RCE/exfiltration/critical-asset involvement asserted"
            )
            card = replace(card, scored=replace(card.scored, level=RiskLevel.HIGH))
            card = card.with_note(f"Critical downgraded to High: {reason}")
    return card
